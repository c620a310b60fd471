"""Free-group words and their Magnus expansions in the non-repeating ring.

The target ring is the noncommutative polynomial ring on ``x_1..x_v`` modulo
every monomial in which some variable repeats.  Only injective index
sequences survive, so there are ``sum_j v!/(v-j)!`` monomials and
polynomials are stored densely over that basis.  A meridian ``m_i`` maps to
``1 + x_i`` and its inverse to ``1 - x_i``; both are exact because
``x_i^2 = 0``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np
from sympy import isprime

INFINITY = math.inf


class MagnusError(ValueError):
    pass


# ---------------------------------------------------------------------------
# words

@dataclass(frozen=True)
class Word:
    """Signed generator word; ``letters`` holds nonzero ints, ``-i`` meaning m_i^-1."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if any(x == 0 for x in letters):
            raise MagnusError("generator indices start at 1")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """``"1 2 -1 -2"`` -> m1 m2 m1^-1 m2^-1."""
        return cls(tuple(int(tok) for tok in text.replace(",", " ").split()))

    def __str__(self):
        return " ".join(str(x) for x in self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def reduced(self) -> "Word":
        out: list[int] = []
        for x in self.letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return Word(tuple(out))

    def max_generator(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    def exponent_sums(self, v: int) -> list[int]:
        sums = [0] * v
        for x in self.letters:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return sums


def commutator(a: Word, b: Word) -> Word:
    """``a b a^-1 b^-1``."""
    return a * b * a.inverse() * b.inverse()


def conjugate(g: Word, by: Word) -> Word:
    """``by g by^-1``."""
    return by * g * by.inverse()


def meridian(i: int) -> Word:
    return Word((i,))


# ---------------------------------------------------------------------------
# monomial basis

class MonomialBasis:
    """Injective index sequences over ``1..v`` ordered by (degree, lexicographic)."""

    def __init__(self, v: int):
        if v < 0:
            raise MagnusError("negative variable count")
        self.v = v
        monos: list[tuple[int, ...]] = [()]
        for deg in range(1, v + 1):
            monos.extend(permutations(range(1, v + 1), deg))
        self.monomials = monos
        self.index = {m: i for i, m in enumerate(monos)}
        self.degree = np.array([len(m) for m in monos], dtype=np.int64)
        self.size = len(monos)
        # right multiplication by x_i: src monomial (without i) -> src + (i,)
        self.right = {}
        self.left = {}
        for i in range(1, v + 1):
            src = [k for k, m in enumerate(monos) if i not in m]
            self.right[i] = (np.array(src, dtype=np.int64),
                             np.array([self.index[monos[k] + (i,)] for k in src], dtype=np.int64))
            self.left[i] = (np.array(src, dtype=np.int64),
                            np.array([self.index[(i,) + monos[k]] for k in src], dtype=np.int64))
        pairs = [(a, b, self.index[ma + mb]) for a, ma in enumerate(monos)
                 for b, mb in enumerate(monos) if not set(ma) & set(mb)]
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 3)
        self.mul_a, self.mul_b, self.mul_c = arr[:, 0], arr[:, 1], arr[:, 2]


@lru_cache(maxsize=None)
def basis(v: int) -> MonomialBasis:
    return MonomialBasis(v)


def monomial_count(v: int) -> int:
    return sum(math.perm(v, j) for j in range(v + 1))


# ---------------------------------------------------------------------------
# polynomials

class NRPoly:
    """Element of the non-repeating ring over Z (``modulus=None``) or Z/p."""

    __slots__ = ("v", "modulus", "coeffs")

    def __init__(self, v: int, coeffs=None, modulus: int | None = None):
        self.v = v
        self.modulus = modulus
        B = basis(v)
        if coeffs is None:
            arr = np.zeros(B.size, dtype=self._dtype())
        else:
            arr = np.array(coeffs, dtype=self._dtype())
            if arr.shape != (B.size,):
                raise MagnusError(f"expected {B.size} coefficients, got {arr.shape}")
        if modulus is not None:
            arr %= modulus
        self.coeffs = arr

    def _dtype(self):
        return object if self.modulus is None else np.int64

    # constructors
    @classmethod
    def one(cls, v: int, modulus: int | None = None) -> "NRPoly":
        p = cls(v, modulus=modulus)
        p.coeffs[0] = 1
        return p

    @classmethod
    def from_dict(cls, v: int, terms: dict, modulus: int | None = None) -> "NRPoly":
        B = basis(v)
        p = cls(v, modulus=modulus)
        for mono, c in terms.items():
            mono = tuple(mono)
            if mono not in B.index:
                raise MagnusError(f"{mono} is not a non-repeating monomial in {v} variables")
            p.coeffs[B.index[mono]] += c
        if modulus is not None:
            p.coeffs %= modulus
        return p

    def to_dict(self) -> dict:
        B = basis(self.v)
        return {B.monomials[k]: int(c) for k, c in enumerate(self.coeffs) if c != 0}

    def copy(self) -> "NRPoly":
        return NRPoly(self.v, self.coeffs.copy(), self.modulus)

    # ring structure
    def _check(self, other: "NRPoly"):
        if self.v != other.v or self.modulus != other.modulus:
            raise MagnusError("polynomials live in different rings")

    def __add__(self, other):
        self._check(other)
        return NRPoly(self.v, self.coeffs + other.coeffs, self.modulus)

    def __sub__(self, other):
        self._check(other)
        return NRPoly(self.v, self.coeffs - other.coeffs, self.modulus)

    def __neg__(self):
        return NRPoly(self.v, -self.coeffs, self.modulus)

    def __mul__(self, other):
        if isinstance(other, int):
            return NRPoly(self.v, self.coeffs * other, self.modulus)
        self._check(other)
        B = basis(self.v)
        out = np.zeros(B.size, dtype=self._dtype())
        np.add.at(out, B.mul_c, self.coeffs[B.mul_a] * other.coeffs[B.mul_b])
        return NRPoly(self.v, out, self.modulus)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "NRPoly":
        if n < 0:
            return self.inverse() ** (-n)
        result = NRPoly.one(self.v, self.modulus)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "NRPoly":
        """Neumann series ``sum (-A)^j`` for monic ``1 + A``; it stops at degree v."""
        if self.constant != 1:
            raise MagnusError("only polynomials with constant term 1 are inverted")
        A = self - NRPoly.one(self.v, self.modulus)
        term = NRPoly.one(self.v, self.modulus)
        total = term.copy()
        for _ in range(self.v):
            term = term * (-A)
            total = total + term
        return total

    def __eq__(self, other):
        if not isinstance(other, NRPoly):
            return NotImplemented
        return (self.v == other.v and self.modulus == other.modulus
                and all(int(a) == int(b) for a, b in zip(self.coeffs, other.coeffs)))

    def __hash__(self):
        return hash((self.v, self.modulus, tuple(int(c) for c in self.coeffs)))

    def reduce_mod(self, p: int) -> "NRPoly":
        return NRPoly(self.v, np.array([int(c) % p for c in self.coeffs], dtype=np.int64), p)

    # queries
    @property
    def constant(self) -> int:
        return int(self.coeffs[0])

    def coefficient(self, mono) -> int:
        return mu_coefficient(self, mono)

    def is_one(self) -> bool:
        return self.constant == 1 and not any(int(c) for c in self.coeffs[1:])

    def min_degree(self) -> float:
        """Smallest positive degree carrying a nonzero coefficient (inf if none)."""
        deg = basis(self.v).degree
        nz = [int(deg[k]) for k in range(1, len(self.coeffs)) if self.coeffs[k] != 0]
        return min(nz) if nz else INFINITY

    def __repr__(self):
        terms = []
        for mono, c in sorted(self.to_dict().items(), key=lambda t: (len(t[0]), t[0])):
            name = "".join(f"x{i}" for i in mono) or "1"
            terms.append(f"{c:+d}*{name}" if mono else f"{c:+d}")
        ring = "Z" if self.modulus is None else f"Z/{self.modulus}"
        return f"NRPoly[{ring}; v={self.v}]({' '.join(terms) or '0'})"


def expand(word: Word, v: int | None = None, modulus: int | None = None) -> NRPoly:
    """Magnus expansion: product over letters of ``1 +- x_i``."""
    v = word.max_generator() if v is None else v
    if word.max_generator() > v:
        raise MagnusError(f"word uses generator {word.max_generator()} but v = {v}")
    B = basis(v)
    poly = NRPoly.one(v, modulus)
    c = poly.coeffs
    letters = word.letters
    n = len(letters)
    k = 0
    while k < n:
        g = letters[k]
        j = k
        exp = 0
        while j < n and abs(letters[j]) == abs(g):
            exp += 1 if letters[j] > 0 else -1
            j += 1
        k = j
        if exp == 0:
            continue
        # (1 + x)^e = 1 + e x when x^2 = 0
        src, dst = B.right[abs(g)]
        if modulus is None:
            c[dst] = c[dst] + exp * c[src]
        else:
            c[dst] = (c[dst] + (exp % modulus) * c[src]) % modulus
    return poly


def mu_coefficient(poly: NRPoly, sequence) -> int:
    """Coefficient of ``x_{s1} x_{s2} ...`` (constant term for the empty sequence)."""
    seq = tuple(int(s) for s in sequence)
    if len(set(seq)) != len(seq):
        raise MagnusError(f"sequence {seq} repeats an index")
    B = basis(poly.v)
    if seq not in B.index:
        raise MagnusError(f"sequence {seq} uses indices beyond v = {poly.v}")
    return int(poly.coeffs[B.index[seq]])


def cube_divisibility(g: NRPoly) -> bool:
    """Whether every non-constant coefficient of ``g^3`` is divisible by 3."""
    if g.v != 2:
        raise MagnusError("cube divisibility is stated for two variables")
    if g.constant != 1:
        raise MagnusError("g must be monic (constant term 1)")
    cube = g * g * g if g.modulus is None else NRPoly(2, g.coeffs.astype(object)) ** 3
    return all(int(c) % 3 == 0 for c in cube.coeffs[1:])


def _require_prime(p: int) -> None:
    if not isprime(int(p)):
        raise MagnusError(f"{p} is not prime")


def filtration_min_degree(word: Word, p: int, v: int | None = None) -> float:
    """Least positive degree with a nonzero coefficient mod p (inf if the expansion is 1)."""
    _require_prime(p)
    return expand(word, v, modulus=p).min_degree()


def random_word(rng: random.Random, v: int, min_len: int = 1, max_len: int = 4) -> Word:
    n = rng.randint(min_len, max_len)
    return Word(tuple(rng.randint(1, v) * rng.choice((1, -1)) for _ in range(n)))


def _lcs_element(level: int, p: int, v: int, rng: random.Random) -> Word:
    if level <= 1:
        return random_word(rng, v)
    out = Word()
    for _ in range(rng.randint(1, 3)):
        a = random_word(rng, v)
        u = _lcs_element(level - 1, p, v, rng)
        w = _lcs_element(level - 1, p, v, rng)
        out = out * commutator(a, u) * w ** p
    return out


def random_lcs_element(level: int, p: int, v: int, seed: int) -> Word:
    """Seeded element of the level-th mod-p lower central series term.

    Level 1 is an arbitrary word; level i multiplies one to three factors
    ``a u a^-1 u^-1 w^p`` with u, w from level i-1 and a arbitrary.
    """
    if level < 1:
        raise MagnusError("level starts at 1")
    _require_prime(p)
    return _lcs_element(level, p, v, random.Random(seed)).reduced()


def band_sum_invariance(longitude: Word, beta: Word, p: int, sequence) -> bool:
    """Whether banding ``beta`` onto the longitude keeps the mu coefficient mod p.

    ``beta`` must expand to exactly 1 mod p.  The ring has ``len(sequence)``
    variables, or more if the words use higher generators.
    """
    seq = tuple(sequence)
    v = max(len(seq), longitude.max_generator(), beta.max_generator())
    _require_prime(p)
    if filtration_min_degree(beta, p, v) != INFINITY:
        raise MagnusError("beta does not expand to 1 mod p; it is not deep enough in the filtration")
    before = mu_coefficient(expand(longitude, v, modulus=p), seq)
    after = mu_coefficient(expand(longitude * beta, v, modulus=p), seq)
    return before == after


def milnor_relator_check(conj1: Word, conj2: Word, generator: int, v: int | None = None) -> bool:
    """Whether two conjugates of one meridian commute after expansion."""
    g = meridian(generator)
    a = conjugate(g, conj1)
    b = conjugate(g, conj2)
    v = max(generator, conj1.max_generator(), conj2.max_generator()) if v is None else v
    return expand(commutator(a, b), v).is_one()
