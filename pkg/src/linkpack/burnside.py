"""Burnside-group orders, the exponent-3 group on two generators, and bound calculators.

Bounds are reported as natural logarithms; exact integers are attached only
when they stay under ``MAX_DIGITS`` decimal digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from sympy import isprime, nextprime

MAX_DIGITS = 10_000


class BoundError(ValueError):
    pass


def burnside_order_exponent(m: int) -> int:
    return m + math.comb(m, 2) + math.comb(m, 3)


def burnside_order(m: int) -> int:
    """Order of the free m-generator group of exponent 3."""
    if m < 1:
        raise BoundError("m must be at least 1")
    return 3 ** burnside_order_exponent(m)


class B23Element(NamedTuple):
    """Unitriangular matrix [[1, a, c], [0, 1, b], [0, 0, 1]] over Z/3.

    x = (1, 0, 0) and y = (0, 1, 0) generate; z = (0, 0, 1) is central.
    """

    a: int
    b: int
    c: int

    @classmethod
    def make(cls, a, b, c) -> "B23Element":
        return cls(a % 3, b % 3, c % 3)

    def matrix(self):
        return ((1, self.a, self.c), (0, 1, self.b), (0, 0, 1))


IDENTITY = B23Element(0, 0, 0)
X = B23Element(1, 0, 0)
Y = B23Element(0, 1, 0)


def b23_mul(g: B23Element, h: B23Element) -> B23Element:
    return B23Element.make(g.a + h.a, g.b + h.b, g.c + h.c + g.a * h.b)


def b23_inv(g: B23Element) -> B23Element:
    return B23Element.make(-g.a, -g.b, -g.c + g.a * g.b)


def b23_pow(g: B23Element, n: int) -> B23Element:
    out = IDENTITY
    base = g if n >= 0 else b23_inv(g)
    for _ in range(abs(n)):
        out = b23_mul(out, base)
    return out


def b23_commutator(g: B23Element, h: B23Element) -> B23Element:
    return b23_mul(b23_mul(g, h), b23_mul(b23_inv(g), b23_inv(h)))


def b23_closure(generators=(X, Y)) -> set[B23Element]:
    """Subgroup generated by ``generators`` (breadth-first under right multiplication)."""
    seen = {IDENTITY}
    frontier = [IDENTITY]
    gens = list(generators) + [b23_inv(g) for g in generators]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = b23_mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


@dataclass(frozen=True)
class BoundReport:
    formula: str
    inputs: dict
    log_value: float
    exact: int | None = field(default=None)

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "inputs": self.inputs,
            "log_value": self.log_value,
            "exact": None if self.exact is None else str(self.exact),
        }


def _maybe_exact(log_value: float, build) -> int | None:
    if log_value / math.log(10) >= MAX_DIGITS:
        return None
    return build()


def _require_prime(p: int) -> None:
    if not isprime(int(p)):
        raise BoundError(f"{p} is not prime")


def qkp_order_bound(g: int, k: int, p: int) -> BoundReport:
    """``p^(g + g^2 + ... + g^(k-1))``: one Z/p per new basic commutator per stage."""
    if g < 1 or k < 2:
        raise BoundError("need g >= 1 and k >= 2")
    _require_prime(p)
    exponent = sum(g ** s for s in range(1, k))
    log_value = exponent * math.log(p)
    return BoundReport("qkp_order", {"g": g, "k": k, "p": p}, log_value,
                       _maybe_exact(log_value, lambda: p ** exponent))


def _integral(x: float) -> int | None:
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 * max(1.0, abs(x)) else None


def thm_bounds(theorem: int, epsilon: float, a: float, k: int | None = None,
               p: int | None = None) -> BoundReport:
    """Packing-number upper bounds as natural logs.

    1: ``exp(a eps^-3)``; 2: ``exp(a eps^-9)``;
    4: ``(k+1)^(a eps^-3) * p^((a eps^-3)^(k-1))``.
    """
    if not 0 < epsilon <= 0.5:
        raise BoundError("epsilon must lie in (0, 0.5]")
    if a <= 0:
        raise BoundError("a must be positive")
    inputs = {"theorem": theorem, "epsilon": epsilon, "a": a}
    if theorem == 1:
        return BoundReport("exp(a*eps^-3)", inputs, a * epsilon ** -3)
    if theorem == 2:
        return BoundReport("exp(a*eps^-9)", inputs, a * epsilon ** -9)
    if theorem == 4:
        if k is None or p is None:
            raise BoundError("theorem 4 needs k and p")
        if k < 2:
            raise BoundError("k must be at least 2")
        _require_prime(p)
        inputs.update(k=k, p=p)
        g = a * epsilon ** -3
        log_value = g * math.log(k + 1) + g ** (k - 1) * math.log(p)
        gi = _integral(g)
        exact = None
        if gi is not None:
            exact = _maybe_exact(log_value, lambda: (k + 1) ** gi * p ** (gi ** (k - 1)))
        return BoundReport("(k+1)^(a*eps^-3) * p^((a*eps^-3)^(k-1))", inputs, log_value, exact)
    raise BoundError(f"unknown theorem {theorem}; expected 1, 2 or 4")


def smallest_valid_prime(mu_values) -> int:
    """Least prime dividing none of the given nonzero invariants."""
    vals = [int(v) for v in mu_values]
    if not vals:
        raise BoundError("need at least one invariant")
    if any(v == 0 for v in vals):
        raise BoundError("invariants must be nonzero")
    p = 2
    while any(v % p == 0 for v in vals):
        p = nextprime(p)
    return p
