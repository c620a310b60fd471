"""Planar diagrams, Wirtinger presentations and non-repeating mu-bar invariants.

PD labels name *edges*: the pieces of a component between consecutive
crossing passages.  A crossing ``X a,b,c,d s`` lists its four edges
counter-clockwise starting from the incoming under-edge ``a``; the under
strand runs ``a -> c``.  For a positive crossing the over strand runs
``d -> b``, for a negative one ``b -> d``.  ``C e k`` puts edge ``e`` on
component ``k`` (1-based).  Wirtinger arcs are unions of edges joined
across over-passes.

Meridians are right-handed and words read left to right.  Passing under an
over-arc ``o`` at a crossing of sign ``s`` gives the relation
``out = o^-s in o^s``, and the longitude collects ``o^s`` in travel order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .certify import _points, _projection, _RETRIES, projected_crossings
from .geometry import PLLink
from .magnus import MagnusError, Word, expand, mu_coefficient

MAX_WORD_LENGTH = 2_000_000


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    a: int
    b: int
    c: int
    d: int
    sign: int

    @property
    def under_in(self) -> int:
        return self.a

    @property
    def under_out(self) -> int:
        return self.c

    @property
    def over_in(self) -> int:
        return self.d if self.sign > 0 else self.b

    @property
    def over_out(self) -> int:
        return self.b if self.sign > 0 else self.d


@dataclass(frozen=True)
class PDCode:
    crossings: tuple[Crossing, ...]
    edge_component: dict = field(hash=False)

    def __post_init__(self):
        self._validate()

    @property
    def components(self) -> list[int]:
        return sorted(set(self.edge_component.values()))

    @property
    def n_components(self) -> int:
        return len(self.components)

    @cached_property
    def head(self) -> dict:
        """edge -> (crossing index, 'under' | 'over') where the edge ends."""
        out = {}
        for i, x in enumerate(self.crossings):
            out[x.under_in] = (i, "under")
            out[x.over_in] = (i, "over")
        return out

    @cached_property
    def successor(self) -> dict:
        nxt = {}
        for x in self.crossings:
            nxt[x.under_in] = x.under_out
            nxt[x.over_in] = x.over_out
        for e in self.edge_component:
            nxt.setdefault(e, e)   # crossingless component: a single closed edge
        return nxt

    def _validate(self):
        seen_in, seen_out = {}, {}
        for i, x in enumerate(self.crossings):
            if x.sign not in (1, -1):
                raise DiagramError(f"crossing {i} has sign {x.sign}")
            for e in (x.a, x.b, x.c, x.d):
                if e not in self.edge_component:
                    raise DiagramError(f"edge {e} of crossing {i} has no component")
            for e in (x.under_in, x.over_in):
                if e in seen_in:
                    raise DiagramError(f"edge {e} enters two crossings")
                seen_in[e] = i
            for e in (x.under_out, x.over_out):
                if e in seen_out:
                    raise DiagramError(f"edge {e} leaves two crossings")
                seen_out[e] = i
        used = set(seen_in) | set(seen_out)
        if set(seen_in) != set(seen_out):
            raise DiagramError("some edge appears only once (odd parity)")
        comps_with_crossings = {self.edge_component[e] for e in used}
        for e, k in self.edge_component.items():
            if e not in used and k in comps_with_crossings:
                raise DiagramError(f"edge {e} unused although component {k} has crossings")
        for k in set(self.edge_component.values()) - comps_with_crossings:
            if sum(1 for v in self.edge_component.values() if v == k) != 1:
                raise DiagramError(f"crossingless component {k} must have exactly one edge")
        for x in self.crossings:
            for e_in, e_out in ((x.under_in, x.under_out), (x.over_in, x.over_out)):
                if self.edge_component[e_in] != self.edge_component[e_out]:
                    raise DiagramError(f"strand {e_in}->{e_out} changes component")

    def component_edges(self, k: int) -> list[int]:
        return sorted(e for e, c in self.edge_component.items() if c == k)

    def writhe(self, k: int) -> int:
        ec = self.edge_component
        return sum(x.sign for x in self.crossings if ec[x.a] == k and ec[x.over_in] == k)

    def relabel(self, mapping: dict) -> "PDCode":
        xs = tuple(Crossing(mapping[x.a], mapping[x.b], mapping[x.c], mapping[x.d], x.sign)
                   for x in self.crossings)
        return PDCode(xs, {mapping[e]: k for e, k in self.edge_component.items()})

    # text format
    def to_text(self) -> str:
        lines = [f"X {x.a},{x.b},{x.c},{x.d} {'+' if x.sign > 0 else '-'}" for x in self.crossings]
        lines += [f"C {e} {k}" for e, k in sorted(self.edge_component.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "PDCode":
        crossings, comps = [], {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "X":
                    labels = [int(t) for t in parts[1].split(",")]
                    if len(labels) != 4 or len(parts) != 3 or parts[2] not in "+-":
                        raise ValueError
                    crossings.append(Crossing(*labels, 1 if parts[2] == "+" else -1))
                elif parts[0] == "C":
                    comps[int(parts[1])] = int(parts[2])
                else:
                    raise ValueError
            except (ValueError, IndexError):
                raise DiagramError(f"line {lineno}: cannot parse {raw!r}") from None
        return cls(tuple(crossings), comps)


def load_pd(path) -> PDCode:
    return PDCode.parse(Path(path).read_text())


def pd_from_link(link: PLLink, rotation=None) -> PDCode:
    """Diagram of a polygonal link in a generic projection.

    ``rotation`` fixes the view (its third row points at the viewer); by
    default a fixed sequence of generic views is tried.
    """
    curves = [_points(c) for c in link.components]
    views = [np.asarray(rotation, dtype=float)] if rotation is not None else \
        [_projection(a) for a in range(_RETRIES)]
    for R in views:
        records = []   # (comp_a, seg_a, t, comp_b, seg_b, u, a_over, sign)
        ok = True
        for i, j in itertools.combinations_with_replacement(range(len(curves)), 2):
            pc = projected_crossings(curves[i], curves[j], R, same_curve=(i == j))
            if pc is None:
                ok = False
                break
            for n in range(len(pc.ia)):
                records.append((i, int(pc.ia[n]), float(pc.t[n]), j, int(pc.ib[n]), float(pc.u[n]),
                                bool(pc.a_over[n]), int(pc.sign[n])))
        if ok:
            return _pd_from_records(len(curves), records)
    raise DiagramError(f"no generic projection among {len(views)} views")


def _pd_from_records(n_comp: int, records) -> PDCode:
    passages: list[list[tuple]] = [[] for _ in range(n_comp)]   # (seg, t, crossing id, is_over)
    for cid, (ca, sa, t, cb, sb, u, a_over, _) in enumerate(records):
        passages[ca].append((sa, t, cid, a_over))
        passages[cb].append((sb, u, cid, not a_over))
    edge_comp = {}
    roles: dict[int, dict] = {cid: {} for cid in range(len(records))}
    label = 1
    for k, ps in enumerate(passages):
        ps.sort()
        n = len(ps)
        if n == 0:
            edge_comp[label] = k + 1
            label += 1
            continue
        first = label
        for j in range(n):
            edge_comp[first + j] = k + 1
        for j, (_, _, cid, is_over) in enumerate(ps):
            e_in = first + (j - 1) % n
            e_out = first + j
            role = "over" if is_over else "under"
            roles[cid][role] = (e_in, e_out)
        label += n
    crossings = []
    for cid, rec in enumerate(records):
        sign = rec[7]
        ui, uo = roles[cid]["under"]
        oi, oo = roles[cid]["over"]
        b, d = (oo, oi) if sign > 0 else (oi, oo)
        crossings.append(Crossing(ui, b, uo, d, sign))
    return PDCode(tuple(crossings), edge_comp)


# ---------------------------------------------------------------------------
# Wirtinger presentation

@dataclass(frozen=True)
class Presentation:
    """Arc generators ``1..n_arcs`` with one Wirtinger relator per crossing.

    ``conjugator[g]`` is a word W with ``g = W^-1 m W``, m the base meridian of
    g's component.
    """

    n_arcs: int
    relations: tuple[Word, ...]
    arc_component: dict
    base_meridians: tuple[int, ...]      # arc id per component, in component order
    conjugator: dict
    edge_arc: dict


def _arcs(pd: PDCode) -> dict:
    parent = {e: e for e in pd.edge_component}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for x in pd.crossings:
        ra, rb = find(x.b), find(x.d)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    classes: dict[int, list[int]] = {}
    for e in pd.edge_component:
        classes.setdefault(find(e), []).append(e)
    ordered = sorted(classes.values(), key=min)
    return {e: n + 1 for n, members in enumerate(ordered) for e in members}


def _traverse(pd: PDCode, edge_arc: dict, k: int):
    """Under-passages of component k in travel order from the base arc.

    Returns (base arc, start edge, [(crossing index, over arc, sign), ...]).
    """
    edges = pd.component_edges(k)
    arcs = sorted({edge_arc[e] for e in edges})
    base = arcs[0]
    under_outs = {x.under_out for x in pd.crossings}
    starts = [e for e in edges if edge_arc[e] == base and e in under_outs]
    start = min(starts) if starts else min(e for e in edges if edge_arc[e] == base)
    passes = []
    cur = start
    for _ in range(4 * len(pd.crossings) + 2):
        hd = pd.head.get(cur)
        if hd is None:      # crossingless
            break
        i, role = hd
        x = pd.crossings[i]
        if role == "under":
            passes.append((i, edge_arc[x.b], x.sign))
            cur = x.under_out
        else:
            cur = x.over_out
        if cur == start:
            break
    else:
        raise DiagramError(f"component {k} does not close up")
    return base, start, passes


def wirtinger(pd: PDCode) -> Presentation:
    edge_arc = _arcs(pd)
    n_arcs = max(edge_arc.values(), default=0)
    arc_comp = {edge_arc[e]: k for e, k in pd.edge_component.items()}
    relations = []
    for x in pd.crossings:
        a_in, a_out, o = edge_arc[x.under_in], edge_arc[x.under_out], edge_arc[x.b]
        s = x.sign
        # out = o^-s in o^s
        relations.append(Word((-a_out,)) * Word((o,)) ** (-s) * Word((a_in,)) * Word((o,)) ** s)
    bases = []
    conj: dict[int, Word] = {}
    for k in pd.components:
        base, _, passes = _traverse(pd, edge_arc, k)
        bases.append(base)
        conj[base] = Word()
        W = Word()
        for i, o, s in passes:
            W = W * Word((o,)) ** s
            nxt = edge_arc[pd.crossings[i].under_out]
            if nxt not in conj:
                conj[nxt] = W
    for g in range(1, n_arcs + 1):
        if g not in conj:
            raise DiagramError(f"arc {g} not reached while traversing its component")
    return Presentation(n_arcs, tuple(relations), arc_comp, tuple(bases), conj, edge_arc)


def longitude_word(pd: PDCode, component: int, presentation: Presentation | None = None) -> Word:
    """Zero-framed longitude of ``component`` as a word in arc generators."""
    if component not in pd.components:
        raise DiagramError(f"no component {component}")
    pres = wirtinger(pd) if presentation is None else presentation
    base, _, passes = _traverse(pd, pres.edge_arc, component)
    w = Word(tuple(o if s > 0 else -o for _, o, s in passes))
    return w * Word((base,)) ** (-pd.writhe(component))


def reduce_to_meridians(word: Word, presentation: Presentation, depth: int) -> Word:
    """Rewrite an arc word over base meridians (generator i = component i).

    Each round substitutes ``g -> W_g^-1 m W_g`` for every non-base arc; after
    ``depth`` rounds the leftover arcs are replaced by their base meridians.
    The error lies in Magnus degree > depth.
    """
    if depth < 0:
        raise DiagramError("depth must be non-negative")
    subst = {}
    for g, W in presentation.conjugator.items():
        comp_base = presentation.base_meridians[presentation.arc_component[g] - 1]
        if g == comp_base:
            continue
        subst[g] = (W.inverse() * Word((comp_base,)) * W).letters
    letters = word.letters
    for _ in range(depth):
        out: list[int] = []
        for x in letters:
            rep = subst.get(abs(x))
            if rep is None:
                piece = (x,)
            elif x > 0:
                piece = rep
            else:
                piece = tuple(-y for y in reversed(rep))
            for y in piece:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        letters = tuple(out)
        if len(letters) > MAX_WORD_LENGTH:
            raise DiagramError(f"substitution exceeded {MAX_WORD_LENGTH} letters")
    comp_of = presentation.arc_component
    final = tuple(comp_of[abs(x)] * (1 if x > 0 else -1) for x in letters)
    return Word(final).reduced()


@dataclass(frozen=True)
class MuResult:
    coefficient: int
    sequence: tuple[int, ...]
    modulus: int | None
    indeterminate: bool
    lower_order: dict

    def to_json(self) -> dict:
        return {
            "sequence": "".join(map(str, self.sequence)) if max(self.sequence) < 10
            else list(self.sequence),
            "coefficient": self.coefficient,
            "modulus": self.modulus,
            "indeterminate": self.indeterminate,
            "lower_order": self.lower_order,
        }


def _mu_value(pd: PDCode, pres: Presentation, seq: tuple[int, ...], depth: int | None) -> int:
    active = seq[-1]
    lam = longitude_word(pd, active, pres)
    reduced = reduce_to_meridians(lam, pres, len(seq) if depth is None else depth)
    poly = expand(reduced, pd.n_components)
    return mu_coefficient(poly, seq[:-1])


def _shorter_sequences(seq: tuple[int, ...]):
    """Proper subsequences of length >= 2 together with their cyclic shifts."""
    out = set()
    for r in range(2, len(seq)):
        for sub in itertools.combinations(seq, r):
            for shift in range(r):
                out.add(sub[shift:] + sub[:shift])
    return sorted(out, key=lambda s: (len(s), s))


def mu_bar(pd: PDCode, sequence, modulus: int | None = None, depth: int | None = None) -> MuResult:
    """Non-repeating mu-bar invariant; the last index is the expanded component."""
    seq = tuple(int(s) for s in sequence)
    if len(seq) < 2:
        raise DiagramError("mu-bar needs at least two indices")
    if len(set(seq)) != len(seq):
        raise DiagramError(f"indices {seq} repeat (only non-repeating invariants are supported)")
    comps = set(pd.components)
    if comps != set(range(1, pd.n_components + 1)):
        raise DiagramError("components must be numbered 1..k")
    if not set(seq) <= comps:
        raise DiagramError(f"indices {seq} not all components of the diagram")
    pres = wirtinger(pd)
    value = _mu_value(pd, pres, seq, depth)
    lower = {}
    for sub in _shorter_sequences(seq):
        v = _mu_value(pd, pres, sub, None)
        lower["".join(map(str, sub)) if max(sub) < 10 else ",".join(map(str, sub))] = \
            v % modulus if modulus else v
    if modulus:
        value %= modulus
    return MuResult(value, seq, modulus, any(v != 0 for v in lower.values()), lower)


def abelianized_linking(pd: PDCode, i: int, j: int) -> int:
    """Exponent of component i's meridian in the longitude of component j."""
    pres = wirtinger(pd)
    lam = longitude_word(pd, j, pres)
    sums = reduce_to_meridians(lam, pres, 0).exponent_sums(pd.n_components)
    return sums[i - 1]


def disjoint_union(*pds: PDCode) -> PDCode:
    """Split diagram: edge labels and component numbers are shifted per part."""
    crossings, comps = [], {}
    e_off, k_off = 0, 0
    for pd in pds:
        for x in pd.crossings:
            crossings.append(Crossing(x.a + e_off, x.b + e_off, x.c + e_off, x.d + e_off, x.sign))
        for e, k in pd.edge_component.items():
            comps[e + e_off] = k + k_off
        e_off += max(pd.edge_component, default=0)
        k_off += pd.n_components
    return PDCode(tuple(crossings), comps)
