"""Difference and initial conditions at levels 1 and 2, the imaginary-factor encoding
and the two splitting procedures used by the level-2 arguments."""

import logging
from collections import Counter, deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Tuple

from fsbasis.errors import InvalidInput, UnsupportedWeight
from fsbasis.lattice import Color, LatticeContext, WeightSpec
from fsbasis.monomial import Factor, Monomial, normalize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Clique:
    label: str
    upper: FrozenSet[Color]  # counted at depth j+1
    lower: FrozenSet[Color]  # counted at depth j


@dataclass(frozen=True)
class FreqProfile:
    window: int
    a: Dict[Color, int]
    b: Dict[Color, int]


@dataclass(frozen=True)
class Bound:
    label: str
    colors: FrozenSet[Color]
    limit: int


def _g(i: int) -> Color:
    return Color(i, 1)


def _gu(i: int) -> Color:
    return Color(i, -1)


@lru_cache(maxsize=None)
def cliques(ell: int) -> Tuple[Clique, ...]:
    pos = frozenset(_g(i) for i in range(2, ell + 1))
    neg = frozenset(_gu(i) for i in range(2, ell + 1))
    out = []
    for r in range(2, ell):
        head = frozenset(_g(i) for i in range(2, r + 1))
        out.append(Clique(f"1[r={r}]", head, neg | {_g(i) for i in range(r + 1, ell + 1)}))
        out.append(Clique(f"2[r={r}]", head, (neg - {_gu(r)}) | {_g(i) for i in range(r, ell + 1)}))
    out.append(Clique("3", pos, (neg - {_gu(ell)}) | {_g(ell)}))
    out.append(Clique("4", frozenset(_g(i) for i in range(2, ell)) | {_gu(ell)}, neg))
    for r in range(2, ell):
        tail = frozenset(_gu(i) for i in range(2, r + 1))
        out.append(Clique(f"5[r={r}]", pos | {_gu(i) for i in range(r + 1, ell + 1)}, tail))
        out.append(Clique(f"6[r={r}]", (pos - {_g(r)}) | {_gu(i) for i in range(r, ell + 1)}, tail))
    return tuple(out)


def _by_depth(m: Monomial) -> Dict[int, Counter]:
    table: Dict[int, Counter] = {}
    for f in m.factors:
        table.setdefault(f.depth, Counter())[f.color] += 1
    return table


def frequency_profile(m: Monomial, window: int) -> FreqProfile:
    table = _by_depth(m)
    return FreqProfile(window, dict(table.get(window, {})), dict(table.get(window + 1, {})))


def clique_violations(ctx: LatticeContext, m: Monomial, bound: int, first_window: int = 1) -> List[Tuple[str, int]]:
    table = _by_depth(m)
    if not table:
        return []
    bad = []
    for j in range(first_window, max(table) + 1):
        a = table.get(j, Counter())
        b = table.get(j + 1, Counter())
        if not a and not b:
            continue
        for clique in cliques(ctx.ell):
            total = sum(b[c] for c in clique.upper) + sum(a[c] for c in clique.lower)
            if total > bound:
                bad.append((clique.label, j))
    return bad


def _require_real(m: Monomial) -> None:
    if m.has_imaginary():
        raise InvalidInput(f"monomial '{m}' has depth-0 factors")


def dc1_pair(ctx: LatticeContext, left: Factor, right: Factor) -> bool:
    """x_delta(-i) x_gamma(-j) with i >= j >= 1."""
    i, j = left.depth, right.depth
    if j < 1:
        raise InvalidInput(f"depth-0 factor in pair ({left}, {right})")
    if i < j:
        raise InvalidInput(f"pair ({left}, {right}) is not ordered by depth")
    delta, gamma = left.color, right.color
    if i >= j + 2:
        return True
    if i == j + 1:
        return delta < gamma or (delta == _g(ctx.ell) and gamma == _gu(ctx.ell))
    return delta == _gu(2) and gamma == _g(2)


def _ordered(f1: Factor, f2: Factor) -> Tuple[Factor, Factor]:
    return (f1, f2) if f1 <= f2 else (f2, f1)


def conflicts(ctx: LatticeContext, f1: Factor, f2: Factor) -> bool:
    return not dc1_pair(ctx, *_ordered(f1, f2))


def dc_level1(ctx: LatticeContext, m: Monomial) -> bool:
    _require_real(m)
    return all(dc1_pair(ctx, left, right) for left, right in combinations(m.factors, 2))


def dc_level1_freq(ctx: LatticeContext, m: Monomial) -> bool:
    return not clique_violations(ctx, m, 1, 1)


def dc_level2_freq(ctx: LatticeContext, m: Monomial) -> bool:
    return not clique_violations(ctx, m, 2, 1)


def _sets(ctx: LatticeContext) -> Dict[str, FrozenSet[Color]]:
    ell = ctx.ell
    pos = frozenset(ctx.positives())
    neg = frozenset(ctx.negatives())
    return {
        "P": pos,
        "N": neg,
        "S1": (neg - {_gu(2)}) | pos,
        "S2": neg | (pos - {_g(2)}),
        "T": frozenset({_gu(ell)}) | (pos - {_g(ell)}),
    }


def level1_bounds(ctx: LatticeContext, i: int) -> List[Bound]:
    s = _sets(ctx)
    ell = ctx.ell
    if i == 0:
        return [Bound("S1", s["S1"], 1), Bound("S2", s["S2"], 1)]
    if i == ell - 1:
        return [Bound("T", s["T"], 0), Bound("P", s["P"], 1), Bound("S2", s["S2"], 1)]
    if i == ell:
        return [Bound("P", s["P"], 0), Bound("T", s["T"], 1), Bound("S2", s["S2"], 1)]
    if i == 1:
        return [Bound("S1", s["S1"], 0), Bound("S2", s["S2"], 0)]
    raise UnsupportedWeight(f"L{i} is not a level-1 weight for rank {ell}")


def level2_bounds(ctx: LatticeContext, spec: WeightSpec) -> List[Bound]:
    s = _sets(ctx)
    ell = ctx.ell
    if spec.kind == "sum":
        k = spec.k_coefficients(ell)
        k0, k_minus, k_top = k[0], k[ell - 1], k[ell]
        return [
            Bound("1", s["P"] - {_g(ell)}, k0),
            Bound("2", s["P"], k0 + k_minus),
            Bound("3", s["T"], k0 + k_top),
            Bound("4", s["S1"], k0 + k_minus + k_top),
            Bound("5", s["S2"], k0 + k_minus + k_top),
        ]
    if spec.kind == "fundamental":
        j = spec.indices[0]
        pos = s["P"]

        def under(lo: int) -> FrozenSet[Color]:
            return frozenset(_gu(i) for i in range(lo, ell + 1))

        bounds = [
            Bound("1", frozenset(_g(i) for i in range(2, j + 1)), 0),
            Bound("2", frozenset(_g(i) for i in range(2, j + 2)), 1),
            Bound("3", pos, 1),
            Bound("4", s["T"], 1),
            Bound("5", under(j + 2) | pos, 1),
            Bound("6", under(j + 1) | (pos - {_g(j + 1)}), 1),
        ]
        for m in range(2, j + 1):
            bounds.append(Bound(f"7[m={m}]", under(m + 1) | pos, 2))
            bounds.append(Bound(f"8[m={m}]", under(m) | (pos - {_g(m)}), 2))
        return bounds
    raise UnsupportedWeight(f"{spec.label} is not a level-2 weight")


def _depth_one(m: Monomial) -> Counter:
    return Counter(f.color for f in m.factors if f.depth == 1)


def _within(bounds: List[Bound], counts: Counter) -> bool:
    return all(sum(counts[c] for c in b.colors) <= b.limit for b in bounds)


def ic_level1(ctx: LatticeContext, m: Monomial, spec: WeightSpec) -> bool:
    if spec.kind != "level1":
        raise UnsupportedWeight(f"{spec.label} is not a level-1 weight")
    return _within(level1_bounds(ctx, spec.indices[0]), _depth_one(m))


def ic_level2(ctx: LatticeContext, m: Monomial, spec: WeightSpec) -> bool:
    return _within(level2_bounds(ctx, spec), _depth_one(m))


def attach_imaginary(ctx: LatticeContext, spec: WeightSpec) -> Monomial:
    ell = ctx.ell

    def level1(i: int) -> List[Factor]:
        if i == 0:
            return []
        if i == ell - 1:
            return [Factor(_gu(ell), 0)]
        if i == ell:
            return [Factor(_g(ell), 0)]
        if i == 1:
            return [Factor(_gu(2), 0), Factor(_g(2), 0)]
        raise UnsupportedWeight(f"L{i} is not a level-1 weight for rank {ell}")

    if spec.kind == "level1":
        return normalize(level1(spec.indices[0]))
    if spec.kind == "sum":
        return normalize(level1(spec.indices[0]) + level1(spec.indices[1]))
    j = spec.indices[0]
    return normalize([Factor(_gu(j + 1), 0), Factor(_g(j + 1), 0)])


def encoded_conditions(ctx: LatticeContext, m: Monomial, spec: WeightSpec) -> bool:
    """DC and IC together, read off the frequency cliques from window 0 after adding imaginary factors."""
    padded = normalize(m.factors + attach_imaginary(ctx, spec).factors)
    return not clique_violations(ctx, padded, spec.level, 0)


def admissible(ctx: LatticeContext, m: Monomial, spec: WeightSpec) -> bool:
    _require_real(m)
    if spec.kind == "level1":
        return dc_level1(ctx, m) and ic_level1(ctx, m, spec)
    return dc_level2_freq(ctx, m) and ic_level2(ctx, m, spec)


def _conflict_graph(ctx: LatticeContext, factors: Tuple[Factor, ...]) -> Dict[int, List[int]]:
    graph: Dict[int, List[int]] = {i: [] for i in range(len(factors))}
    for a, b in combinations(range(len(factors)), 2):
        if conflicts(ctx, factors[a], factors[b]):
            graph[a].append(b)
            graph[b].append(a)
    return graph


def has_conflict_triangle(ctx: LatticeContext, m: Monomial) -> bool:
    graph = _conflict_graph(ctx, m.factors)
    for a, b, c in combinations(range(len(m.factors)), 3):
        if b in graph[a] and c in graph[a] and c in graph[b]:
            return True
    return False


@dataclass(frozen=True)
class ExceptionalBlock:
    pattern: int  # 1: d(-j-1) d~(-j) d(-j); 2: d~(-j-1) d(-j-1) d~(-j)
    index: int
    depth: int  # j

    @property
    def pair_depth(self) -> int:
        """Depth of the same-depth opposite pair inside the block."""
        return self.depth if self.pattern == 1 else self.depth + 1


def exceptional_blocks(ctx: LatticeContext, m: Monomial) -> List[ExceptionalBlock]:
    present = set((f.color, f.depth) for f in m.factors)
    blocks = []
    for s in range(3, ctx.ell):
        for j in sorted({f.depth for f in m.factors}):
            if {(_g(s), j + 1), (_gu(s), j), (_g(s), j)} <= present:
                blocks.append(ExceptionalBlock(1, s, j))
            if {(_gu(s), j + 1), (_g(s), j + 1), (_gu(s), j)} <= present:
                blocks.append(ExceptionalBlock(2, s, j))
    return blocks


def _greedy_split(ctx: LatticeContext, factors: Tuple[Factor, ...]) -> List[int]:
    sides: List[int] = []
    parts: Tuple[List[Factor], List[Factor]] = ([], [])
    for pos, f in enumerate(reversed(factors)):
        side = 0 if pos == 0 else 1 - sides[-1]
        if any(conflicts(ctx, f, g) for g in parts[side]):
            side = 1 - side
        sides.append(side)
        parts[side].append(f)
    return list(reversed(sides))


def _two_coloring(ctx: LatticeContext, factors: Tuple[Factor, ...]) -> Optional[List[int]]:
    graph = _conflict_graph(ctx, factors)
    colour: Dict[int, int] = {}
    for start in reversed(range(len(factors))):
        if start in colour:
            continue
        colour[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in graph[v]:
                if w not in colour:
                    colour[w] = 1 - colour[v]
                    queue.append(w)
                elif colour[w] == colour[v]:
                    return None
    return [colour[i] for i in range(len(factors))]


def _parts(factors: Tuple[Factor, ...], sides: List[int]) -> Tuple[Monomial, Monomial]:
    first = tuple(f for f, s in zip(factors, sides) if s == 0)
    second = tuple(f for f, s in zip(factors, sides) if s == 1)
    return Monomial(first), Monomial(second)


def split_level2(ctx: LatticeContext, m: Monomial) -> Optional[Tuple[Monomial, Monomial]]:
    """Two level-1 DC parts: right-to-left alternation, switching side on a conflict;
    falls back to an exact 2-coloring of the conflict graph."""
    if not dc_level2_freq(ctx, m):
        raise InvalidInput(f"'{m}' does not satisfy the level-2 difference conditions")
    if not m.factors:
        return (Monomial(), Monomial())
    first, second = _parts(m.factors, _greedy_split(ctx, m.factors))
    if dc_level1(ctx, first) and dc_level1(ctx, second):
        return first, second
    log.debug("greedy split failed for '%s', trying 2-coloring", m)
    sides = _two_coloring(ctx, m.factors)
    if sides is None:
        return None
    return _parts(m.factors, sides)


def split_ic(ctx: LatticeContext, m: Monomial, first: WeightSpec, second: WeightSpec) -> Optional[Tuple[Monomial, Monomial]]:
    ones = tuple(f for f in m.factors if f.depth == 1)
    for mask in range(1 << len(ones)):
        sides = [(mask >> k) & 1 for k in range(len(ones))]
        a, b = _parts(ones, sides)
        if ic_level1(ctx, a, first) and ic_level1(ctx, b, second):
            return a, b
    return None


def two_colorings(ctx: LatticeContext, m: Monomial) -> List[Tuple[Monomial, Monomial]]:
    """Every split of m into two parts without a conflicting pair, both slot orders."""
    graph = _conflict_graph(ctx, m.factors)
    colour: Dict[int, int] = {}
    components: List[List[int]] = []
    for start in reversed(range(len(m.factors))):
        if start in colour:
            continue
        colour[start] = 0
        members = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in graph[v]:
                if w not in colour:
                    colour[w] = 1 - colour[v]
                    members.append(w)
                    queue.append(w)
                elif colour[w] == colour[v]:
                    return []
        components.append(members)
    splits = []
    seen = set()
    for flips in range(1 << len(components)):
        sides = [0] * len(m.factors)
        for k, members in enumerate(components):
            for v in members:
                sides[v] = colour[v] ^ ((flips >> k) & 1)
        parts = _parts(m.factors, sides)
        if parts not in seen:
            seen.add(parts)
            splits.append(parts)
    return splits
