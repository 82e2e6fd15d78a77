import logging
from collections import Counter
from itertools import combinations_with_replacement
from typing import Dict, Iterator, List, Tuple

from fsbasis.conditions import admissible, cliques, ic_level1, ic_level2
from fsbasis.errors import UnsupportedWeight
from fsbasis.lattice import Color, LatticeContext, WeightSpec, format_weight
from fsbasis.monomial import Factor, Monomial, monomial_sort_key, normalize, weight
from fsbasis.schemas import CharacterRow

log = logging.getLogger(__name__)


def check_supported(ctx: LatticeContext, spec: WeightSpec, enumeration: bool = False) -> None:
    spec.validate(ctx.ell)
    if spec.level == 2 and ctx.ell != 4 and not (enumeration and spec.kind == "sum"):
        raise UnsupportedWeight("level-2 verification requires rank 4")


def _window_ok(ctx: LatticeContext, upper: Counter, lower: Counter, bound: int) -> bool:
    if not upper and not lower:
        return True
    for clique in cliques(ctx.ell):
        if sum(upper[c] for c in clique.upper) + sum(lower[c] for c in clique.lower) > bound:
            return False
    return True


def _initial_ok(ctx: LatticeContext, spec: WeightSpec, colors: Tuple[Color, ...]) -> bool:
    m = normalize(Factor(c, 1) for c in colors)
    if spec.kind == "level1":
        return ic_level1(ctx, m, spec)
    return ic_level2(ctx, m, spec)


def enumerate_admissible(ctx: LatticeContext, spec: WeightSpec, n: int) -> List[Monomial]:
    """Admissible monomials of degree -n, ascending; built depth by depth with window pruning."""
    check_supported(ctx, spec, enumeration=True)
    bound = spec.level
    empty: Counter = Counter()
    found: List[Monomial] = []

    def extend(depth: int, remaining: int, picked: List[Factor], previous: Counter) -> None:
        if remaining == 0:
            m = normalize(picked)
            if admissible(ctx, m, spec):
                found.append(m)
            return
        if depth > remaining:
            return
        for size in range(min(2 * bound, remaining // depth) + 1):
            for colors in combinations_with_replacement(ctx.gamma_set, size):
                here = Counter(colors)
                if not _window_ok(ctx, here, previous, bound):
                    continue
                if not _window_ok(ctx, empty, here, bound):
                    continue
                if depth == 1 and not _initial_ok(ctx, spec, colors):
                    continue
                extend(depth + 1, remaining - depth * size, picked + [Factor(c, depth) for c in colors], here)

    extend(1, n, [], empty)
    found.sort(key=monomial_sort_key)
    return found


def colored_partitions(ctx: LatticeContext, n: int) -> Iterator[Monomial]:
    """Every monomial of degree -n, admissible or not."""
    factors = [Factor(c, d) for d in range(n, 0, -1) for c in ctx.gamma_set]

    def extend(start: int, remaining: int, picked: List[Factor]) -> Iterator[Monomial]:
        if remaining == 0:
            yield normalize(picked)
            return
        for k in range(start, len(factors)):
            f = factors[k]
            if f.depth <= remaining:
                yield from extend(k, remaining - f.depth, picked + [f])

    yield from extend(0, n, [])


def graded_dimensions(ctx: LatticeContext, spec: WeightSpec, n_max: int, refine: bool = False) -> List[CharacterRow]:
    rows: List[CharacterRow] = []
    for n in range(n_max + 1):
        monomials = enumerate_admissible(ctx, spec, n)
        log.debug("%s degree %d: %d admissible", spec.label, n, len(monomials))
        if not refine:
            rows.append(CharacterRow(degree=n, weight=None, count=len(monomials)))
            continue
        by_weight: Dict[tuple, int] = Counter(weight(ctx, m) for m in monomials)
        for w in sorted(by_weight):
            rows.append(CharacterRow(degree=n, weight=format_weight(w), count=by_weight[w]))
    return rows


def character_csv(rows: List[CharacterRow]) -> str:
    lines = ["degree,weight,count"]
    for row in rows:
        cell = f'"{row.weight}"' if row.weight is not None else ""
        lines.append(f"{row.degree},{cell},{row.count}")
    return "\n".join(lines) + "\n"
