import re
from collections import Counter
from dataclasses import dataclass
from functools import cmp_to_key, total_ordering
from typing import Dict, Iterable, List, Optional, Tuple

from fsbasis.errors import InvalidInput
from fsbasis.lattice import Color, LatticeContext, Weight, add, parse_color

FACTOR_RE = re.compile(r'^(g~?\d+)\((-?\d+)\)$')


@total_ordering
@dataclass(frozen=True)
class Factor:
    """x_color(-depth); depth 0 only for imaginary factors."""

    color: Color
    depth: int

    @property
    def key(self) -> Tuple[int, Tuple[int, int]]:
        return (-self.depth, self.color.key)

    def __lt__(self, other: "Factor") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return f"{self.color}({-self.depth})"


@dataclass(frozen=True)
class Monomial:
    # ascending left to right: the rightmost factor is the greatest
    factors: Tuple[Factor, ...] = ()

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __bool__(self) -> bool:
        return bool(self.factors)

    def __str__(self) -> str:
        return format_monomial(self)

    @property
    def degree(self) -> int:
        return -sum(f.depth for f in self.factors)

    @property
    def max_depth(self) -> int:
        return max((f.depth for f in self.factors), default=0)

    def rightmost(self) -> Optional[Factor]:
        return self.factors[-1] if self.factors else None

    def at_depth(self, depth: int) -> List[Factor]:
        return [f for f in self.factors if f.depth == depth]

    def has_imaginary(self) -> bool:
        return any(f.depth == 0 for f in self.factors)


EMPTY = Monomial(())


def normalize(factors: Iterable[Factor]) -> Monomial:
    items = list(factors)
    for f in items:
        if f.depth < 0:
            raise InvalidInput(f"negative depth in factor {f}")
    return Monomial(tuple(sorted(items)))


def shape(m: Monomial) -> Dict[int, int]:
    return dict(sorted(Counter(f.depth for f in m.factors).items()))


def weight(ctx: LatticeContext, m: Monomial) -> Weight:
    total = ctx.zero()
    for f in m.factors:
        total = add(total, ctx.root_of(f.color))
    return total


def compare(m1: Monomial, m2: Monomial) -> int:
    """-1, 0, 1: shapes first, then colors from right to left."""
    s1, s2 = shape(m1), shape(m2)
    for depth in sorted(set(s1) | set(s2)):
        c1, c2 = s1.get(depth, 0), s2.get(depth, 0)
        if c1 != c2:
            return -1 if c1 < c2 else 1
    for f1, f2 in zip(reversed(m1.factors), reversed(m2.factors)):
        if f1.color != f2.color:
            return -1 if f1.color < f2.color else 1
    return 0


monomial_sort_key = cmp_to_key(compare)


def multiply(m1: Monomial, m2: Monomial) -> Monomial:
    return normalize(m1.factors + m2.factors)


def shift(m: Monomial, n: int) -> Monomial:
    if n < 0:
        raise InvalidInput(f"shift by negative amount {n}")
    return Monomial(tuple(Factor(f.color, f.depth + n) for f in m.factors))


def lift(m: Monomial, n: int) -> Monomial:
    """Inverse of shift; every depth must stay >= 1."""
    if any(f.depth - n < 1 for f in m.factors):
        raise InvalidInput(f"cannot lift {format_monomial(m)} by {n}")
    return Monomial(tuple(Factor(f.color, f.depth - n) for f in m.factors))


def split_at_depth(m: Monomial, k: int) -> Tuple[Monomial, Monomial]:
    shallow = tuple(f for f in m.factors if f.depth <= k)
    deep = tuple(f for f in m.factors if f.depth > k)
    return Monomial(shallow), Monomial(deep)


def successive_run(m: Monomial) -> Tuple[Factor, ...]:
    """Factors from the rightmost one while each next depth holds exactly one factor."""
    counts = shape(m)
    if not m.factors:
        return ()
    depth = m.factors[-1].depth
    run = []
    while counts.get(depth, 0) == 1:
        run.append(m.at_depth(depth)[0])
        depth += 1
    return tuple(run)


def parse_factor(text: str, ell: Optional[int] = None) -> Factor:
    match = FACTOR_RE.match(text.strip())
    if not match:
        raise InvalidInput(f"bad factor '{text}'")
    mode = int(match.group(2))
    if mode > 0:
        raise InvalidInput(f"factor '{text}' has a positive mode")
    return Factor(parse_color(match.group(1), ell), -mode)


def parse_monomial(text: str, ell: Optional[int] = None) -> Monomial:
    return normalize(parse_factor(tok, ell) for tok in text.split())


def format_monomial(m: Monomial) -> str:
    return " ".join(str(f) for f in m.factors)
