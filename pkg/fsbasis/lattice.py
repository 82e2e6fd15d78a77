"""Root system D_l: weights in the epsilon basis, the color set and level-1/2 weight labels."""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from itertools import combinations
from typing import Iterable, List, Literal, Optional, Tuple

from fsbasis.errors import InvalidInput, RankOutOfRange, UnsupportedWeight

Weight = Tuple[Fraction, ...]

HALF = Fraction(1, 2)


def vec(values: Iterable) -> Weight:
    return tuple(Fraction(v) for v in values)


def zero(ell: int) -> Weight:
    return (Fraction(0),) * ell


def unit(ell: int, i: int) -> Weight:
    """epsilon_i, 1-based."""
    return tuple(Fraction(1) if k == i - 1 else Fraction(0) for k in range(ell))


def add(x: Weight, y: Weight) -> Weight:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Weight, y: Weight) -> Weight:
    return tuple(a - b for a, b in zip(x, y))


def scale(c, x: Weight) -> Weight:
    c = Fraction(c)
    return tuple(c * a for a in x)


def pairing(x: Weight, y: Weight) -> Fraction:
    if len(x) != len(y):
        raise InvalidInput(f"pairing of weights of different rank {len(x)} and {len(y)}")
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def is_integral(x: Weight) -> bool:
    return all(a.denominator == 1 for a in x)


def is_half_integral(x: Weight) -> bool:
    return all(a.denominator == 2 for a in x)


def in_root_lattice(x: Weight) -> bool:
    return is_integral(x) and sum(x) % 2 == 0


def in_weight_lattice(x: Weight) -> bool:
    return is_integral(x) or is_half_integral(x)


def format_weight(x: Weight) -> str:
    return " ".join(str(a) for a in x)


@total_ordering
@dataclass(frozen=True)
class Color:
    """gamma_i = e1 + ei (sign +1) or gamma_i underlined = e1 - ei (sign -1)."""

    index: int
    sign: int

    @property
    def positive(self) -> bool:
        return self.sign > 0

    @property
    def key(self) -> Tuple[int, int]:
        if self.sign > 0:
            return (1, -self.index)
        return (0, self.index)

    @property
    def opposite(self) -> "Color":
        return Color(self.index, -self.sign)

    def __lt__(self, other: "Color") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return f"g{self.index}" if self.sign > 0 else f"g~{self.index}"


COLOR_RE = re.compile(r'^g(~?)(\d+)$')


def parse_color(text: str, ell: Optional[int] = None) -> Color:
    match = COLOR_RE.match(text.strip())
    if not match:
        raise InvalidInput(f"bad color '{text}'")
    index = int(match.group(2))
    if index < 2 or (ell is not None and index > ell):
        raise InvalidInput(f"color index out of range in '{text}'")
    return Color(index, -1 if match.group(1) else 1)


@dataclass(frozen=True)
class LatticeContext:
    ell: int
    simple_roots: Tuple[Weight, ...]
    fundamental_weights: Tuple[Weight, ...]
    theta: Weight
    gamma_set: Tuple[Color, ...]

    @property
    def omega(self) -> Weight:
        return self.fundamental_weights[1]

    @property
    def spinor_indices(self) -> Tuple[int, int]:
        return (self.ell - 1, self.ell)

    @property
    def level1_indices(self) -> Tuple[int, ...]:
        return (0, 1, self.ell - 1, self.ell)

    def zero(self) -> Weight:
        return zero(self.ell)

    def root_of(self, color: Color) -> Weight:
        return add(unit(self.ell, 1), scale(color.sign, unit(self.ell, color.index)))

    def positives(self) -> Tuple[Color, ...]:
        return tuple(c for c in self.gamma_set if c.positive)

    def negatives(self) -> Tuple[Color, ...]:
        return tuple(c for c in self.gamma_set if not c.positive)

    def spinor_weight(self, sigma: Iterable[int]) -> Weight:
        members = set(sigma)
        if any(i < 1 or i > self.ell for i in members):
            raise InvalidInput(f"spinor label {sorted(members)} outside 1..{self.ell}")
        return tuple(HALF if i in members else -HALF for i in range(1, self.ell + 1))

    def coset_class(self, lam: Weight) -> int:
        """Index i in {0, 1, l-1, l} with lam in Q + omega_i."""
        if is_integral(lam):
            return 0 if sum(lam) % 2 == 0 else 1
        if not is_half_integral(lam):
            raise InvalidInput(f"weight ({format_weight(lam)}) is not in P")
        rest = sub(lam, self.fundamental_weights[self.ell])
        return self.ell if sum(rest) % 2 == 0 else self.ell - 1

    def all_roots(self) -> List[Weight]:
        roots = []
        for i, j in combinations(range(1, self.ell + 1), 2):
            for si in (1, -1):
                for sj in (1, -1):
                    roots.append(add(scale(si, unit(self.ell, i)), scale(sj, unit(self.ell, j))))
        return roots

    def positive_roots(self) -> List[Weight]:
        roots = []
        for i, j in combinations(range(1, self.ell + 1), 2):
            roots.append(sub(unit(self.ell, i), unit(self.ell, j)))
            roots.append(add(unit(self.ell, i), unit(self.ell, j)))
        return roots

    def rho(self) -> Weight:
        return vec(self.ell - k for k in range(1, self.ell + 1))

    def dynkin_labels(self, lam: Weight) -> Tuple[Fraction, ...]:
        return tuple(pairing(lam, a) for a in self.simple_roots)

    def is_dominant(self, lam: Weight) -> bool:
        return all(c >= 0 and c.denominator == 1 for c in self.dynkin_labels(lam))

    def weyl_dimension(self, lam: Weight) -> int:
        shifted = add(lam, self.rho())
        num, den = Fraction(1), Fraction(1)
        for alpha in self.positive_roots():
            num *= pairing(shifted, alpha)
            den *= pairing(self.rho(), alpha)
        dim = num / den
        if dim.denominator != 1:
            raise InvalidInput(f"weight ({format_weight(lam)}) is not integral dominant")
        return int(dim)

    def dominant_label(self, lam: Weight) -> str:
        """'w3+w4', '2w4', '0' from Dynkin labels."""
        parts = []
        for i, c in enumerate(self.dynkin_labels(lam), start=1):
            if c == 0:
                continue
            parts.append(f"w{i}" if c == 1 else f"{c}w{i}")
        return "+".join(parts) or "0"


@lru_cache(maxsize=None)
def build_context(ell: int) -> LatticeContext:
    if ell < 4:
        raise RankOutOfRange(f"rank {ell} out of range: D_l needs l >= 4")
    simple = [sub(unit(ell, i), unit(ell, i + 1)) for i in range(1, ell)]
    simple.append(add(unit(ell, ell - 1), unit(ell, ell)))
    fundamentals = [zero(ell)]
    for i in range(1, ell - 1):
        fundamentals.append(vec(1 if k < i else 0 for k in range(ell)))
    fundamentals.append(vec([HALF] * (ell - 1) + [-HALF]))
    fundamentals.append(vec([HALF] * ell))
    gammas = [Color(i, 1) for i in range(2, ell + 1)] + [Color(i, -1) for i in range(ell, 1, -1)]
    theta = add(unit(ell, 1), unit(ell, 2))
    return LatticeContext(
        ell=ell,
        simple_roots=tuple(simple),
        fundamental_weights=tuple(fundamentals),
        theta=theta,
        gamma_set=tuple(gammas),
    )


@dataclass(frozen=True)
class WeightSpec:
    """A dominant weight of level 1 (Lambda_i, i in 0, 1, l-1, l) or level 2 (sum or Lambda_j)."""

    kind: Literal["level1", "sum", "fundamental"]
    indices: Tuple[int, ...]

    @staticmethod
    def level1(i: int) -> "WeightSpec":
        return WeightSpec("level1", (i,))

    @staticmethod
    def pair(i: int, j: int) -> "WeightSpec":
        return WeightSpec("sum", tuple(sorted((i, j))))

    @staticmethod
    def fundamental(j: int) -> "WeightSpec":
        return WeightSpec("fundamental", (j,))

    @property
    def level(self) -> int:
        return 1 if self.kind == "level1" else 2

    @property
    def label(self) -> str:
        return "+".join(f"L{i}" for i in self.indices)

    def components(self) -> Tuple["WeightSpec", ...]:
        if self.kind != "sum":
            raise UnsupportedWeight(f"{self.label} is not a sum of level-1 weights")
        return tuple(WeightSpec.level1(i) for i in self.indices)

    def k_coefficients(self, ell: int) -> Tuple[int, ...]:
        k = [0] * (ell + 1)
        for i in self.indices:
            k[i] += 1
        return tuple(k)

    def validate(self, ell: int) -> "WeightSpec":
        allowed = (0, 1, ell - 1, ell)
        if self.kind in ("level1", "sum"):
            if any(i not in allowed for i in self.indices):
                raise UnsupportedWeight(f"{self.label} is not built from level-1 weights for rank {ell}")
        elif not 2 <= self.indices[0] <= ell - 2:
            raise UnsupportedWeight(f"{self.label} is not a level-2 fundamental weight for rank {ell}")
        return self

    def __str__(self) -> str:
        return self.label


WEIGHT_RE = re.compile(r'^(?:2L(\d+)|L(\d+)(?:\+L(\d+))?)$')


def parse_weight(text: str, ell: int) -> WeightSpec:
    match = WEIGHT_RE.match(text.replace(" ", ""))
    if not match:
        raise InvalidInput(f"bad weight spec '{text}'")
    double, first, second = match.groups()
    if double is not None:
        spec = WeightSpec.pair(int(double), int(double))
    elif second is not None:
        spec = WeightSpec.pair(int(first), int(second))
    else:
        i = int(first)
        if i > ell:
            raise InvalidInput(f"weight index {i} exceeds rank {ell}")
        spec = WeightSpec.level1(i) if i in (0, 1, ell - 1, ell) else WeightSpec.fundamental(i)
    return spec.validate(ell)


def level1_weights(ell: int) -> List[WeightSpec]:
    return [WeightSpec.level1(i) for i in (0, 1, ell - 1, ell)]


def level2_weights(ell: int) -> List[WeightSpec]:
    idx = (0, 1, ell - 1, ell)
    specs = [WeightSpec.pair(a, b) for n, a in enumerate(idx) for b in idx[n:]]
    specs.extend(WeightSpec.fundamental(j) for j in range(2, ell - 1))
    return specs


def hw_weight(ctx: LatticeContext, spec: WeightSpec) -> Weight:
    """Lattice weight of v_Lambda; for a sum, the total of both slots."""
    if spec.kind == "level1":
        return ctx.fundamental_weights[spec.indices[0]]
    if spec.kind == "sum":
        return add(ctx.fundamental_weights[spec.indices[0]], ctx.fundamental_weights[spec.indices[1]])
    return ctx.fundamental_weights[spec.indices[0]]

