"""Lattice vertex operator construction on V_P = M(1) (x) C[P].

Basis vectors are a Heisenberg monomial (creation modes per epsilon direction) times a lattice
point. Operators are computed exactly: for a fixed output grade only finitely many terms of
E^-(-a, z) E^+(-a, z) e_a z^a contribute, so no truncation is involved.

Grading: deg(u (x) e^lam) = -(sum of modes) - <lam, lam>/2, and deg(x_a(m) v) = deg(v) + m.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial, floor, isqrt
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from fsbasis.errors import InternalError, UnsupportedWeight
from fsbasis.lattice import HALF, LatticeContext, Weight, WeightSpec, add, format_weight, pairing
from fsbasis.linalg import rank, solve_gf2

log = logging.getLogger(__name__)

Modes = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True, order=True)
class FockBasisElement:
    modes: Modes  # per direction, sorted descending
    lattice: Weight

    @property
    def degree(self) -> Fraction:
        total = sum(sum(d) for d in self.modes)
        return -total - pairing(self.lattice, self.lattice) / 2

    def __str__(self) -> str:
        parts = []
        for i, direction in enumerate(self.modes, start=1):
            parts.extend(f"e{i}(-{n})" for n in direction)
        parts.append(f"e^({format_weight(self.lattice)})")
        return " ".join(parts)


def pure(lam: Weight) -> FockBasisElement:
    return FockBasisElement(tuple(() for _ in lam), lam)


def _with_modes(counts: Dict[Tuple[int, int], int], ell: int, lattice: Weight) -> FockBasisElement:
    directions = []
    for i in range(ell):
        modes = []
        for (d, n), k in counts.items():
            if d == i:
                modes.extend([n] * k)
        directions.append(tuple(sorted(modes, reverse=True)))
    return FockBasisElement(tuple(directions), lattice)


def _mode_counts(elem: FockBasisElement) -> Dict[Tuple[int, int], int]:
    counts: Dict[Tuple[int, int], int] = {}
    for i, direction in enumerate(elem.modes):
        for n in direction:
            counts[(i, n)] = counts.get((i, n), 0) + 1
    return counts


@dataclass(frozen=True)
class FockVector:
    terms: Dict[FockBasisElement, Fraction] = field(default_factory=dict)

    @staticmethod
    def of(elem: FockBasisElement, coeff=1) -> "FockVector":
        return FockVector({elem: Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FockVector") -> "FockVector":
        return FockVector(_accumulate(list(self.terms.items()) + list(other.terms.items())))

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scaled(-1)

    def scaled(self, c) -> "FockVector":
        c = Fraction(c)
        if c == 0:
            return FockVector()
        return FockVector({k: v * c for k, v in self.terms.items()})

    def support(self) -> List[FockBasisElement]:
        return sorted(self.terms)

    def __len__(self) -> int:
        return len(self.terms)


def _accumulate(items: Iterable[Tuple[FockBasisElement, Fraction]]) -> Dict[FockBasisElement, Fraction]:
    out: Dict[FockBasisElement, Fraction] = {}
    for k, v in items:
        total = out.get(k, Fraction(0)) + v
        if total:
            out[k] = total
        else:
            out.pop(k, None)
    return out


def proportional(u: FockVector, v: FockVector) -> bool:
    """Both nonzero and spanning a line."""
    if u.is_zero() or v.is_zero():
        return False
    return rank([u.terms, v.terms]) == 1


@dataclass(frozen=True)
class Cocycle:
    """Bimultiplicative sign on P, (-1)^(sum_{p<q} E[p][q] x_p y_q) in the basis (e_1..e_{l-1}, w_l)."""

    ell: int
    table: Tuple[Tuple[int, ...], ...]

    def coords(self, lam: Weight) -> Tuple[int, ...]:
        last = lam[-1]
        t = 2 * last
        cs = [lam[i] - last for i in range(self.ell - 1)]
        out = tuple(int(c) % 2 for c in cs) + (int(t) % 2,)
        return out

    def sign(self, x: Weight, y: Weight) -> int:
        cx, cy = self.coords(x), self.coords(y)
        total = 0
        for p in range(self.ell):
            if not cx[p]:
                continue
            for q in range(p + 1, self.ell):
                if self.table[p][q] and cy[q]:
                    total += 1
        return -1 if total % 2 else 1


def build_cocycle(ctx: LatticeContext, free_value: int = 0) -> Cocycle:
    """Solve the commutator constraints on simple-root pairs over GF(2)."""
    ell = ctx.ell
    unknowns = [(p, q) for p in range(ell) for q in range(p + 1, ell)]
    blank = Cocycle(ell, tuple(tuple(0 for _ in range(ell)) for _ in range(ell)))
    simple = [blank.coords(a) for a in ctx.simple_roots]
    rows, rhs = [], []
    for i in range(ell):
        for j in range(i + 1, ell):
            a, b = simple[i], simple[j]
            rows.append([(a[p] * b[q] + a[q] * b[p]) % 2 for p, q in unknowns])
            rhs.append(int(pairing(ctx.simple_roots[i], ctx.simple_roots[j])) % 2)
    solution = solve_gf2(rows, rhs, len(unknowns), free_value)
    table = [[0] * ell for _ in range(ell)]
    for (p, q), bit in zip(unknowns, solution):
        table[p][q] = bit
    cocycle = Cocycle(ell, tuple(tuple(r) for r in table))
    for a in ctx.simple_roots:
        for b in ctx.simple_roots:
            expected = -1 if int(pairing(a, b)) % 2 else 1
            if cocycle.sign(a, b) * cocycle.sign(b, a) != expected:
                raise InternalError("cocycle table violates the commutator constraint")
    log.debug("cocycle for rank %d solved (free bits = %d)", ell, free_value)
    return cocycle


@lru_cache(maxsize=None)
def _partitions(q: int, largest: Optional[int] = None) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """Partitions of q as ((part, multiplicity), ...)."""
    if largest is None:
        largest = q
    if q == 0:
        return ((),)
    out = []
    for part in range(min(q, largest), 0, -1):
        for mult in range(1, q // part + 1):
            for rest in _partitions(q - part * mult, part - 1):
                out.append(((part, mult),) + rest)
    return tuple(out)


def _spread(total: int, directions: List[Tuple[int, Fraction]]) -> Iterator[Tuple[Fraction, Tuple[int, ...]]]:
    """Multinomial expansion of (sum_i a_i x_i)^total: (coefficient, exponents)."""
    if len(directions) == 1:
        yield directions[0][1] ** total, (total,)
        return
    head, rest = directions[0], directions[1:]
    for c in range(total + 1):
        for coeff, tail in _spread(total - c, rest):
            yield comb(total, c) * head[1] ** c * coeff, (c,) + tail


@lru_cache(maxsize=None)
def _creation_terms(alpha: Weight, q: int) -> Tuple[Tuple[Fraction, Dict[Tuple[int, int], int]], ...]:
    """Coefficient of z^q in exp(sum_n alpha(-n) z^n / n), expanded over epsilon directions."""
    directions = [(i, a) for i, a in enumerate(alpha) if a != 0]
    out = []
    for partition in _partitions(q):
        pieces: List[List[Tuple[Fraction, Dict[Tuple[int, int], int]]]] = []
        for part, mult in partition:
            base = Fraction(1, part ** mult * factorial(mult))
            choices = []
            for coeff, exps in _spread(mult, directions):
                added = {(directions[k][0], part): e for k, e in enumerate(exps) if e}
                choices.append((base * coeff, added))
            pieces.append(choices)
        for combo in product(*pieces):
            coeff = Fraction(1)
            added: Dict[Tuple[int, int], int] = {}
            for c, a in combo:
                coeff *= c
                for key, e in a.items():
                    added[key] = added.get(key, 0) + e
            out.append((coeff, added))
    return tuple(out)


@lru_cache(maxsize=None)
def act_on_basis(cocycle: Cocycle, alpha: Weight, m: int, elem: FockBasisElement) -> Tuple[Tuple[FockBasisElement, Fraction], ...]:
    ell = cocycle.ell
    nu = elem.lattice
    s = pairing(alpha, nu)
    if s.denominator != 1:
        raise InternalError(f"non-integral pairing between root and ({format_weight(nu)})")
    s = int(s)
    sign = cocycle.sign(alpha, nu)
    target = add(nu, alpha)
    counts = _mode_counts(elem)
    touched = [(key, k) for key, k in sorted(counts.items()) if alpha[key[0]] != 0]
    results: Dict[FockBasisElement, Fraction] = {}
    for taken in product(*[range(k + 1) for _, k in touched]):
        p = 0
        coeff = Fraction(sign)
        remaining = dict(counts)
        for ((i, n), k), t in zip(touched, taken):
            if t:
                p += t * n
                coeff *= comb(k, t) * (-alpha[i]) ** t
                remaining[(i, n)] = k - t
        q = p - m - 1 - s
        if q < 0:
            continue
        for c, added in _creation_terms(alpha, q):
            merged = {key: v for key, v in remaining.items() if v}
            for key, e in added.items():
                merged[key] = merged.get(key, 0) + e
            out = _with_modes(merged, ell, target)
            results[out] = results.get(out, Fraction(0)) + coeff * c
    return tuple((k, v) for k, v in sorted(results.items()) if v)


def vertex_act(cocycle: Cocycle, alpha: Weight, m: int, v: FockVector) -> FockVector:
    """x_alpha(m) v: coefficient of z^(-m-1) in Y(e^alpha, z) v."""
    items = []
    for elem, c in v.terms.items():
        for out, d in act_on_basis(cocycle, alpha, m, elem):
            items.append((out, c * d))
    return FockVector(_accumulate(items))


def heisenberg_act(h: Weight, n: int, v: FockVector) -> FockVector:
    items = []
    for elem, c in v.terms.items():
        if n == 0:
            items.append((elem, c * pairing(h, elem.lattice)))
            continue
        counts = _mode_counts(elem)
        for i, hi in enumerate(h):
            if hi == 0:
                continue
            new = dict(counts)
            if n < 0:
                new[(i, -n)] = new.get((i, -n), 0) + 1
                items.append((_with_modes(new, len(h), elem.lattice), c * hi))
            else:
                k = counts.get((i, n), 0)
                if not k:
                    continue
                new[(i, n)] = k - 1
                new = {key: val for key, val in new.items() if val}
                items.append((_with_modes(new, len(h), elem.lattice), c * hi * n * k))
    return FockVector(_accumulate(items))


def e_lambda(cocycle: Cocycle, lam: Weight, v: FockVector) -> FockVector:
    """Simple current e(lam): e^nu -> eps(nu, lam) e^(nu + lam), modes untouched."""
    items = []
    for elem, c in v.terms.items():
        moved = FockBasisElement(elem.modes, add(elem.lattice, lam))
        items.append((moved, c * cocycle.sign(elem.lattice, lam)))
    return FockVector(_accumulate(items))


def hw_vector(ctx: LatticeContext, spec: WeightSpec) -> FockVector:
    if spec.kind != "level1":
        raise UnsupportedWeight(f"{spec.label} is not a level-1 weight")
    i = spec.indices[0]
    if i not in ctx.level1_indices:
        raise UnsupportedWeight(f"L{i} is not a level-1 weight for rank {ctx.ell}")
    return FockVector.of(pure(ctx.fundamental_weights[i]))


def _lattice_points(ctx: LatticeContext, coset: int, max_norm: Fraction) -> List[Weight]:
    """Points of Q + w_coset with <lam, lam>/2 <= max_norm."""
    bound = isqrt(int(floor(2 * max_norm))) + 1
    half = coset in (ctx.ell - 1, ctx.ell)
    values = [Fraction(k) + (HALF if half else 0) for k in range(-bound - 1, bound + 1)]
    values = [x for x in values if x * x <= 2 * max_norm]
    points = []

    def extend(prefix: List[Fraction], norm: Fraction) -> None:
        if norm / 2 > max_norm:
            return
        if len(prefix) == ctx.ell:
            lam = tuple(prefix)
            if ctx.coset_class(lam) == coset:
                points.append(lam)
            return
        for x in values:
            extend(prefix + [x], norm + x * x)

    extend([], Fraction(0))
    return sorted(points)


def _colored_mode_sets(ell: int, total: int) -> List[Dict[Tuple[int, int], int]]:
    slots = [(i, n) for n in range(total, 0, -1) for i in range(ell)]
    out = []

    def extend(start: int, remaining: int, counts: Dict[Tuple[int, int], int]) -> None:
        if remaining == 0:
            out.append(dict(counts))
            return
        for k in range(start, len(slots)):
            i, n = slots[k]
            if n <= remaining:
                counts[(i, n)] = counts.get((i, n), 0) + 1
                extend(k, remaining - n, counts)
                counts[(i, n)] -= 1
                if not counts[(i, n)]:
                    del counts[(i, n)]

    extend(0, total, {})
    return out


def graded_basis(ctx: LatticeContext, coset: int, degree) -> List[FockBasisElement]:
    """Basis of the grade `degree` piece of e^(w_coset) V_Q."""
    target = -Fraction(degree)
    if target < 0:
        return []
    basis = []
    for lam in _lattice_points(ctx, coset, target):
        rest = target - pairing(lam, lam) / 2
        if rest.denominator != 1:
            continue
        for counts in _colored_mode_sets(ctx.ell, int(rest)):
            basis.append(_with_modes(counts, ctx.ell, lam))
    return sorted(basis)


def lowest_grade(ctx: LatticeContext, coset: int) -> Fraction:
    w = ctx.fundamental_weights[coset]
    return pairing(w, w) / 2


def character_series(ctx: LatticeContext, coset: int, n_max: int) -> List[int]:
    """Dimensions of the graded pieces at -(h + k), k = 0..n_max, h the lowest grade."""
    h = lowest_grade(ctx, coset)
    return [len(graded_basis(ctx, coset, -(h + k))) for k in range(n_max + 1)]


def product_formula_series(ctx: LatticeContext, coset: int, n_max: int) -> List[int]:
    """Theta series of the coset divided by prod (1 - q^n)^l, as a coefficient list."""
    h = lowest_grade(ctx, coset)
    theta = Counter()
    for lam in _lattice_points(ctx, coset, h + n_max):
        theta[pairing(lam, lam) / 2 - h] += 1
    colored = [0] * (n_max + 1)
    colored[0] = 1
    for n in range(1, n_max + 1):
        for _ in range(ctx.ell):
            for k in range(n, n_max + 1):
                colored[k] += colored[k - n]
    series = []
    for k in range(n_max + 1):
        series.append(sum(count * colored[k - int(j)] for j, count in theta.items() if j.denominator == 1 and j <= k))
    return series
