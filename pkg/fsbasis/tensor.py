"""Tensor products of level-1 modules: diagonal action, level-2 highest weight vectors
and the decomposition of spinor (x) spinor top pieces."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from fsbasis.errors import InternalError, UnsupportedWeight
from fsbasis.fock import Cocycle, FockBasisElement, FockVector, act_on_basis, hw_vector, pure
from fsbasis.lattice import LatticeContext, Weight, WeightSpec, add
from fsbasis.linalg import kernel_dimension, nullspace
from fsbasis.schemas import DecompositionReport, DecompositionRow, HwvReport

log = logging.getLogger(__name__)

Pair = Tuple[FockBasisElement, FockBasisElement]


@dataclass(frozen=True)
class TensorVector:
    terms: Dict[Pair, Fraction] = field(default_factory=dict)

    @staticmethod
    def product(u: FockVector, v: FockVector) -> "TensorVector":
        terms = {}
        for a, c in u.terms.items():
            for b, d in v.terms.items():
                terms[(a, b)] = c * d
        return TensorVector(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TensorVector") -> "TensorVector":
        return TensorVector(_accumulate(list(self.terms.items()) + list(other.terms.items())))

    def scaled(self, c) -> "TensorVector":
        c = Fraction(c)
        if c == 0:
            return TensorVector()
        return TensorVector({k: v * c for k, v in self.terms.items()})

    def flat(self) -> Dict[Pair, Fraction]:
        return self.terms


def _accumulate(items: Iterable[Tuple[Pair, Fraction]]) -> Dict[Pair, Fraction]:
    out: Dict[Pair, Fraction] = {}
    for k, v in items:
        total = out.get(k, Fraction(0)) + v
        if total:
            out[k] = total
        else:
            out.pop(k, None)
    return out


def tensor_act(cocycle: Cocycle, alpha: Weight, m: int, v: TensorVector) -> TensorVector:
    """x_alpha(m) (x) 1 + 1 (x) x_alpha(m)."""
    items = []
    for (a, b), c in v.terms.items():
        for out, d in act_on_basis(cocycle, alpha, m, a):
            items.append(((out, b), c * d))
        for out, d in act_on_basis(cocycle, alpha, m, b):
            items.append(((a, out), c * d))
    return TensorVector(_accumulate(items))


def e_lambda_pair(cocycle: Cocycle, lam: Weight, v: TensorVector) -> TensorVector:
    """e(lam) (x) e(lam)."""
    items = []
    for (a, b), c in v.terms.items():
        a2 = FockBasisElement(a.modes, add(a.lattice, lam))
        b2 = FockBasisElement(b.modes, add(b.lattice, lam))
        items.append(((a2, b2), c * cocycle.sign(a.lattice, lam) * cocycle.sign(b.lattice, lam)))
    return TensorVector(_accumulate(items))


def sigma_of(lam: Weight) -> FrozenSet[int]:
    return frozenset(i for i, x in enumerate(lam, start=1) if x > 0)


def format_sigma(sigma: Iterable[int]) -> str:
    return "w_{" + "".join(str(i) for i in sorted(sigma)) + "}"


def format_pair(pair: Pair) -> str:
    return f"{format_sigma(sigma_of(pair[0].lattice))} (x) {format_sigma(sigma_of(pair[1].lattice))}"


def spinor_parity(ctx: LatticeContext, i: int) -> int:
    if i not in ctx.spinor_indices:
        raise UnsupportedWeight(f"L{i} is not a spinor weight for rank {ctx.ell}")
    return ctx.ell % 2 if i == ctx.ell else (ctx.ell - 1) % 2


def default_pair(ctx: LatticeContext, j: int) -> Tuple[int, int]:
    if (ctx.ell - j) % 2 == 0:
        return (ctx.ell, ctx.ell)
    return (ctx.ell - 1, ctx.ell)


def support_pairs(ctx: LatticeContext, j: int, pair: Tuple[int, int]) -> List[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """Basic vectors {1..j} u Psi1 (x) {1..j} u Psi2 with Psi1, Psi2 partitioning {j+1..l}."""
    head = frozenset(range(1, j + 1))
    tail = list(range(j + 1, ctx.ell + 1))
    p1, p2 = spinor_parity(ctx, pair[0]), spinor_parity(ctx, pair[1])
    out = []
    for k in range(len(tail) + 1):
        for chosen in combinations(tail, k):
            first = head | frozenset(chosen)
            second = head | (frozenset(tail) - frozenset(chosen))
            if len(first) % 2 == p1 and len(second) % 2 == p2:
                out.append((first, second))
    return out


def _raising_image(ctx: LatticeContext, cocycle: Cocycle, v: TensorVector) -> Dict[Tuple[int, Pair], Fraction]:
    image = {}
    for i, alpha in enumerate(ctx.simple_roots):
        for key, c in tensor_act(cocycle, alpha, 0, v).terms.items():
            image[(i, key)] = c
    return image


def killed_by_raising(ctx: LatticeContext, cocycle: Cocycle, v: TensorVector) -> bool:
    return not _raising_image(ctx, cocycle, v)


def solve_hw(ctx: LatticeContext, cocycle: Cocycle, j: int, pair: Tuple[int, int]) -> TensorVector:
    supports = support_pairs(ctx, j, pair)
    if not supports:
        raise UnsupportedWeight(f"L{pair[0]} (x) L{pair[1]} has no vector of weight w{j}")
    basic = [TensorVector({(pure(ctx.spinor_weight(s1)), pure(ctx.spinor_weight(s2))): Fraction(1)}) for s1, s2 in supports]
    images = [_raising_image(ctx, cocycle, b) for b in basic]
    relations = nullspace(images)
    if len(relations) != 1:
        raise InternalError(f"highest weight space for w{j} in L{pair[0]} (x) L{pair[1]} has dimension {len(relations)}")
    coeffs = relations[0]
    scale_by = next(c for c in coeffs if c != 0)
    total = TensorVector()
    for b, c in zip(basic, coeffs):
        total = total + b.scaled(c / scale_by)
    log.debug("solved hw vector w%d in L%d (x) L%d: %d terms", j, pair[0], pair[1], len(total.terms))
    return total


def hw_vector_level2(ctx: LatticeContext, cocycle: Cocycle, spec: WeightSpec, pair: Optional[Tuple[int, int]] = None) -> TensorVector:
    if spec.kind == "sum":
        first, second = spec.components()
        return TensorVector.product(hw_vector(ctx, first), hw_vector(ctx, second))
    if spec.kind == "fundamental":
        if ctx.ell != 4:
            raise UnsupportedWeight("level-2 verification requires rank 4")
        j = spec.indices[0]
        return solve_hw(ctx, cocycle, j, pair or default_pair(ctx, j))
    raise UnsupportedWeight(f"{spec.label} is not a level-2 weight")


def hwv_report(ctx: LatticeContext, cocycle: Cocycle, spec: WeightSpec, pair: Tuple[int, int]) -> HwvReport:
    j = spec.indices[0]
    v = solve_hw(ctx, cocycle, j, pair)
    terms = sorted(v.terms.items())
    return HwvReport(
        weight=spec.label,
        pair=f"L{pair[0]},L{pair[1]}",
        kernel_dimension=1,
        support=[format_pair(k) for k, _ in terms],
        coefficients=[str(c) for _, c in terms],
        all_nonzero=len(terms) == len(support_pairs(ctx, j, pair)),
        killed_by_raising=killed_by_raising(ctx, cocycle, v),
    )


def top_piece(ctx: LatticeContext, i: int) -> List[FockBasisElement]:
    parity = spinor_parity(ctx, i)
    out = []
    for k in range(ctx.ell + 1):
        if k % 2 != parity:
            continue
        for sigma in combinations(range(1, ctx.ell + 1), k):
            out.append(pure(ctx.spinor_weight(sigma)))
    return sorted(out)


def decompose_top(ctx: LatticeContext, cocycle: Cocycle, pair: Tuple[int, int]) -> DecompositionReport:
    left, right = top_piece(ctx, pair[0]), top_piece(ctx, pair[1])
    blocks: Dict[Weight, List[Pair]] = {}
    for a in left:
        for b in right:
            blocks.setdefault(add(a.lattice, b.lattice), []).append((a, b))
    rows = []
    for w in sorted(blocks, reverse=True):
        if not ctx.is_dominant(w):
            continue
        images = [_raising_image(ctx, cocycle, TensorVector({key: Fraction(1)})) for key in blocks[w]]
        mult = kernel_dimension(images)
        if mult:
            rows.append(DecompositionRow(weight=ctx.dominant_label(w), multiplicity=mult, dimension=ctx.weyl_dimension(w)))
    total = sum(r.multiplicity * r.dimension for r in rows)
    expected = len(left) * len(right)
    return DecompositionReport(
        pair=f"L{pair[0]},L{pair[1]}",
        summands=rows,
        total_dimension=total,
        expected_dimension=expected,
        balanced=total == expected,
    )
