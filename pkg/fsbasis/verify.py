"""Theorem checks: exact span ranks of monomial vectors and the vertex-operator identities
the basis argument rests on, evaluated concretely in the lattice construction."""

import logging
import time
from collections import defaultdict
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import floor
from typing import Dict, List, Optional, Sequence, Union

from fsbasis.conditions import ic_level1, ic_level2
from fsbasis.enumeration import check_supported, colored_partitions, enumerate_admissible
from fsbasis.errors import InvalidInput
from fsbasis.fock import (
    Cocycle,
    FockVector,
    build_cocycle,
    e_lambda,
    graded_basis,
    hw_vector,
    lowest_grade,
    pure,
    vertex_act,
)
from fsbasis.lattice import Color, LatticeContext, Weight, WeightSpec, add, pairing, scale, sub
from fsbasis.linalg import rank
from fsbasis.monomial import Factor, Monomial, normalize, weight
from fsbasis.schemas import CheckReport, SpanReport
from fsbasis.symcalc import SymState, run_stages
from fsbasis.tensor import TensorVector, hw_vector_level2, sigma_of, tensor_act

log = logging.getLogger(__name__)

Vector = Union[FockVector, TensorVector]
SAMPLE_LIMIT = 5


def _act(cocycle: Cocycle, alpha: Weight, m: int, v: Vector) -> Vector:
    if isinstance(v, TensorVector):
        return tensor_act(cocycle, alpha, m, v)
    return vertex_act(cocycle, alpha, m, v)


def _zero_like(v: Vector) -> Vector:
    return type(v)()


def monomial_apply(ctx: LatticeContext, cocycle: Cocycle, m: Monomial, v: Vector, memo: Optional[Dict] = None) -> Vector:
    """x(m) v, rightmost factor first. A memo is only valid for one start vector."""
    if m.has_imaginary():
        raise InvalidInput(f"'{m}' has a depth-0 factor")
    factors = m.factors
    k = len(factors)
    w = v
    if memo is not None:
        while k > 0 and factors[k - 1:] in memo:
            k -= 1
        if k < len(factors):
            w = memo[factors[k:]]
    for i in range(k - 1, -1, -1):
        if not w.is_zero():
            f = factors[i]
            w = _act(cocycle, ctx.root_of(f.color), -f.depth, w)
        if memo is not None:
            memo[factors[i:]] = w
    return w


def highest_weight_vector(ctx: LatticeContext, cocycle: Cocycle, spec: WeightSpec) -> Vector:
    if spec.kind == "level1":
        return hw_vector(ctx, spec)
    return hw_vector_level2(ctx, cocycle, spec)


def _blocked_rank(ctx: LatticeContext, monomials: Sequence[Monomial], images: Dict[Monomial, Vector]) -> int:
    blocks: Dict[Weight, List[dict]] = defaultdict(list)
    for m in monomials:
        blocks[weight(ctx, m)].append(images[m].terms)
    return sum(rank(rows) for rows in blocks.values())


def span_report(ctx: LatticeContext, cocycle: Cocycle, spec: WeightSpec, n: int) -> SpanReport:
    check_supported(ctx, spec)
    started = time.perf_counter()
    v = highest_weight_vector(ctx, cocycle, spec)
    memo: Dict = {}
    pbw = list(colored_partitions(ctx, n))
    images = {m: monomial_apply(ctx, cocycle, m, v, memo) for m in pbw}
    chosen = enumerate_admissible(ctx, spec, n)
    for m in chosen:
        if m not in images:
            images[m] = monomial_apply(ctx, cocycle, m, v, memo)
    pbw_rank = _blocked_rank(ctx, pbw, images)
    admissible_rank = _blocked_rank(ctx, chosen, images)
    elapsed = int((time.perf_counter() - started) * 1000)
    passed = len(chosen) == admissible_rank == pbw_rank
    log.info("span %s degree %d: pbw %d/%d admissible %d/%d (%d ms)", spec.label, n, pbw_rank, len(pbw), admissible_rank, len(chosen), elapsed)
    return SpanReport(
        weight=spec.label,
        degree=n,
        pbw_count=len(pbw),
        pbw_rank=pbw_rank,
        admissible_count=len(chosen),
        admissible_rank=admissible_rank,
        passed=passed,
        elapsed_ms=elapsed,
    )


def _top_degree(v: Vector) -> Fraction:
    if isinstance(v, TensorVector):
        return max(a.degree + b.degree for a, b in v.terms)
    return max(e.degree for e in v.terms)


def coefficient_sum(ctx: LatticeContext, cocycle: Cocycle, colors: Sequence[Color], n: int, v: Vector) -> Vector:
    """Sum over p_1 + ... + p_r = n of x_c1(-p_1) ... x_cr(-p_r) v.

    Colors commute, so positive modes act first; they cannot total more than the
    distance of v from grade 0, which bounds every p_i from below.
    """
    total = _zero_like(v)
    if v.is_zero():
        return total
    r = len(colors)
    reach = int(floor(-_top_degree(v)))
    roots = [ctx.root_of(c) for c in colors]
    for ps in product(range(-reach, n + (r - 1) * reach + 1), repeat=r):
        if sum(ps) != n:
            continue
        w = v
        for i in sorted(range(r), key=lambda i: ps[i]):
            w = _act(cocycle, roots[i], -ps[i], w)
            if w.is_zero():
                break
        if not w.is_zero():
            total = total + w
    return total


def _ratio(u: Vector, w: Vector) -> Optional[Fraction]:
    """C with u = C w, if any."""
    if w.is_zero():
        return Fraction(0) if u.is_zero() else None
    key = min(w.terms)
    c = u.terms.get(key, Fraction(0)) / w.terms[key]
    return c if (u + w.scaled(-c)).is_zero() else None


def relation_vectors(ctx: LatticeContext) -> List[FockVector]:
    """Vacuum grades 0 and -1 plus the top pieces of the other three cosets."""
    elems = list(graded_basis(ctx, 0, 0)) + list(graded_basis(ctx, 0, -1))
    for coset in (1, ctx.ell - 1, ctx.ell):
        elems.extend(graded_basis(ctx, coset, -lowest_grade(ctx, coset)))
    return [FockVector.of(e) for e in elems]


def _report(name: str, weight_label: Optional[str], checked: int, failures: List[str]) -> CheckReport:
    return CheckReport(
        name=name,
        weight=weight_label,
        checked=checked,
        failures=len(failures),
        samples=failures[:SAMPLE_LIMIT],
        passed=not failures,
    )


def _colors_text(colors: Sequence[Color]) -> str:
    return " ".join(str(c) for c in colors)


def _opposite_sum(ctx: LatticeContext, cocycle: Cocycle, g: Color, n: int, v: Vector) -> Vector:
    return coefficient_sum(ctx, cocycle, (g.opposite, g), n, v)


def check_relations_level1(ctx: LatticeContext, cocycle: Cocycle, n_max: int, triple_degree: int = 4) -> List[CheckReport]:
    vectors = relation_vectors(ctx)
    vacuum = hw_vector(ctx, WeightSpec.level1(0))

    checked, failures = 0, []
    for gamma, delta in combinations_with_replacement(ctx.gamma_set, 2):
        if delta == gamma.opposite:
            continue
        for n in range(n_max + 1):
            for k, v in enumerate(vectors):
                checked += 1
                if not coefficient_sum(ctx, cocycle, (delta, gamma), n, v).is_zero():
                    failures.append(f"{_colors_text((delta, gamma))} n={n} vector #{k}")
    pairs = _report("relations-pairs", "L0", checked, failures)

    checked, failures = 0, []
    positives = ctx.positives()
    for gi, gj in combinations(positives, 2):
        c = _ratio(_opposite_sum(ctx, cocycle, gi, 2, vacuum), _opposite_sum(ctx, cocycle, gj, 2, vacuum))
        if c is None or c == 0:
            failures.append(f"no constant for {gi} against {gj}")
            continue
        for n in range(n_max + 1):
            for k, v in enumerate(vectors):
                checked += 1
                if not (_opposite_sum(ctx, cocycle, gi, n, v) + _opposite_sum(ctx, cocycle, gj, n, v).scaled(-c)).is_zero():
                    failures.append(f"{gi} vs {gj} (C={c}) n={n} vector #{k}")
    opposite = _report("relations-opposite-pairs", "L0", checked, failures)

    checked, failures = 0, []
    for colors in combinations_with_replacement(ctx.gamma_set, 3):
        for n in range(3, triple_degree + 1):
            checked += 1
            if not coefficient_sum(ctx, cocycle, colors, n, vacuum).is_zero():
                failures.append(f"{_colors_text(colors)} n={n}")
    triples = _report("relations-triples", "L0", checked, failures)
    log.info("level-1 relations up to n=%d: %d failures", n_max, pairs.failures + opposite.failures + triples.failures)
    return [pairs, opposite, triples]


def check_relations_level2(ctx: LatticeContext, cocycle: Cocycle, n_max: int) -> List[CheckReport]:
    """Triple relations on v_L0 (x) v_L0."""
    vacuum = hw_vector(ctx, WeightSpec.level1(0))
    v = TensorVector.product(vacuum, vacuum)

    checked, failures = 0, []
    for colors in combinations_with_replacement(ctx.gamma_set, 3):
        if any(c.opposite in colors for c in colors):
            continue
        for n in range(3, n_max + 1):
            checked += 1
            if not coefficient_sum(ctx, cocycle, colors, n, v).is_zero():
                failures.append(f"{_colors_text(colors)} n={n}")
    plain = _report("relations-level2-triples", "L0+L0", checked, failures)

    checked, failures = 0, []
    for tau in ctx.gamma_set:
        sums = {
            g: {n: coefficient_sum(ctx, cocycle, (tau, g.opposite, g), n, v) for n in range(3, n_max + 1)}
            for g in ctx.positives()
        }
        for gi, gj in combinations(ctx.positives(), 2):
            basis_n = next((n for n in range(3, n_max + 1) if not sums[gj][n].is_zero()), None)
            if basis_n is None:
                continue
            c = _ratio(sums[gi][basis_n], sums[gj][basis_n])
            if c is None:
                failures.append(f"{tau}: no constant for {gi} against {gj}")
                continue
            for n in range(3, n_max + 1):
                checked += 1
                if not (sums[gi][n] + sums[gj][n].scaled(-c)).is_zero():
                    failures.append(f"{tau}: {gi} vs {gj} (C={c}) n={n}")
    paired = _report("relations-level2-opposite", "L0+L0", checked, failures)
    log.info("level-2 relations up to n=%d: %d failures", n_max, plain.failures + paired.failures)
    return [plain, paired]


def _proportional(u: Vector, w: Vector) -> bool:
    if u.is_zero() or w.is_zero():
        return False
    return rank([u.terms, w.terms]) == 1


def _depth_one(*colors: Color) -> Monomial:
    return normalize(Factor(c, 1) for c in colors)


def check_ic_identities(ctx: LatticeContext, cocycle: Cocycle, spec: WeightSpec) -> CheckReport:
    """Annihilation and proportionality claims behind the initial conditions."""
    check_supported(ctx, spec)
    v = highest_weight_vector(ctx, cocycle, spec)
    ic = ic_level1 if spec.kind == "level1" else ic_level2
    checked, failures = 0, []

    for gamma in ctx.gamma_set:
        m = _depth_one(gamma)
        checked += 1
        if monomial_apply(ctx, cocycle, m, v).is_zero() == ic(ctx, m, spec):
            failures.append(f"{gamma}(-1) disagrees with the initial conditions")

    if spec == WeightSpec.level1(0):
        top = FockVector.of(pure(scale(2, ctx.omega)))
        for gamma, delta in combinations_with_replacement(ctx.gamma_set, 2):
            checked += 1
            image = monomial_apply(ctx, cocycle, _depth_one(gamma, delta), v)
            if delta == gamma.opposite:
                if not _proportional(image, top):
                    failures.append(f"{delta}(-1) {gamma}(-1) e^0 is not a multiple of e^(2w)")
            elif not image.is_zero():
                failures.append(f"{delta}(-1) {gamma}(-1) e^0 is not zero")

    if spec.kind == "fundamental":
        j = spec.indices[0]
        head = frozenset(range(1, j + 1))
        full = frozenset(range(1, ctx.ell + 1))
        pivot = Color(j + 1, 1)
        reference = monomial_apply(ctx, cocycle, _depth_one(pivot.opposite, pivot), v)
        for i in range(j + 1, ctx.ell + 1):
            checked += 1
            g = Color(i, 1)
            image = monomial_apply(ctx, cocycle, _depth_one(g.opposite, g), v)
            if not _proportional(image, reference):
                failures.append(f"{g.opposite}(-1) {g}(-1) v is not a nonzero multiple of the shifted vector")
        for a, b in reference.terms:
            checked += 1
            left, right = sigma_of(sub(a.lattice, ctx.omega)), sigma_of(sub(b.lattice, ctx.omega))
            if any(a.modes) or any(b.modes) or left & right != head or left | right != full:
                failures.append(f"shifted vector has a non-basic term {a} (x) {b}")
        for tau, delta in combinations_with_replacement(ctx.gamma_set, 2):
            if delta == tau.opposite:
                continue
            m = _depth_one(tau, delta)
            if ic(ctx, m, spec):
                continue
            checked += 1
            if not monomial_apply(ctx, cocycle, m, v).is_zero():
                failures.append(f"{m} v is not zero")

    log.info("initial-condition identities for %s: %d checked, %d failures", spec.label, checked, len(failures))
    return _report("ic-identities", spec.label, checked, failures)


def _current_roots(ctx: LatticeContext) -> List[Weight]:
    roots: List[Weight] = []
    for alpha in [ctx.root_of(c) for c in ctx.gamma_set] + [scale(-1, ctx.root_of(c)) for c in ctx.gamma_set] + list(ctx.simple_roots):
        if alpha not in roots:
            roots.append(alpha)
    return roots


def check_simple_current(ctx: LatticeContext, cocycle: Cocycle, n_max: int) -> CheckReport:
    """x_a(n) e(w) = e(w) x_a(n + <w, a>) on every basis vector of the four level-1 modules,
    graded pieces down to n_max below the top; e(w) swaps L0 with L1 and L(l-1) with L(l)."""
    omega = ctx.omega
    roots = _current_roots(ctx)
    partner = {0: 1, 1: 0, ctx.ell - 1: ctx.ell, ctx.ell: ctx.ell - 1}
    checked, failures = 0, []
    for coset in ctx.level1_indices:
        h = lowest_grade(ctx, coset)
        for k in range(n_max + 1):
            for elem in graded_basis(ctx, coset, -(h + k)):
                v = FockVector.of(elem)
                moved = e_lambda(cocycle, omega, v)
                checked += 1
                if ctx.coset_class(add(elem.lattice, omega)) != partner[coset]:
                    failures.append(f"e(w) sends {elem} outside the L{partner[coset]} coset")
                for alpha in roots:
                    s = int(pairing(omega, alpha))
                    for n in range(-n_max, n_max + 1):
                        checked += 1
                        lhs = vertex_act(cocycle, alpha, n, moved)
                        rhs = e_lambda(cocycle, omega, vertex_act(cocycle, alpha, n + s, v))
                        if not (lhs - rhs).is_zero():
                            failures.append(f"alpha={alpha} n={n} on {elem}")
    log.info("simple current up to n=%d: %d checked, %d failures", n_max, checked, len(failures))
    return _report("simple-current", None, checked, failures)


def check_cocycle_invariance(ctx: LatticeContext, spec: WeightSpec, n: int) -> CheckReport:
    first = span_report(ctx, build_cocycle(ctx, 0), spec, n)
    second = span_report(ctx, build_cocycle(ctx, 1), spec, n)
    failures = []
    if (first.pbw_rank, first.admissible_rank) != (second.pbw_rank, second.admissible_rank):
        failures.append(f"ranks {first.pbw_rank}/{first.admissible_rank} vs {second.pbw_rank}/{second.admissible_rank}")
    return _report("cocycle-invariance", spec.label, 1, failures)


def _successive_blocks(ctx: LatticeContext, n_max: int) -> List[Monomial]:
    blocks = []
    r = 1
    while r * (r + 1) // 2 <= n_max:
        for colors in product(ctx.gamma_set, repeat=r):
            blocks.append(normalize(Factor(c, depth) for depth, c in enumerate(colors, start=1)))
        r += 1
    return blocks


def check_fock_consistency(ctx: LatticeContext, cocycle: Cocycle, n_max: int) -> CheckReport:
    """The symbolic calculus against the Fock action on successive blocks (-r)...(-1)."""
    rest = range(2, ctx.ell + 1)
    states = [ctx.spinor_weight({1, *chosen}) for k in range(ctx.ell) for chosen in combinations(rest, k)]
    states.append(ctx.omega)
    blocks = _successive_blocks(ctx, n_max)
    checked, failures = 0, []
    for lam in states:
        start = FockVector.of(pure(lam))
        memo: Dict = {}
        for m in blocks:
            checked += 1
            symbolic = run_stages(ctx, (), m.factors, SymState(lam))
            numeric = monomial_apply(ctx, cocycle, m, start, memo)
            if symbolic.is_state:
                ok = len(numeric) == 1 and next(iter(numeric.terms)) == pure(symbolic.state.lam)
            elif symbolic.is_zero:
                ok = numeric.is_zero()
            else:
                ok = False
            if not ok:
                failures.append(f"{m} on ({', '.join(str(x) for x in lam)}): symbolic {symbolic.kind}")
    log.info("fock consistency up to degree %d: %d checked, %d failures", n_max, checked, len(failures))
    return _report("fock-consistency", None, checked, failures)
