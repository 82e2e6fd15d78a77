"""Level-2 replay for D_4.

Each tensor slot runs its own chain of basic operators on its part of the monomial; the
checks then run over every way of distributing the factors between the slots and over
every basic vector in the support of v_Lambda. For the fundamental weight the target
sits in the quotient L(L2), where a pair with equal slot labels vanishes.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from fsbasis.conditions import admissible, exceptional_blocks, split_level2, two_colorings
from fsbasis.enumeration import check_supported, enumerate_admissible
from fsbasis.errors import InvalidInput, UnsupportedWeight
from fsbasis.fock import build_cocycle
from fsbasis.lattice import Color, LatticeContext, Weight, WeightSpec, add
from fsbasis.monomial import Factor, Monomial, compare, lift, split_at_depth
from fsbasis.schemas import ReplayReport
from fsbasis.symcalc import SymState, Stage, decompose_state, first_group_op, run_stages, slot_steps
from fsbasis.tensor import default_pair, hw_vector_level2, support_pairs
from fsbasis.verify import monomial_apply

log = logging.getLogger(__name__)

MAX_CANDIDATES = 256
MAX_PROGRAMS = 256
SAMPLE_LIMIT = 5


@dataclass(frozen=True)
class PairState:
    first: Weight
    second: Weight


@dataclass(frozen=True)
class Realization:
    slots: Tuple[int, int]
    support: Tuple[Tuple[Weight, Weight], ...]


def realizations(ctx: LatticeContext, spec: WeightSpec) -> List[Realization]:
    fw = ctx.fundamental_weights
    if spec.kind == "sum":
        a, b = spec.indices
        orders = [(a, b)] if a == b else [(a, b), (b, a)]
        return [Realization(o, ((fw[o[0]], fw[o[1]]),)) for o in orders]
    j = spec.indices[0]
    ell = ctx.ell
    pairs = [default_pair(ctx, j)]
    pairs.extend(p for p in ((ell, ell), (ell - 1, ell - 1), (ell - 1, ell)) if p not in pairs)
    out = []
    for pair in pairs:
        support = tuple((ctx.spinor_weight(s1), ctx.spinor_weight(s2)) for s1, s2 in support_pairs(ctx, j, pair))
        if support:
            out.append(Realization(pair, support))
    return out


@dataclass(frozen=True)
class SlotProgram:
    stages: Tuple[Stage, ...]
    end: Weight


def _open_heads(ctx: LatticeContext, j: int) -> List[FrozenSet[int]]:
    head = frozenset(range(1, j + 1))
    tail = list(range(j + 1, ctx.ell + 1))
    return [head | frozenset(i for k, i in enumerate(tail) if (bits >> k) & 1) for bits in range(1 << len(tail))]


def slot_programs(ctx: LatticeContext, start: Weight, part: Monomial, horizon: int, heads: Sequence[FrozenSet[int]] = ()) -> List[SlotProgram]:
    """Every chain of stages reachable from start on this slot's factors.

    A chain may stop at any state; one ending on a bare spinor state is not extended.
    heads lists the spinor labels a first-group operator may open on an integral state.
    """
    found: List[SlotProgram] = []

    def extend(lam: Weight, rest: Monomial, stages: Tuple[Stage, ...], closed: bool, after_skip: bool) -> None:
        if len(found) >= MAX_PROGRAMS:
            return
        found.append(SlotProgram(stages, lam))
        if not closed:
            return
        n, sigma = decompose_state(ctx, lam)
        for step in slot_steps(ctx, lam, rest, wide=True, horizon=horizon):
            if step.shift > horizon or (after_skip and step.case == "skip"):
                continue
            remaining = split_at_depth(rest, step.stage.hi)[1]
            extend(step.end, remaining, stages + (step.stage,), step.target is not None, step.case == "skip")
        if sigma is None:
            for head in heads:
                op = first_group_op(ctx, n, head)
                found.append(SlotProgram(stages + (Stage((op,), n, n),), add(lam, op.mu)))

    extend(start, part, (), True, False)
    return found


def _readings(ctx: LatticeContext, lam: Weight) -> List[Tuple[int, int]]:
    """(shift, level-1 index) pairs under which lam is a shifted highest weight state."""
    n, sigma = decompose_state(ctx, lam)
    if sigma is None:
        return [(n, 0)] + ([(n - 1, 1)] if n >= 1 else [])
    full = frozenset(range(1, ctx.ell + 1))
    if sigma == full:
        return [(n, ctx.ell)]
    if sigma == full - {ctx.ell}:
        return [(n, ctx.ell - 1)]
    return []


def _basic_at(ctx: LatticeContext, pair: PairState, shift: int, j: int) -> bool:
    try:
        na, sa = decompose_state(ctx, pair.first)
        nb, sb = decompose_state(ctx, pair.second)
    except InvalidInput:
        return False
    if sa is None or sb is None or na != shift or nb != shift:
        return False
    return sa & sb == frozenset(range(1, j + 1)) and sa | sb == frozenset(range(1, ctx.ell + 1))


@dataclass(frozen=True)
class PairPlan:
    support: Tuple[Tuple[Weight, Weight], ...]
    programs: Tuple[Tuple[Stage, ...], Tuple[Stage, ...]]
    shift: int
    target: WeightSpec
    expected: Optional[PairState]
    quotient: bool
    first: Monomial
    rest: Monomial
    identity: bool = False


def _distributions(m: Monomial) -> Iterator[Tuple[Tuple[Factor, ...], Tuple[Factor, ...]]]:
    counts = Counter(m.factors)
    keys = sorted(counts)

    def extend(k: int, left: List[Factor], right: List[Factor]) -> Iterator[Tuple[Tuple[Factor, ...], Tuple[Factor, ...]]]:
        if k == len(keys):
            yield tuple(left), tuple(right)
            return
        f, c = keys[k], counts[keys[k]]
        for taken in range(c + 1):
            yield from extend(k + 1, left + [f] * taken, right + [f] * (c - taken))

    yield from extend(0, [], [])


def evaluate_pair(ctx: LatticeContext, plan: PairPlan, m: Monomial) -> Tuple[List[PairState], int]:
    """Surviving pair states and the number of undecided terms."""
    states: List[PairState] = []
    unsupported = 0
    for sa, sb in plan.support:
        for left, right in _distributions(m):
            first = run_stages(ctx, plan.programs[0], left, SymState(sa))
            if first.is_zero:
                continue
            second = run_stages(ctx, plan.programs[1], right, SymState(sb))
            if second.is_zero:
                continue
            if not (first.is_state and second.is_state):
                unsupported += 1
                continue
            pair = PairState(first.state.lam, second.state.lam)
            if plan.quotient and pair.first == pair.second:
                continue
            states.append(pair)
    return states, unsupported


def _identity_applies(ctx: LatticeContext, m: Monomial, spec: WeightSpec) -> bool:
    if spec.kind != "fundamental":
        return False
    pivot = Color(spec.indices[0] + 1, 1)
    return sorted(m.at_depth(1)) == sorted([Factor(pivot, 1), Factor(pivot.opposite, 1)])


def _partitions(ctx: LatticeContext, m: Monomial) -> List[Tuple[Monomial, Monomial]]:
    out: List[Tuple[Monomial, Monomial]] = []
    split = split_level2(ctx, m)
    if split is not None:
        out.extend([split, (split[1], split[0])])
    for parts in two_colorings(ctx, m):
        if parts not in out:
            out.append(parts)
    return out


def pair_candidates(ctx: LatticeContext, m: Monomial, spec: WeightSpec) -> Iterator[PairPlan]:
    j = spec.indices[0] if spec.kind == "fundamental" else 2
    fundamental = WeightSpec.fundamental(j)
    if _identity_applies(ctx, m, spec):
        first, rest = split_at_depth(m, 1)
        yield PairPlan((), ((), ()), 1, spec, None, True, first, rest, identity=True)
    if split_level2(ctx, m) is None:
        blocks = exceptional_blocks(ctx, m)
        if not blocks:
            return
        shifts = [min(b.pair_depth for b in blocks) - 1]
        prefix = split_at_depth(m, shifts[0])[0]
        partitions = two_colorings(ctx, prefix)
        only_quotient = True
    else:
        shifts = list(range(1, m.max_depth + 1))
        partitions = _partitions(ctx, m)
        only_quotient = False
    horizon = m.max_depth + 1
    heads = _open_heads(ctx, j)
    seen = set()
    for realization in realizations(ctx, spec):
        for part_a, part_b in partitions:
            for start_a, start_b in realization.support:
                programs_a = slot_programs(ctx, start_a, part_a, horizon, heads)
                programs_b = slot_programs(ctx, start_b, part_b, horizon, heads)
                for shift in shifts:
                    first, rest = split_at_depth(m, shift)
                    for a in programs_a:
                        for b in programs_b:
                            key = (realization.support, a.stages, b.stages, shift)
                            if key in seen:
                                continue
                            seen.add(key)
                            pair = PairState(a.end, b.end)
                            if not only_quotient:
                                for da, ia in _readings(ctx, a.end):
                                    for db, ib in _readings(ctx, b.end):
                                        if da == db == shift:
                                            yield PairPlan(realization.support, (a.stages, b.stages), shift, WeightSpec.pair(ia, ib), pair, False, first, rest)
                            if ctx.ell == 4 and _basic_at(ctx, pair, shift, j):
                                yield PairPlan(realization.support, (a.stages, b.stages), shift, fundamental, None, True, first, rest)


def _residual_ok(ctx: LatticeContext, plan: PairPlan) -> bool:
    try:
        residual = lift(plan.rest, plan.shift)
    except InvalidInput:
        return False
    return admissible(ctx, residual, plan.target)


@dataclass
class Verdict:
    closes: bool
    kills: int = 0
    unsupported: int = 0

    @property
    def passed(self) -> bool:
        return self.closes and not self.kills and not self.unsupported


class _IdentityJudge:
    """The identity case is settled in the tensor product itself."""

    def __init__(self, ctx: LatticeContext, spec: WeightSpec):
        self.ctx = ctx
        self.cocycle = build_cocycle(ctx)
        self.v = hw_vector_level2(ctx, self.cocycle, spec)
        self.memo: Dict = {}

    def is_zero(self, m: Monomial) -> bool:
        return monomial_apply(self.ctx, self.cocycle, m, self.v, self.memo).is_zero()


def judge(ctx: LatticeContext, plan: PairPlan, monomials: Sequence[Monomial], identity: Optional[_IdentityJudge] = None) -> Verdict:
    if not _residual_ok(ctx, plan):
        return Verdict(False)
    greater = []
    for other in monomials:
        first = split_at_depth(other, plan.shift)[0]
        if compare(first, plan.first) > 0:
            greater.append(first)
    if plan.identity:
        if identity is None or identity.is_zero(plan.first):
            return Verdict(False)
        return Verdict(True, kills=sum(not identity.is_zero(first) for first in greater))
    states, unsupported = evaluate_pair(ctx, plan, plan.first)
    if unsupported or len(states) != 1:
        return Verdict(False)
    if plan.quotient:
        if not _basic_at(ctx, states[0], plan.shift, plan.target.indices[0]):
            return Verdict(False)
    elif states[0] != plan.expected:
        return Verdict(False)
    verdict = Verdict(True)
    for first in greater:
        survivors, undecided = evaluate_pair(ctx, plan, first)
        verdict.kills += bool(survivors)
        verdict.unsupported += bool(undecided)
    return verdict


def replay_level2_D4(ctx: LatticeContext, spec: WeightSpec, n: int) -> ReplayReport:
    check_supported(ctx, spec)
    if ctx.ell != 4:
        raise UnsupportedWeight("level-2 verification requires rank 4")
    if spec.level != 2:
        raise UnsupportedWeight(f"{spec.label} is not a level-2 weight")
    monomials = enumerate_admissible(ctx, spec, n)
    identity = _IdentityJudge(ctx, spec) if spec.kind == "fundamental" else None
    kill_failures = unsupported = residual_failures = 0
    samples: List[str] = []
    for m in monomials:
        if not m:
            continue
        best: Optional[Verdict] = None
        for k, plan in enumerate(pair_candidates(ctx, m, spec)):
            if k >= MAX_CANDIDATES:
                break
            verdict = judge(ctx, plan, monomials, identity)
            if verdict.passed:
                best = verdict
                break
            if best is None or (verdict.closes and not best.closes):
                best = verdict
        if best is not None and best.passed:
            continue
        if best is None or not best.closes:
            residual_failures += 1
        else:
            kill_failures += best.kills
            unsupported += best.unsupported
        if len(samples) < SAMPLE_LIMIT:
            samples.append(str(m))
    passed = not (kill_failures or unsupported or residual_failures)
    log.info("replay %s degree %d: %d monomials, pass=%s", spec.label, n, len(monomials), passed)
    return ReplayReport(
        weight=spec.label,
        degree=n,
        checked=len(monomials),
        kill_failures=kill_failures,
        unsupported=unsupported,
        residual_failures=residual_failures,
        passed=passed,
        samples=samples,
    )
