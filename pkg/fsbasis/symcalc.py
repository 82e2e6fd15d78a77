"""Projective calculus on pure lattice states and the operator chains that replay the
level-1 independence argument.

A state is a lattice weight lam standing for e^lam up to a nonzero scalar. The factor
x_a(-j) sends e^lam to e^(lam + a) when j = <a, lam> + 1 and kills it when j is smaller.
The coefficient of an intertwining operator labelled by mu that extracts z^p does the same
with q = <mu, lam> against p. Whatever the leading term cannot decide comes back as
unsupported and is never read as zero.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Literal, Optional, Sequence, Tuple, Union

from fsbasis.conditions import admissible
from fsbasis.enumeration import check_supported, enumerate_admissible
from fsbasis.errors import InvalidInput, UnsupportedWeight
from fsbasis.lattice import HALF, LatticeContext, Weight, WeightSpec, add, format_weight, hw_weight, pairing, scale
from fsbasis.monomial import Factor, Monomial, compare, lift, normalize, split_at_depth, successive_run
from fsbasis.schemas import CheckReport, ReplayReport
from fsbasis.tensor import format_sigma

log = logging.getLogger(__name__)

DEFAULT_VARIANTS = ("I1", "I2", "I3")
SAMPLE_LIMIT = 5


@dataclass(frozen=True)
class SymState:
    lam: Weight


@dataclass(frozen=True)
class Outcome:
    kind: Literal["zero", "state", "unsupported"]
    state: Optional[SymState] = None

    @property
    def is_state(self) -> bool:
        return self.kind == "state"

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"


ZERO = Outcome("zero")
UNSUPPORTED = Outcome("unsupported")


def state_of(lam: Weight) -> Outcome:
    return Outcome("state", SymState(lam))


def decompose_state(ctx: LatticeContext, lam: Weight) -> Tuple[int, Optional[FrozenSet[int]]]:
    """Write lam as n*omega (label None) or n*omega + mu_sigma with 1 in sigma when n >= 0."""
    rest = lam[1:]
    if all(x == 0 for x in rest):
        if lam[0].denominator != 1:
            raise InvalidInput(f"({format_weight(lam)}) is not a pure top state")
        return int(lam[0]), None
    if not all(abs(x) == HALF for x in rest):
        raise InvalidInput(f"({format_weight(lam)}) is not a pure top state")
    upper = frozenset(i for i, x in enumerate(lam, start=1) if i > 1 and x > 0)
    n = lam[0] - HALF
    if n.denominator != 1:
        raise InvalidInput(f"({format_weight(lam)}) is not a pure top state")
    if n < 0:
        return int(lam[0] + HALF), upper
    return int(n), upper | {1}


def format_state(ctx: LatticeContext, lam: Weight) -> str:
    try:
        n, sigma = decompose_state(ctx, lam)
    except InvalidInput:
        return f"e^({format_weight(lam)})"
    parts = []
    if n:
        parts.append("e^{w}" if n == 1 else f"e^{{{n}w}}")
    if sigma is not None:
        parts.append(format_sigma(sigma))
    return " ".join(parts) or "e^0"


def act_factor_sym(ctx: LatticeContext, f: Factor, s: SymState) -> Outcome:
    if f.depth < 1:
        raise InvalidInput(f"factor {f} has no symbolic action")
    root = ctx.root_of(f.color)
    t = pairing(root, s.lam) + 1
    if f.depth < t:
        return ZERO
    if f.depth == t:
        return state_of(add(s.lam, root))
    return UNSUPPORTED


def act_zero_mode_sym(ctx: LatticeContext, alpha: Weight, s: SymState) -> Outcome:
    """x_alpha(0) on a top spinor state: moves one or two indices in or out of the label."""
    if not all(abs(x) == HALF for x in s.lam):
        raise InvalidInput(f"({format_weight(s.lam)}) is not a top spinor state")
    support = [(i, a) for i, a in enumerate(alpha, start=1) if a != 0]
    if len(support) != 2 or any(abs(a) != 1 for _, a in support):
        raise InvalidInput(f"({format_weight(alpha)}) is not a root")
    sigma = {i for i, x in enumerate(s.lam, start=1) if x > 0}
    (i, a), (j, b) = support
    if a == 1 and b == 1:
        ok, new = i not in sigma and j not in sigma, sigma | {i, j}
    elif a == -1 and b == -1:
        ok, new = i in sigma and j in sigma, sigma - {i, j}
    else:
        plus, minus = (i, j) if a == 1 else (j, i)
        ok, new = plus not in sigma and minus in sigma, (sigma | {plus}) - {minus}
    return state_of(ctx.spinor_weight(new)) if ok else ZERO


@dataclass(frozen=True)
class SymOp:
    """Coefficient of z^p in an intertwining operator labelled by mu."""

    mu: Weight
    p: Fraction
    kind: Literal["first", "second", "skip", "identity"]
    label: str = ""

    def __str__(self) -> str:
        return self.label


def apply_sym(op: SymOp, s: SymState) -> Outcome:
    q = pairing(op.mu, s.lam)
    if q == op.p:
        return state_of(add(s.lam, op.mu))
    if q > op.p:
        return ZERO
    return UNSUPPORTED


def _digits(sigma: Iterable[int]) -> str:
    return "".join(str(i) for i in sorted(sigma))


def first_group_op(ctx: LatticeContext, n: int, sigma: Iterable[int]) -> SymOp:
    """Sends e^(n omega) to e^(n omega + mu_sigma)."""
    sigma = frozenset(sigma)
    mu = ctx.spinor_weight(sigma)
    return SymOp(mu, pairing(mu, scale(n, ctx.omega)), "first", f"I({n};{_digits(sigma)})")


def second_group_op(ctx: LatticeContext, n: int, sigma: Iterable[int]) -> SymOp:
    """Labelled by the complement of sigma with 1 added; sends e^(n omega + mu_sigma) to e^((n+1) omega)."""
    sigma = frozenset(sigma)
    comp = (frozenset(range(1, ctx.ell + 1)) - sigma) | {1}
    mu = ctx.spinor_weight(comp)
    p = pairing(mu, add(ctx.spinor_weight(sigma), scale(n, ctx.omega)))
    return SymOp(mu, p, "second", f"I'({n};{_digits(sigma)})")


def skip_ops(ctx: LatticeContext, m: int, n: int) -> List[SymOp]:
    """e^(m omega) to e^(n omega) through the full spinor label."""
    full = range(1, ctx.ell + 1)
    ops = []
    for k in range(m, n):
        ops.append(replace(first_group_op(ctx, k, full), kind="skip"))
        ops.append(replace(second_group_op(ctx, k, full), kind="skip"))
    return ops


@dataclass(frozen=True)
class Stage:
    """Operators applied before and after the factors with lo < depth <= hi."""

    pre: Tuple[SymOp, ...]
    lo: int
    hi: int
    post: Tuple[SymOp, ...] = ()


Item = Union[Factor, SymOp]


def _act(ctx: LatticeContext, item: Item, s: SymState) -> Outcome:
    if isinstance(item, Factor):
        return act_factor_sym(ctx, item, s)
    return apply_sym(item, s)


def _run_items(ctx: LatticeContext, items: Iterable[Item], start: SymState, trace: Optional[List[Weight]] = None) -> Outcome:
    state = start
    for item in items:
        out = _act(ctx, item, state)
        if not out.is_state:
            return out
        state = out.state
        if trace is not None:
            trace.append(state.lam)
    return state_of(state.lam)


def run_stages(
    ctx: LatticeContext,
    stages: Sequence[Stage],
    factors: Iterable[Factor],
    start: SymState,
    trace: Optional[List[Weight]] = None,
) -> Outcome:
    """Shallowest factor first inside each stage; factors no stage covers act last."""
    pending = sorted(factors, reverse=True)
    items: List[Item] = []
    for stage in stages:
        items.extend(stage.pre)
        items.extend(f for f in pending if stage.lo < f.depth <= stage.hi)
        items.extend(stage.post)
    items.extend(f for f in pending if not any(st.lo < f.depth <= st.hi for st in stages))
    return _run_items(ctx, items, start, trace)


def _simulate(ctx: LatticeContext, lam: Weight, items: Iterable[Item]) -> Optional[Weight]:
    out = _run_items(ctx, items, SymState(lam))
    return out.state.lam if out.is_state else None


@dataclass(frozen=True)
class Step:
    case: str
    variant: Optional[str]
    stage: Stage
    end: Weight
    shift: int
    # level-1 weight index of the end state, None when it stops on a bare spinor state
    target: Optional[int]


def _closing(ctx: LatticeContext, case: str, variant: Optional[str], pre: Tuple[SymOp, ...], lam: Weight, n: int, block: Sequence[Factor], wide: bool) -> Iterator[Step]:
    j = len(block)
    mid = _simulate(ctx, lam, pre + tuple(block))
    if mid is None:
        return
    sigma = decompose_state(ctx, mid)[1]
    if sigma is None:
        return
    post = (second_group_op(ctx, n + j, sigma),)
    end = _simulate(ctx, mid, post)
    if end is not None:
        yield Step(case, variant, Stage(pre, n, n + j, post), end, n + j, 1)
    if wide:
        yield Step(case, f"{variant}-open" if variant else "open", Stage(pre, n, n + j), mid, n + j, None)


def _block_steps(ctx: LatticeContext, lam: Weight, n: int, sigma: Optional[FrozenSet[int]], rest: Monomial, wide: bool) -> Iterator[Step]:
    ell = ctx.ell
    full = frozenset(range(1, ell + 1))
    run = successive_run(rest)
    here = rest.at_depth(n + 1)
    if sigma is None and len(here) == 2:
        end = _simulate(ctx, lam, sorted(here, reverse=True))
        if end is not None:
            yield Step("d", None, Stage((), n, n + 1), end, n + 2, 0)
        return
    if not run:
        return
    head = run[0].color
    if sigma is not None:
        yield from _closing(ctx, "spinor", None, (), lam, n, run, wide)
        return
    if head.positive and head.index < ell:
        prefix = []
        for f in run:
            if not (f.color.positive and f.color.index < ell):
                break
            prefix.append(f)
        idx = frozenset(f.color.index for f in prefix)
        j = len(prefix)
        variants = (
            ("I1", frozenset(range(1, ell)) - idx, ell - 1),
            ("I2", full - idx, ell),
            ("I3", frozenset(range(1, max(idx) + 1)) - idx, None),
        )
        for name, base, target in variants:
            pre = (first_group_op(ctx, n, base),)
            if target is None:
                yield from _closing(ctx, "a", name, pre, lam, n, prefix, wide)
                continue
            mid = _simulate(ctx, lam, pre + tuple(prefix))
            if mid is not None:
                yield Step("a", name, Stage(pre, n, n + j), mid, n + j, target)
        return
    if head.positive:
        yield from _closing(ctx, "c", None, (first_group_op(ctx, n, frozenset(range(1, ell))),), lam, n, run, wide)
    else:
        yield from _closing(ctx, "b", None, (first_group_op(ctx, n, full),), lam, n, run, wide)


def slot_steps(
    ctx: LatticeContext,
    lam: Weight,
    rest: Monomial,
    wide: bool = False,
    horizon: int = 0,
    from_lambda1: bool = False,
) -> Iterator[Step]:
    """Basic operator stages at state lam for the factors still to come.

    The narrow set is the level-1 construction. wide adds every skip length up to
    horizon and blocks that stop on a spinor state without the closing operator.
    from_lambda1 reads an integral state as Lambda_1 one step lower, which always skips.
    """
    n, sigma = decompose_state(ctx, lam)
    d = rest.factors[-1].depth if rest else None
    if d == n + 1 and not from_lambda1:
        yield from _block_steps(ctx, lam, n, sigma, rest, wide)
        return
    if d is None:
        targets = range(n + 1, horizon + 1) if wide else []
    elif wide:
        targets = range(n + 1, d)
    else:
        targets = [d - 1]
    for t in targets:
        if sigma is not None:
            ops = (second_group_op(ctx, n, sigma),) + tuple(skip_ops(ctx, n + 1, t))
        else:
            ops = tuple(skip_ops(ctx, n, t))
        end = _simulate(ctx, lam, ops)
        if end is not None:
            yield Step("skip", None, Stage(ops, n, t), end, t, 0)


@dataclass(frozen=True)
class OperatorPlan:
    case: str
    variant: Optional[str]
    stages: Tuple[Stage, ...]
    shift: int
    target: int
    first: Monomial
    rest: Monomial

    def target_weight(self, ctx: LatticeContext) -> Weight:
        return add(scale(self.shift, ctx.omega), ctx.fundamental_weights[self.target])

    def describe(self) -> str:
        ops = [str(op) for st in self.stages for op in st.pre + st.post]
        name = self.case + (f"/{self.variant}" if self.variant else "")
        return f"{name} [{' '.join(ops) or 'id'}] -> e^{{{self.shift}w}} L{self.target}"


def operator_candidates(
    ctx: LatticeContext,
    m: Monomial,
    lam: Weight,
    variant_order: Sequence[str] = DEFAULT_VARIANTS,
    from_lambda1: bool = False,
) -> List[OperatorPlan]:
    plans = []
    for step in slot_steps(ctx, lam, m, from_lambda1=from_lambda1):
        if step.target is None:
            continue
        first, rest = split_at_depth(m, step.shift)
        plans.append(OperatorPlan(step.case, step.variant, (step.stage,), step.shift, step.target, first, rest))
    order = {name: k for k, name in enumerate(variant_order)}
    plans.sort(key=lambda p: order.get(p.variant, len(order)))
    return plans


def residual_ok(ctx: LatticeContext, plan: OperatorPlan) -> bool:
    try:
        residual = lift(plan.rest, plan.shift)
    except InvalidInput:
        return False
    return admissible(ctx, residual, WeightSpec.level1(plan.target))


def _lands(ctx: LatticeContext, plan: OperatorPlan, start: Weight, trace: Optional[List[Weight]] = None) -> bool:
    out = run_stages(ctx, plan.stages, plan.first.factors, SymState(start), trace)
    return out.is_state and out.state.lam == plan.target_weight(ctx)


def _require_level1(ctx: LatticeContext, m: Monomial, spec: WeightSpec) -> None:
    if spec.kind != "level1":
        raise UnsupportedWeight(f"{spec.label} is not a level-1 weight")
    spec.validate(ctx.ell)
    if not admissible(ctx, m, spec):
        raise InvalidInput(f"'{m}' is not admissible for {spec.label}")


def build_operator_level1(ctx: LatticeContext, m: Monomial, spec: WeightSpec, variant_order: Sequence[str] = DEFAULT_VARIANTS) -> OperatorPlan:
    """First candidate that lands on its target and leaves an admissible residual."""
    _require_level1(ctx, m, spec)
    start = hw_weight(ctx, spec)
    candidates = operator_candidates(ctx, m, start, variant_order, from_lambda1=spec.indices[0] == 1)
    if not candidates:
        raise InvalidInput(f"no operator applies to '{m}' on {spec.label}")
    for plan in candidates:
        if _lands(ctx, plan, start) and residual_ok(ctx, plan):
            return plan
    raise InvalidInput(f"no operator closes on '{m}' at {spec.label}")


@dataclass(frozen=True)
class Composition:
    plans: Tuple[OperatorPlan, ...]
    trace: Tuple[Weight, ...]
    final: Weight


def compose_operator_level1(ctx: LatticeContext, m: Monomial, spec: WeightSpec, variant_order: Sequence[str] = DEFAULT_VARIANTS) -> Composition:
    """Chain operators until every factor is consumed; the trace lists the state after each op and factor."""
    _require_level1(ctx, m, spec)
    lam = hw_weight(ctx, spec)
    index = spec.indices[0]
    rest = m
    plans: List[OperatorPlan] = []
    trace: List[Weight] = []
    while rest:
        chosen = None
        for plan in operator_candidates(ctx, rest, lam, variant_order, from_lambda1=index == 1):
            steps: List[Weight] = []
            if _lands(ctx, plan, lam, steps) and residual_ok(ctx, plan):
                chosen = plan
                trace.extend(steps)
                break
        if chosen is None:
            raise InvalidInput(f"no operator closes on '{rest}' at {format_state(ctx, lam)}")
        log.debug("%s: %s", format_state(ctx, lam), chosen.describe())
        plans.append(chosen)
        lam, index, rest = chosen.target_weight(ctx), chosen.target, chosen.rest
    return Composition(tuple(plans), tuple(trace), lam)


def _judge(ctx: LatticeContext, plan: OperatorPlan, start: Weight, m: Monomial, monomials: Sequence[Monomial]) -> Tuple[bool, int, int]:
    closes = _lands(ctx, plan, start) and residual_ok(ctx, plan)
    kills = unsupported = 0
    for other in monomials:
        first = split_at_depth(other, plan.shift)[0]
        if compare(first, plan.first) <= 0:
            continue
        out = run_stages(ctx, plan.stages, first.factors, SymState(start))
        if out.is_state:
            kills += 1
        elif not out.is_zero:
            unsupported += 1
    return closes, kills, unsupported


def replay_level1(ctx: LatticeContext, spec: WeightSpec, n: int, variant_order: Sequence[str] = DEFAULT_VARIANTS) -> ReplayReport:
    """For each admissible monomial, look for an operator that keeps it, kills every
    greater first part and leaves an admissible residual."""
    check_supported(ctx, spec)
    if spec.kind != "level1":
        raise UnsupportedWeight(f"{spec.label} is not a level-1 weight")
    start = hw_weight(ctx, spec)
    monomials = enumerate_admissible(ctx, spec, n)
    kill_failures = unsupported = residual_failures = 0
    samples: List[str] = []
    for m in monomials:
        if not m:
            continue
        candidates = operator_candidates(ctx, m, start, variant_order, from_lambda1=spec.indices[0] == 1)
        verdicts = [_judge(ctx, plan, start, m, monomials) for plan in candidates]
        if any(closes and not kills and not unsup for closes, kills, unsup in verdicts):
            continue
        if not verdicts:
            residual_failures += 1
        else:
            closes, kills, unsup = verdicts[0]
            residual_failures += not closes
            kill_failures += kills
            unsupported += unsup
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


def check_successive_discrimination(ctx: LatticeContext, spec: WeightSpec, j_max: int) -> CheckReport:
    """On spinor highest weight states, a successive block (-j)...(-1) that is admissible
    ends on a state no greater block of the same shape reaches."""
    if spec.kind != "level1" or spec.indices[0] not in ctx.spinor_indices:
        raise UnsupportedWeight(f"{spec.label} is not a spinor weight")
    start = SymState(hw_weight(ctx, spec))
    checked = failures = 0
    samples: List[str] = []
    for j in range(1, j_max + 1):
        blocks = [normalize(Factor(c, depth) for depth, c in enumerate(colors, start=1)) for colors in product(ctx.gamma_set, repeat=j)]
        ends: Dict[Monomial, Outcome] = {m: run_stages(ctx, (), m.factors, start) for m in blocks}
        for m in blocks:
            if not admissible(ctx, m, spec):
                continue
            mine = ends[m]
            for other in blocks:
                if compare(other, m) <= 0:
                    continue
                checked += 1
                theirs = ends[other]
                bad = not mine.is_state or not (theirs.is_zero or (theirs.is_state and theirs.state != mine.state))
                if bad:
                    failures += 1
                    if len(samples) < SAMPLE_LIMIT:
                        samples.append(f"{m} vs {other}")
    return CheckReport(
        name="successive-discrimination",
        weight=spec.label,
        checked=checked,
        failures=failures,
        samples=samples,
        passed=failures == 0,
    )
