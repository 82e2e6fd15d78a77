from itertools import islice

import pytest

from fsbasis.enumeration import enumerate_admissible
from fsbasis.errors import UnsupportedWeight
from fsbasis.lattice import WeightSpec, add, scale
from fsbasis.monomial import EMPTY, parse_monomial
from fsbasis.symcalc_pairs import (
    MAX_CANDIDATES,
    PairPlan,
    PairState,
    _distributions,
    _IdentityJudge,
    _readings,
    evaluate_pair,
    judge,
    pair_candidates,
    realizations,
    replay_level2_D4,
    slot_programs,
)


def test_realizations(ctx4):
    assert [r.slots for r in realizations(ctx4, WeightSpec.pair(3, 4))] == [(3, 4), (4, 3)]
    assert [r.slots for r in realizations(ctx4, WeightSpec.pair(0, 0))] == [(0, 0)]
    fundamental = realizations(ctx4, WeightSpec.fundamental(2))
    assert [r.slots for r in fundamental] == [(4, 4), (3, 3)]
    assert all(len(r.support) == 2 for r in fundamental)


def test_readings(ctx4):
    omega = ctx4.omega
    assert _readings(ctx4, scale(2, omega)) == [(2, 0), (1, 1)]
    assert _readings(ctx4, add(omega, ctx4.fundamental_weights[4])) == [(1, 4)]
    assert _readings(ctx4, ctx4.spinor_weight({1, 2, 3})) == [(0, 3)]
    assert _readings(ctx4, ctx4.spinor_weight({1, 2})) == []


def test_distributions():
    assert len(list(_distributions(parse_monomial("g2(-1) g2(-1)")))) == 3
    assert len(list(_distributions(parse_monomial("g2(-1) g3(-1)")))) == 4


def test_quotient_drops_equal_slots(ctx4):
    w12, w1234 = ctx4.spinor_weight({1, 2}), ctx4.spinor_weight({1, 2, 3, 4})
    spec = WeightSpec.fundamental(2)
    mixed = PairPlan(((w12, w1234),), ((), ()), 0, spec, None, True, EMPTY, EMPTY)
    assert evaluate_pair(ctx4, mixed, EMPTY) == ([PairState(w12, w1234)], 0)
    equal = PairPlan(((w12, w12),), ((), ()), 0, spec, None, True, EMPTY, EMPTY)
    assert evaluate_pair(ctx4, equal, EMPTY) == ([], 0)


def test_slot_programs_start_with_identity(ctx4):
    programs = slot_programs(ctx4, ctx4.zero(), parse_monomial("g2(-1)"), 2)
    assert programs[0].stages == () and programs[0].end == ctx4.zero()
    ends = {p.end for p in programs}
    assert add(ctx4.omega, ctx4.fundamental_weights[4]) in ends
    assert scale(2, ctx4.omega) in ends


def _closes(ctx, spec, text, degree):
    m = parse_monomial(text, ctx.ell)
    monomials = enumerate_admissible(ctx, spec, degree)
    assert m in monomials
    identity = _IdentityJudge(ctx, spec) if spec.kind == "fundamental" else None
    return any(judge(ctx, plan, monomials, identity).passed for plan in islice(pair_candidates(ctx, m, spec), MAX_CANDIDATES))


@pytest.mark.parametrize(
    "label, text, degree",
    [
        ("L0+L0", "g2(-1)", 1),
        ("L0+L0", "g~2(-1)", 1),
        ("L0+L0", "g~2(-1) g2(-1)", 2),
        ("L0+L0", "g2(-1) g2(-1)", 2),
        ("L2", "g3(-1)", 1),
        ("L2", "g~3(-1)", 1),
        ("L3+L4", "g4(-1)", 1),
        ("L3+L4", "g~4(-1)", 1),
    ],
)
def test_operator_found_for_level2_monomial(ctx4, label, text, degree):
    spec = {"L0+L0": WeightSpec.pair(0, 0), "L2": WeightSpec.fundamental(2), "L3+L4": WeightSpec.pair(3, 4)}[label]
    assert _closes(ctx4, spec, text, degree)


def test_replay_level2_needs_rank_four(ctx5):
    with pytest.raises(UnsupportedWeight, match="requires rank 4"):
        replay_level2_D4(ctx5, WeightSpec.pair(0, 0), 1)


def test_replay_level2_needs_level2_weight(ctx4):
    with pytest.raises(UnsupportedWeight):
        replay_level2_D4(ctx4, WeightSpec.level1(0), 1)


def test_replay_level2_degree_zero(ctx4):
    report = replay_level2_D4(ctx4, WeightSpec.pair(0, 0), 0)
    assert report.checked == 1
    assert report.passed
