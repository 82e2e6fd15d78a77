import pytest

from fsbasis.errors import InvalidInput, UnsupportedWeight
from fsbasis.lattice import Color, WeightSpec, add, scale, unit
from fsbasis.monomial import Factor, parse_monomial
from fsbasis.symcalc import (
    Stage,
    SymState,
    act_factor_sym,
    act_zero_mode_sym,
    apply_sym,
    build_operator_level1,
    check_successive_discrimination,
    compose_operator_level1,
    decompose_state,
    first_group_op,
    format_state,
    replay_level1,
    run_stages,
    second_group_op,
    skip_ops,
)

L0 = WeightSpec.level1(0)


def state(ctx, n, sigma=None):
    lam = scale(n, ctx.omega)
    return lam if sigma is None else add(lam, ctx.spinor_weight(sigma))


def test_decompose_and_format(ctx4, ctx7):
    assert decompose_state(ctx4, state(ctx4, 2)) == (2, None)
    assert decompose_state(ctx4, ctx4.fundamental_weights[4]) == (0, frozenset({1, 2, 3, 4}))
    assert decompose_state(ctx4, state(ctx4, 1, {1, 2, 3})) == (1, frozenset({1, 2, 3}))
    assert format_state(ctx7, state(ctx7, 3, {1, 4, 6, 7})) == "e^{3w} w_{1467}"
    assert format_state(ctx4, ctx4.zero()) == "e^0"
    assert format_state(ctx4, ctx4.omega) == "e^{w}"
    with pytest.raises(InvalidInput):
        decompose_state(ctx4, ctx4.fundamental_weights[2])


def test_factor_rule(ctx4):
    g2 = Factor(Color(2, 1), 1)
    assert act_factor_sym(ctx4, g2, SymState(ctx4.zero())).state == SymState(ctx4.root_of(Color(2, 1)))
    assert act_factor_sym(ctx4, g2, SymState(ctx4.omega)).is_zero
    assert act_factor_sym(ctx4, Factor(Color(2, 1), 3), SymState(ctx4.omega)).kind == "unsupported"
    with pytest.raises(InvalidInput):
        act_factor_sym(ctx4, Factor(Color(2, 1), 0), SymState(ctx4.zero()))


def test_zero_mode_rule(ctx4):
    w12 = SymState(ctx4.spinor_weight({1, 2}))
    w1234 = SymState(ctx4.spinor_weight({1, 2, 3, 4}))
    assert act_zero_mode_sym(ctx4, add(unit(4, 3), unit(4, 4)), w12).state == w1234
    assert act_zero_mode_sym(ctx4, add(unit(4, 1), scale(-1, unit(4, 2))), w12).is_zero
    assert act_zero_mode_sym(ctx4, scale(-1, add(unit(4, 3), unit(4, 4))), w1234).state == w12
    with pytest.raises(InvalidInput):
        act_zero_mode_sym(ctx4, unit(4, 1), w12)


def test_group_operators(ctx4):
    full = range(1, 5)
    op = first_group_op(ctx4, 0, full)
    assert str(op) == "I(0;1234)"
    spinor = apply_sym(op, SymState(ctx4.zero()))
    assert spinor.state.lam == ctx4.fundamental_weights[4]
    closing = second_group_op(ctx4, 0, full)
    assert str(closing) == "I'(0;1234)"
    assert apply_sym(closing, spinor.state).state.lam == ctx4.omega
    # a greater pairing than the extracted power is zero, a smaller one undecided
    assert apply_sym(op, SymState(ctx4.omega)).is_zero
    assert apply_sym(op, SymState(scale(-1, ctx4.omega))).kind == "unsupported"


def test_skip_ops(ctx4):
    ops = skip_ops(ctx4, 0, 2)
    assert [op.kind for op in ops] == ["skip"] * 4
    out = run_stages(ctx4, (Stage(tuple(ops), 0, 2),), (), SymState(ctx4.zero()))
    assert out.state.lam == state(ctx4, 2)


def test_successive_block_on_spinor_state(ctx7):
    m = parse_monomial("g~2(-3) g~3(-2) g6(-1)", 7)
    out = run_stages(ctx7, (), m.factors, SymState(ctx7.spinor_weight({1, 2, 3, 4, 7})))
    assert out.state.lam == state(ctx7, 3, {1, 4, 6, 7})


def test_operator_skips_on_lambda1(ctx4):
    plan = build_operator_level1(ctx4, parse_monomial("g3(-2)"), WeightSpec.level1(1))
    assert (plan.case, plan.shift, plan.target) == ("skip", 1, 0)
    assert plan.stages[0].pre == ()
    assert not plan.first


def test_opposite_pair_block(ctx4):
    plan = build_operator_level1(ctx4, parse_monomial("g~2(-1) g2(-1)"), L0)
    assert (plan.case, plan.shift, plan.target) == ("d", 2, 0)
    assert plan.describe() == "d [id] -> e^{2w} L0"


def test_operator_rejects_inadmissible(ctx4):
    with pytest.raises(InvalidInput):
        build_operator_level1(ctx4, parse_monomial("g2(-1) g2(-1)"), L0)
    with pytest.raises(UnsupportedWeight):
        build_operator_level1(ctx4, parse_monomial("g2(-1)"), WeightSpec.pair(0, 0))


def test_operator_raises_when_nothing_lands(ctx4, monkeypatch):
    monkeypatch.setattr("fsbasis.symcalc._lands", lambda *args, **kwargs: False)
    with pytest.raises(InvalidInput, match="no operator closes"):
        build_operator_level1(ctx4, parse_monomial("g~2(-1) g2(-1)"), L0)


def test_composed_chain(ctx6):
    m = parse_monomial("g~2(-7) g~4(-6) g~3(-3) g5(-2) g3(-1)", 6)
    chain = compose_operator_level1(ctx6, m, L0, ("I2", "I1", "I3"))
    full = range(1, 7)
    expected = [
        state(ctx6, 0, {1, 2, 4, 6}),
        state(ctx6, 1, {1, 2, 3, 4, 6}),
        state(ctx6, 2, full),
        state(ctx6, 3, {1, 2, 4, 5, 6}),
        state(ctx6, 4),
        state(ctx6, 4, full),
        state(ctx6, 5),
        state(ctx6, 5, full),
        state(ctx6, 6, {1, 2, 3, 5, 6}),
        state(ctx6, 7, {1, 3, 5, 6}),
        state(ctx6, 8),
    ]
    assert list(chain.trace) == expected
    assert [(p.case, p.variant) for p in chain.plans] == [("a", "I2"), ("spinor", None), ("skip", None), ("b", None)]
    assert chain.final == state(ctx6, 8)


@pytest.mark.parametrize("weight, degree", [(L0, 0), (L0, 1), (WeightSpec.level1(1), 2)])
def test_replay_passes(ctx4, weight, degree):
    report = replay_level1(ctx4, weight, degree)
    assert report.passed, report.samples
    assert "samples" not in report.to_json()


def test_replay_needs_level1(ctx4):
    with pytest.raises(UnsupportedWeight):
        replay_level1(ctx4, WeightSpec.pair(0, 0), 1)


@pytest.mark.parametrize("index", [3, 4])
def test_successive_discrimination(ctx4, index):
    report = check_successive_discrimination(ctx4, WeightSpec.level1(index), 2)
    assert report.passed, report.samples
    assert report.checked > 0


def test_successive_discrimination_needs_spinor(ctx4):
    with pytest.raises(UnsupportedWeight):
        check_successive_discrimination(ctx4, L0, 1)
