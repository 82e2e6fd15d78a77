import pytest

from fsbasis.conditions import (
    admissible,
    cliques,
    dc1_pair,
    dc_level1,
    dc_level1_freq,
    dc_level2_freq,
    encoded_conditions,
    exceptional_blocks,
    has_conflict_triangle,
    ic_level1,
    ic_level2,
    split_ic,
    split_level2,
    two_colorings,
)
from fsbasis.enumeration import colored_partitions
from fsbasis.errors import InvalidInput
from fsbasis.lattice import WeightSpec, build_context, level2_weights
from fsbasis.monomial import multiply, parse_factor, parse_monomial

L0 = WeightSpec.level1(0)
L1 = WeightSpec.level1(1)


@pytest.mark.parametrize(
    "left, right, ok",
    [
        ("g~2(-1)", "g2(-1)", True),
        ("g2(-1)", "g2(-1)", False),
        ("g3(-2)", "g2(-1)", True),
        ("g2(-2)", "g2(-1)", False),
        ("g4(-2)", "g~4(-1)", True),
        ("g2(-3)", "g2(-1)", True),
    ],
)
def test_dc1_pair(ctx4, left, right, ok):
    assert dc1_pair(ctx4, parse_factor(left), parse_factor(right)) is ok


def test_dc1_pair_requires_depth_order(ctx4):
    with pytest.raises(InvalidInput):
        dc1_pair(ctx4, parse_factor("g2(-1)"), parse_factor("g2(-2)"))


def test_dc_level1_rejects_imaginary(ctx4):
    with pytest.raises(InvalidInput):
        dc_level1(ctx4, parse_monomial("g2(0)"))


def _up_to(ctx, n_max):
    for n in range(n_max + 1):
        yield from colored_partitions(ctx, n)


def test_frequency_form_matches_pairs(ctx4):
    for text in ("g2(-2) g2(-1)", "g3(-2) g2(-1)"):
        m = parse_monomial(text)
        assert dc_level1_freq(ctx4, m) == dc_level1(ctx4, m)


@pytest.mark.slow
@pytest.mark.parametrize("ctx_name, n_max", [("ctx4", 8), ("ctx5", 6)])
def test_frequency_form_matches_pairs_everywhere(request, ctx_name, n_max):
    ctx = request.getfixturevalue(ctx_name)
    mismatched = [str(m) for m in _up_to(ctx, n_max) if dc_level1_freq(ctx, m) != dc_level1(ctx, m)]
    assert mismatched == []


def test_level2_frequency_bound(ctx4):
    assert dc_level2_freq(ctx4, parse_monomial("g2(-1) g2(-1)"))
    assert not dc_level2_freq(ctx4, parse_monomial("g2(-1) g2(-1) g2(-1)"))


def test_clique_count(ctx4):
    assert len(cliques(4)) == 10


def test_initial_conditions_level1(ctx4):
    single = parse_monomial("g2(-1)")
    assert ic_level1(ctx4, single, L0)
    assert not ic_level1(ctx4, single, L1)
    assert ic_level1(ctx4, parse_monomial("g2(-2)"), L1)
    assert not ic_level1(ctx4, single, WeightSpec.level1(4))
    assert ic_level1(ctx4, parse_monomial("g~2(-1)"), WeightSpec.level1(4))


def test_initial_conditions_level2(ctx4):
    assert ic_level2(ctx4, parse_monomial("g2(-1) g2(-1)"), WeightSpec.pair(0, 0))
    assert not ic_level2(ctx4, parse_monomial("g2(-1) g2(-1) g2(-1)"), WeightSpec.pair(0, 0))
    assert not ic_level2(ctx4, parse_monomial("g2(-1)"), WeightSpec.fundamental(2))


def test_admissible(ctx4):
    assert admissible(ctx4, parse_monomial("g~2(-1) g2(-1)"), L0)
    assert not admissible(ctx4, parse_monomial("g2(-1) g2(-1)"), L0)
    assert admissible(ctx4, parse_monomial("g2(-1) g2(-1)"), WeightSpec.pair(0, 0))


def test_encoded_conditions_agree(ctx4):
    assert encoded_conditions(ctx4, parse_monomial("g~2(-1) g2(-1)"), L0)
    assert not encoded_conditions(ctx4, parse_monomial("g2(-1)"), L1)


def test_conflict_triangle_and_blocks(ctx4):
    assert has_conflict_triangle(ctx4, parse_monomial("g2(-1) g2(-1) g2(-1)"))
    blocks = exceptional_blocks(ctx4, parse_monomial("g3(-2) g~3(-1) g3(-1)"))
    assert len(blocks) == 1
    assert (blocks[0].pattern, blocks[0].index, blocks[0].depth, blocks[0].pair_depth) == (1, 3, 1, 1)


def test_split_level2(ctx4):
    m = parse_monomial("g2(-1) g2(-1)")
    first, second = split_level2(ctx4, m)
    assert str(first) == str(second) == "g2(-1)"
    with pytest.raises(InvalidInput):
        split_level2(ctx4, parse_monomial("g2(-1) g2(-1) g2(-1)"))


def test_split_ic(ctx4):
    first, second = split_ic(ctx4, parse_monomial("g2(-1) g2(-1)"), L0, L0)
    assert str(first) == str(second) == "g2(-1)"
    assert split_ic(ctx4, parse_monomial("g2(-1)"), L1, L1) is None


def test_two_colorings(ctx4):
    same = two_colorings(ctx4, parse_monomial("g2(-1) g2(-1)"))
    assert len(same) == 1
    splits = two_colorings(ctx4, parse_monomial("g2(-2) g~2(-1)"))
    assert {(str(a), str(b)) for a, b in splits} == {("g~2(-1)", "g2(-2)"), ("g2(-2)", "g~2(-1)")}
    assert two_colorings(ctx4, parse_monomial("g2(-1) g2(-1) g2(-1)")) == []


@pytest.mark.parametrize(
    "ell, text, first, second",
    [
        (
            5,
            "g3(-4) g~4(-2) g5(-2) g~5(-1) g3(-1)",
            "g3(-4) g5(-2) g3(-1)",
            "g~4(-2) g~5(-1)",
        ),
        (
            6,
            "g3(-7) g~5(-6) g~4(-5) g6(-5) g~6(-4) g6(-4) g~6(-3) g6(-3) g~6(-2) g6(-2) g5(-1) g3(-1)",
            "g3(-7) g~4(-5) g6(-4) g~6(-3) g6(-2) g3(-1)",
            "g~5(-6) g6(-5) g~6(-4) g6(-3) g~6(-2) g5(-1)",
        ),
    ],
)
def test_split_level2_worked_examples(ell, text, first, second):
    ctx = build_context(ell)
    parts = split_level2(ctx, parse_monomial(text, ell))
    assert (str(parts[0]), str(parts[1])) == (first, second)


@pytest.mark.slow
def test_split_level2_is_sound(ctx4):
    unsplit = 0
    for m in _up_to(ctx4, 8):
        if not dc_level2_freq(ctx4, m):
            continue
        parts = split_level2(ctx4, m)
        if parts is None:
            assert exceptional_blocks(ctx4, m), str(m)
            unsplit += 1
            continue
        first, second = parts
        assert dc_level1(ctx4, first) and dc_level1(ctx4, second), str(m)
        assert multiply(first, second) == m
    assert unsplit > 0


@pytest.mark.slow
@pytest.mark.parametrize("spec", [w for w in level2_weights(4) if w.kind == "sum"], ids=str)
def test_level2_initial_conditions_split(ctx4, spec):
    first, second = spec.components()
    for m in _up_to(ctx4, 6):
        if not dc_level2_freq(ctx4, m):
            continue
        assert ic_level2(ctx4, m, spec) == (split_ic(ctx4, m, first, second) is not None), str(m)
