from fractions import Fraction

import pytest

from fsbasis.errors import UnsupportedWeight
from fsbasis.fock import FockVector, pure
from fsbasis.lattice import Color, WeightSpec
from fsbasis.tensor import (
    TensorVector,
    decompose_top,
    default_pair,
    e_lambda_pair,
    format_sigma,
    hw_vector_level2,
    hwv_report,
    killed_by_raising,
    sigma_of,
    spinor_parity,
    support_pairs,
    tensor_act,
    top_piece,
)


def _labels(pairs):
    return {(format_sigma(a), format_sigma(b)) for a, b in pairs}


def test_support_pairs(ctx4):
    assert _labels(support_pairs(ctx4, 2, (4, 4))) == {("w_{12}", "w_{1234}"), ("w_{1234}", "w_{12}")}
    assert _labels(support_pairs(ctx4, 2, (3, 3))) == {("w_{123}", "w_{124}"), ("w_{124}", "w_{123}")}
    assert support_pairs(ctx4, 2, (3, 4)) == []


def test_default_pair_and_parity(ctx4, ctx5):
    assert default_pair(ctx4, 2) == (4, 4)
    assert default_pair(ctx5, 2) == (4, 5)
    assert spinor_parity(ctx4, 4) == 0
    assert spinor_parity(ctx4, 3) == 1
    with pytest.raises(UnsupportedWeight):
        spinor_parity(ctx4, 1)


def test_top_piece_sizes(ctx5):
    assert len(top_piece(ctx5, 5)) == 16
    assert all(len(sigma_of(e.lattice)) % 2 == 1 for e in top_piece(ctx5, 5))


def test_diagonal_action(ctx4, cocycle4):
    vacuum = FockVector.of(pure(ctx4.zero()))
    v = TensorVector.product(vacuum, vacuum)
    alpha = ctx4.root_of(Color(2, 1))
    out = tensor_act(cocycle4, alpha, -1, v)
    assert out.terms == {(pure(alpha), pure(ctx4.zero())): 1, (pure(ctx4.zero()), pure(alpha)): 1}
    assert (out + out.scaled(-1)).is_zero()
    moved = e_lambda_pair(cocycle4, ctx4.omega, v)
    assert moved.terms == {(pure(ctx4.omega), pure(ctx4.omega)): 1}


def test_level2_vectors(ctx4, cocycle4):
    v = hw_vector_level2(ctx4, cocycle4, WeightSpec.pair(0, 4))
    assert list(v.terms) == [(pure(ctx4.zero()), pure(ctx4.fundamental_weights[4]))]
    fundamental = hw_vector_level2(ctx4, cocycle4, WeightSpec.fundamental(2))
    assert len(fundamental.terms) == 2
    assert all(c != 0 for c in fundamental.terms.values())
    assert killed_by_raising(ctx4, cocycle4, fundamental)


def test_fundamental_needs_rank_four(ctx5, cocycle5):
    with pytest.raises(UnsupportedWeight):
        hw_vector_level2(ctx5, cocycle5, WeightSpec.fundamental(2))


@pytest.mark.parametrize("pair", [(4, 4), (3, 3)])
def test_hwv_report(ctx4, cocycle4, pair):
    report = hwv_report(ctx4, cocycle4, WeightSpec.fundamental(2), pair)
    assert report.kernel_dimension == 1
    assert report.all_nonzero
    assert report.killed_by_raising
    assert len(report.support) == 2
    assert all(Fraction(c) != 0 for c in report.coefficients)


def test_hwv_report_support_format(ctx4, cocycle4):
    report = hwv_report(ctx4, cocycle4, WeightSpec.fundamental(2), (4, 4))
    assert report.support == ["w_{12} (x) w_{1234}", "w_{1234} (x) w_{12}"]
    assert report.pair == "L4,L4"


def _summands(report):
    return {row.weight: (row.multiplicity, row.dimension) for row in report.summands}


def test_decompose_d4(ctx4, cocycle4):
    mixed = decompose_top(ctx4, cocycle4, (3, 4))
    assert _summands(mixed) == {"w3+w4": (1, 56), "w1": (1, 8)}
    assert mixed.balanced and mixed.total_dimension == 64
    same = decompose_top(ctx4, cocycle4, (4, 4))
    assert _summands(same) == {"2w4": (1, 35), "w2": (1, 28), "0": (1, 1)}


def test_decompose_d5(ctx5, cocycle5):
    report = decompose_top(ctx5, cocycle5, (4, 5))
    assert _summands(report) == {"w4+w5": (1, 210), "w2": (1, 45), "0": (1, 1)}
    assert report.expected_dimension == 256
    assert report.balanced
