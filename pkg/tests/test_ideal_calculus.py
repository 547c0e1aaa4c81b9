from fractions import Fraction

import pytest

from src.errors import (
    DimensionMismatch,
    HypothesisViolated,
    NonIntegralPresentation,
    UnknownBranch,
    UnknownComponent,
)
from src.utils.power_series import FactorForm
from src.workers.ideal_calculus import (
    IdealPresentation,
    divisorial_exponents_from_multiplicities,
    dsigma_rescale,
    ideal_graph,
    mixed_base,
    multiplicity_vector,
    poincare_of_ideal,
    poincare_of_ideal_set,
    poincare_of_presentation,
    validate_presentation,
)
from src.workers.poincare_engine import poincare_from_graph
from src.workers.resolution_graph import RATIONAL_SINGULARITY, linking_data

CUSP_P = FactorForm(1, [((2,), None, -1), ((3,), None, -1), ((6,), None, 1)])


def test_divisorial_presentation_matches_graph_formula(cusp_rc):
    g = cusp_rc.graph.with_arrows([])
    ld = linking_data(g)
    base = mixed_base(g, (), ld)
    for n in ([0, 0, 1], [1, 0, 0], [2, 1, 3]):
        ip = IdealPresentation(dict(zip(g.ids, n)))
        k = [int(x) for x in divisorial_exponents_from_multiplicities(ld, n)]
        assert poincare_of_ideal(ip, base) == poincare_from_graph(g, [k])


def test_maximal_divisor_of_cusp(cusp_rc):
    g = cusp_rc.graph.with_arrows([])
    p = poincare_of_ideal(IdealPresentation({"E3": 1}), mixed_base(g))
    assert p == FactorForm(1, [((2,), None, -1), ((3,), None, -1)])


def test_curve_ideal_reproduces_curve_series(cusp_rc):
    assert poincare_of_presentation(cusp_rc.graph, IdealPresentation({}, {"C": 1})) == CUSP_P


def test_mixed_presentation(cusp_rc):
    ip = IdealPresentation({"E3": 1}, {"C": 1})
    ld = linking_data(cusp_rc.graph)
    assert multiplicity_vector(ld, cusp_rc.graph, ip) == [4, 6, 12]
    p = poincare_of_presentation(cusp_rc.graph, ip)
    assert p == FactorForm(1, [((4,), None, -1), ((6,), None, -1), ((12,), None, 1)])


def test_ideal_set_of_two_curves(cusp_line_rc):
    g = cusp_line_rc.graph
    base = mixed_base(g, ["C", "L"])
    ips = [IdealPresentation({}, {"C": 1}), IdealPresentation({}, {"L": 1})]
    assert poincare_of_ideal_set(ips, base) == FactorForm(2, [((3, 1), None, -1), ((6, 2), None, 1)])


def test_curve_with_zero_exponent_everywhere(cusp_line_rc):
    base = mixed_base(cusp_line_rc.graph, ["C", "L"])
    with pytest.raises(HypothesisViolated):
        poincare_of_ideal(IdealPresentation({"E1": 1}, {"C": 1, "L": 0}), base)


def test_trivial_presentation_is_one(cusp_rc):
    base = mixed_base(cusp_rc.graph.with_arrows([]))
    assert poincare_of_ideal(IdealPresentation(), base).is_one()
    assert IdealPresentation({"E1": 0}, {}).is_trivial()


def test_ideal_set_errors(cusp_rc):
    base = mixed_base(cusp_rc.graph.with_arrows([]))
    with pytest.raises(DimensionMismatch):
        poincare_of_ideal_set([], base)
    with pytest.raises(UnknownComponent):
        poincare_of_ideal(IdealPresentation({"E9": 1}), base)
    with pytest.raises(UnknownBranch):
        poincare_of_ideal(IdealPresentation({}, {"C": 1}), base)
    with pytest.raises(NonIntegralPresentation):
        poincare_of_ideal(IdealPresentation({"E1": Fraction(1, 2)}), base)


def test_validate_presentation(cusp_rc, a1_graph):
    g = cusp_rc.graph
    with pytest.raises(UnknownComponent):
        validate_presentation(g, IdealPresentation({"E9": 1}))
    with pytest.raises(UnknownBranch):
        validate_presentation(g, IdealPresentation({}, {"Z": 1}))
    with pytest.raises(NonIntegralPresentation):
        validate_presentation(g, IdealPresentation({"E1": -1}))
    with pytest.raises(NonIntegralPresentation):
        validate_presentation(g, IdealPresentation({"E1": Fraction(1, 2)}))

    half = IdealPresentation({"E1": Fraction(1, 2)})
    assert validate_presentation(a1_graph, half, RATIONAL_SINGULARITY) is half
    with pytest.raises(NonIntegralPresentation):
        validate_presentation(a1_graph, IdealPresentation({"E1": Fraction(1, 3)}), RATIONAL_SINGULARITY)


def test_a1_exponents_are_fractional(a1_graph):
    ld = linking_data(a1_graph)
    assert divisorial_exponents_from_multiplicities(ld, [1]) == [Fraction(1, 2)]
    with pytest.raises(DimensionMismatch):
        divisorial_exponents_from_multiplicities(ld, [1, 1])


def test_ideal_graph_keeps_only_vanishing_curves(cusp_line_rc):
    g = ideal_graph(cusp_line_rc.graph, IdealPresentation({}, {"C": 2, "L": 0}))
    assert [a.label for a in g.arrows] == ["C"]


def test_dsigma_rescale():
    assert dsigma_rescale(CUSP_P, 2) == FactorForm(1, [((4,), None, -1), ((6,), None, -1), ((12,), None, 1)])
    assert dsigma_rescale(CUSP_P, 1) == CUSP_P
    with pytest.raises(DimensionMismatch):
        dsigma_rescale(CUSP_P, 0)
