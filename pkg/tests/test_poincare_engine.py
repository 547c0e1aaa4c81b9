import itertools

import pytest

from src.errors import DimensionMismatch, UnknownBranch, UnknownComponent
from src.utils.power_series import FactorForm, expand
from src.workers.curve_resolver import resolve
from src.workers.poincare_engine import (
    FiltrationIndex,
    FiltrationSpec,
    alexander_from_strata,
    mixed_poincare,
    multiplicity_vectors,
    poincare_from_graph,
    poincare_of_filtration,
    strata,
    zeta_and_alexander,
)
from tests.conftest import branch

CUSP_P = FactorForm(1, [((2,), None, -1), ((3,), None, -1), ((6,), None, 1)])
CUSP_K = {"E1": 2, "E2": 3, "E3": 6}


def test_cusp_curve_series(cusp_rc):
    assert poincare_of_filtration(cusp_rc, FiltrationSpec.of(branches=["C"])) == CUSP_P
    assert mixed_poincare(cusp_rc, [], ["C"]) == CUSP_P
    assert poincare_from_graph(cusp_rc.graph, [CUSP_K]) == CUSP_P


def test_2_5_curve_series():
    rc = resolve([branch("C", 2, (5, 1))])
    p = poincare_of_filtration(rc, FiltrationSpec.of(branches=["C"]))
    assert p == FactorForm(1, [((2,), None, -1), ((5,), None, -1), ((10,), None, 1)])


def test_divisorial_series_ignores_arrows(cusp_rc):
    p = poincare_of_filtration(cusp_rc, FiltrationSpec.of(components=["E3"]))
    assert p == FactorForm(1, [((2,), None, -1), ((3,), None, -1)])


def test_hopf_series_is_one(hopf_rc):
    assert poincare_of_filtration(hopf_rc, FiltrationSpec.of(branches=["L1", "L2"])).is_one()


def test_cusp_and_transverse_line(cusp_line_rc):
    p = poincare_of_filtration(cusp_line_rc, FiltrationSpec.of(branches=["C", "L"]))
    assert p == FactorForm(2, [((3, 1), None, -1), ((6, 2), None, 1)])
    swapped = poincare_of_filtration(cusp_line_rc, FiltrationSpec.of(branches=["L", "C"]))
    assert swapped == FactorForm(2, [((1, 3), None, -1), ((2, 6), None, 1)])


def test_index_order_follows_filtration(cusp_line_rc):
    spec = FiltrationSpec((FiltrationIndex("curve", "L"), FiltrationIndex("divisorial", "E2")))
    assert spec.r == 2
    assert spec.branches() == ["L"]
    assert spec.components() == ["E2"]
    # only L punctures: E2 is the one component left with chi != 0
    p = poincare_of_filtration(cusp_line_rc, spec)
    assert p == FactorForm(2, [((1, 2), None, -1)])


def test_unknown_references(cusp_rc):
    with pytest.raises(UnknownComponent):
        poincare_of_filtration(cusp_rc, FiltrationSpec.of(components=["E9"]))
    with pytest.raises(UnknownBranch):
        poincare_of_filtration(cusp_rc, FiltrationSpec.of(branches=["Z"]))
    with pytest.raises(UnknownBranch):
        mixed_poincare(cusp_rc, [], ["Z"])
    with pytest.raises(DimensionMismatch):
        poincare_of_filtration(cusp_rc, FiltrationSpec((FiltrationIndex("arc", "C"),)))


def test_multiplicity_vectors(cusp_rc, e8_graph):
    assert multiplicity_vectors(cusp_rc.graph, [CUSP_K, [1, 1, 1]]) == {
        "E1": (2, 1), "E2": (3, 1), "E3": (6, 1)}
    assert multiplicity_vectors(e8_graph, ["maximal"])["E3"] == (6,)
    with pytest.raises(DimensionMismatch):
        multiplicity_vectors(cusp_rc.graph, ["maximal"])
    with pytest.raises(DimensionMismatch):
        multiplicity_vectors(cusp_rc.graph, [[1, 1]])
    with pytest.raises(DimensionMismatch):
        multiplicity_vectors(cusp_rc.graph, [[1, -1, 1]])
    with pytest.raises(UnknownComponent):
        multiplicity_vectors(cusp_rc.graph, [{"E7": 1}])


def test_non_integral_column_needs_equivariant_formula(a1_graph):
    with pytest.raises(DimensionMismatch):
        poincare_of_filtration(a1_graph, FiltrationSpec.of(components=["E1"]))


def test_strata_match_product(cusp_rc):
    assert strata(cusp_rc.graph, [CUSP_K]) == {(2,): 1, (3,): 1, (6,): -1}
    assert alexander_from_strata(cusp_rc.graph, [CUSP_K]) == CUSP_P


def test_strata_merge_equal_multiplicities(a2_graph):
    # both components carry k = 1
    assert strata(a2_graph, [[1, 1]]) == {(1,): 2}
    assert alexander_from_strata(a2_graph, [[1, 1]]) == FactorForm(1, [((1,), None, -2)])


def test_zeta_and_alexander_one_index():
    za = zeta_and_alexander(CUSP_P)
    assert za.zeta == CUSP_P
    assert expand(za.alexander, 10).coefficients() == [1, -1, 1] + [0] * 8


def test_zeta_and_alexander_two_indices(cusp_line_rc):
    p = poincare_of_filtration(cusp_line_rc, FiltrationSpec.of(branches=["C", "L"]))
    za = zeta_and_alexander(p)
    assert za.alexander == p
    assert za.zeta == FactorForm(1, [((4,), None, -1), ((8,), None, 1)])
    with pytest.raises(DimensionMismatch):
        zeta_and_alexander(p, 1)


@pytest.mark.parametrize("branches", [
    [branch("C", 2, (3, 1)), branch("L", 1, swapped=True)],
    [branch("C", 2, (3, 1)), branch("L", 1)],
    [branch("L1", 1), branch("L2", 1, swapped=True), branch("L3", 1, (1, 1))],
])
def test_mixed_series_matches_a_fresh_resolution_of_the_subset(branches):
    rc = resolve(branches)
    for size in range(1, len(branches) + 1):
        for subset in itertools.combinations(rc.branch_names, size):
            fresh = resolve([b for b in branches if b.name in subset])
            expected = poincare_from_graph(fresh.graph, [fresh.valuation_vector(j) for j in subset])
            assert expand(mixed_poincare(rc, [], list(subset)), 12) == expand(expected, 12)
