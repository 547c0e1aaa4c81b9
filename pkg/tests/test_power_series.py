from fractions import Fraction
from math import comb

import pytest

from src.errors import DegenerateSubstitution, DimensionMismatch, TruncationLoss
from src.utils.group_ring import Character, GroupRingElement
from src.utils.power_series import (
    FactorForm,
    Series,
    expand,
    factor_coefficient,
    guaranteed_truncation,
    identify_variables,
    mul_poly,
    permute_variables,
    substitute,
)

CUSP = FactorForm(1, [((2,), None, -1), ((3,), None, -1), ((6,), None, 1)])


def test_factor_coefficient():
    assert factor_coefficient(-2, 3) == comb(4, 3)
    assert factor_coefficient(2, 1) == -2
    assert factor_coefficient(2, 3) == 0
    assert factor_coefficient(0, 0) == 1


def test_factor_form_is_canonical():
    f = FactorForm(1, [((3,), None, -1), ((2,), None, -1), ((6,), None, 1), ((2,), None, 0)])
    assert f == CUSP
    assert FactorForm(1, [((2,), None, -1), ((2,), None, 1)]).is_one()
    trivial = Character((Fraction(0),))
    assert FactorForm(1, [((2,), trivial, -1)]) == FactorForm(1, [((2,), None, -1)])


def test_factor_form_rejects_bad_keys():
    with pytest.raises(DimensionMismatch):
        FactorForm(1, [((0,), None, 1)])
    with pytest.raises(DimensionMismatch):
        FactorForm(2, [((1,), None, 1)])


def test_factor_form_render():
    assert CUSP.render() == "(1 - t^2)^-1 (1 - t^3)^-1 (1 - t^6)"
    assert FactorForm.one(2).render() == "1"
    assert FactorForm(2, [((3, 1), None, -1)]).render() == "(1 - t1^3 t2)^-1"
    tagged = FactorForm(1, [((2,), Character((Fraction(1, 2),)), -2)])
    assert tagged.render() == "(1 - [1/2] t^2)^-2"


def test_factor_form_dict_round_trip():
    tagged = FactorForm(1, [((2,), Character((Fraction(1, 2),)), -2), ((1,), None, 1)])
    assert FactorForm.from_dict(tagged.to_dict()) == tagged


def test_expand_cusp():
    s = expand(CUSP, 10)
    assert s.coefficients() == [1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1]
    assert s.render() == "1 + t^2 + t^3 + t^4 + t^5 + t^6 + t^7 + t^8 + t^9 + t^10"


def test_expand_with_box():
    f = FactorForm(2, [((1, 0), None, -1), ((0, 1), None, -1)])
    s = expand(f, 10, box=[2, 3])
    assert len(s.terms) == 12
    assert s.coefficient((2, 3)) == 1
    assert s.coefficient((3, 0)) == 0


def test_expand_tagged_coefficients():
    half = Character((Fraction(1, 2),))
    s = expand(FactorForm(1, [((2,), half, -2)]), 8)
    for ell in range(5):
        assert s.coefficient((2 * ell,)) == GroupRingElement.of(half ** ell, ell + 1)
    assert not s.coefficient((3,))


def test_mul_poly_by_one_minus_t():
    s = mul_poly(expand(CUSP, 12), {(0,): 1, (1,): -1})
    assert s.coefficients() == [1, -1, 1] + [0] * 10


def test_series_arithmetic():
    a = Series.from_coefficients([1, 2, 3])
    b = Series.from_coefficients([1, 1, 1, 1])
    assert (a + b).truncation == 2
    assert (a + b).coefficients() == [2, 3, 4]
    assert (a - a).terms == {}
    assert (a * b).coefficients() == [1, 3, 6]
    with pytest.raises(DimensionMismatch):
        a + Series.one(2, 2)


def test_series_dict_round_trip():
    half = Character((Fraction(1, 2),))
    s = expand(FactorForm(1, [((2,), half, -1)]), 6)
    assert Series.from_dict(s.to_dict()) == s
    t = expand(CUSP, 9, box=[7])
    assert Series.from_dict(t.to_dict()) == t


def test_substitute_factor_form_is_exact():
    p = FactorForm(2, [((3, 1), None, -1), ((6, 2), None, 1)])
    assert identify_variables(p) == FactorForm(1, [((4,), None, -1), ((8,), None, 1)])
    assert substitute(CUSP, [[2]]) == FactorForm(1, [((4,), None, -1), ((6,), None, -1), ((12,), None, 1)])


def test_substitute_zero_key_is_degenerate():
    with pytest.raises(DegenerateSubstitution):
        substitute(FactorForm(2, [((1, 0), None, -1)]), [[0], [1]])


def test_substitute_series_flags_truncation_loss():
    s = expand(FactorForm(1, [((1,), None, -1)]), 5)
    assert guaranteed_truncation(s, [[2]]) == 11
    with pytest.warns(TruncationLoss):
        out = substitute(s, [[2]], truncation=20)
    assert out.truncation == 11
    assert out.coefficient((10,)) == 1
    assert out.coefficient((11,)) == 0


def test_substitute_series_degenerate_variable():
    s = Series(2, 4, {(1, 0): 1, (0, 1): 1})
    with pytest.raises(DegenerateSubstitution):
        substitute(s, [[0], [1]])


def test_permute_variables():
    f = FactorForm(2, [((3, 1), None, -1)])
    assert permute_variables(f, [1, 0]) == FactorForm(2, [((1, 3), None, -1)])
    s = Series(2, 4, {(1, 2): 5}, box=[1, 3])
    p = permute_variables(s, [1, 0])
    assert p.coefficient((2, 1)) == 5
    assert p.box == (3, 1)
    with pytest.raises(DimensionMismatch):
        permute_variables(f, [0, 0])


def test_symmetric_power_identity_small():
    for chi in (1, 2, 3):
        s = expand(FactorForm(1, [((1,), None, -chi)]), 10)
        assert s.coefficients() == [comb(chi + ell - 1, ell) for ell in range(11)]


def test_substitute_series_rejects_trivial_image_of_absent_variable():
    s = Series(2, 4, {(1, 0): 1, (2, 0): 3})
    with pytest.raises(DegenerateSubstitution):
        substitute(s, [[1], [0]])


def _random_factors(rng, r, count, tags=()):
    factors = []
    for _ in range(count):
        k = [rng.randint(0, 3) for _ in range(r)]
        if not any(k):
            k[rng.randrange(r)] = 1
        tag = rng.choice([None, *tags]) if tags else None
        factors.append((tuple(k), tag, rng.choice([-2, -1, 1, 2])))
    return factors


@pytest.mark.parametrize("r", [1, 2])
def test_expand_is_multiplicative(rng, r):
    for _ in range(10):
        f = FactorForm(r, _random_factors(rng, r, 3))
        g = FactorForm(r, _random_factors(rng, r, 3))
        assert expand(f * g, 8) == expand(f, 8) * expand(g, 8)


@pytest.mark.parametrize("mapping", [[[1], [2]], [[2], [3]], [[1, 1], [0, 1]], [[1, 0], [1, 2]]])
def test_substitute_commutes_with_expand(rng, mapping):
    for _ in range(5):
        f = FactorForm(2, _random_factors(rng, 2, 3))
        assert expand(substitute(f, mapping), 8) == substitute(expand(f, 8), mapping, 8)


def test_factor_order_does_not_change_the_canonical_form(rng):
    tags = [Character((Fraction(1, 3),)), Character((Fraction(2, 3),))]
    for _ in range(10):
        factors = _random_factors(rng, 2, 5, tags)
        shuffled = list(factors)
        rng.shuffle(shuffled)
        f, g = FactorForm(2, factors), FactorForm(2, shuffled)
        assert f == g
        assert f.render() == g.render()
        assert f.to_dict() == g.to_dict()
