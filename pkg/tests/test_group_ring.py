from fractions import Fraction

from src.utils.exact_linalg import int_matrix, smith_normal_form
from src.utils.group_ring import Character, FiniteAbelianGroup, GroupRingElement

HALF = Fraction(1, 2)


def test_character_values_reduced_mod_one():
    c = Character((Fraction(-1, 2), Fraction(5, 3)))
    assert c.values == (HALF, Fraction(2, 3))
    assert c.order() == 6
    assert c.render() == "[1/2, 2/3]"


def test_character_arithmetic():
    a = Character((HALF,))
    assert (a * a).is_trivial()
    assert (a ** 3) == a
    assert Character.trivial(2).is_trivial()
    assert a.evaluate([3]) == HALF


def test_character_list_round_trip():
    c = Character((Fraction(1, 3), Fraction(0)))
    assert Character.from_list(c.to_list()) == c


def test_group_ring_arithmetic():
    a = Character((HALF,))
    x = GroupRingElement.of(a, 2)
    one = GroupRingElement.unit(1)
    assert x * x == 4
    assert (x + 1).trivial_part() == 1
    assert (x + 1).coefficient(a) == 2
    assert not (x - x)
    assert one * x == x
    assert 3 * one == 3
    assert (1 - one) == 0


def test_group_ring_render():
    a = Character((HALF,))
    assert GroupRingElement.of(a, 3).render() == "3[1/2]"
    assert GroupRingElement((), 1).render() == "0"


def test_group_ring_list_round_trip():
    x = GroupRingElement.of(Character((HALF,)), 2) + 5
    assert GroupRingElement.from_list(x.to_list(), 1) == x


def test_a1_group():
    group = FiniteAbelianGroup.from_smith_form(smith_normal_form(int_matrix([[2]])))
    assert group.invariant_factors == (2,)
    assert group.order() == 2
    assert group.generator_order(0) == 2


def test_a2_group_and_characters():
    group = FiniteAbelianGroup.from_smith_form(smith_normal_form(int_matrix([[2, -1], [-1, 2]])))
    assert group.invariant_factors == (3,)
    assert group.order() == 3
    assert group.generator_order(0) == 3
    assert group.generator_order(1) == 3

    # alpha_1 = -(row 1 of M) with M = 1/3 [[2, 1], [1, 2]]
    alpha = Character((Fraction(-2, 3), Fraction(-1, 3)))
    assert group.annihilates(alpha, [[2, -1], [-1, 2]])
    assert not group.annihilates(Character((Fraction(1, 3), Fraction(0))), [[2, -1], [-1, 2]])
    coords = group.character_coordinates(alpha)
    assert len(coords) == 1 and coords[0].denominator == 3


def test_unimodular_group_is_trivial():
    group = FiniteAbelianGroup.from_smith_form(
        smith_normal_form(int_matrix([[3, 0, -1], [0, 2, -1], [-1, -1, 1]])))
    assert group.is_trivial()
    assert group.order() == 1
