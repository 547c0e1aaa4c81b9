# src/utils/group_ring.py
"""
Finite abelian groups given as cokernels, their characters and the group
ring Z[H^] used as coefficient ring of equivariant series.

A character is stored by its values on the generators h_1..h_n of H
(one per graph component) as a vector of rationals mod 1: the value
q means exp(2 pi i q). Arithmetic stays exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from sympy.polys.matrices import DomainMatrix

from src.errors import NotWellDefined
from src.utils.exact_linalg import SmithForm, invert, to_rows
from src.utils.parsing import format_rational, parse_rational


def _mod1(q) -> Fraction:
    q = Fraction(q)
    return q - (q.numerator // q.denominator)


# =========================================================
# CHARACTERS
# =========================================================
@dataclass(frozen=True, order=True)
class Character:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_mod1(v) for v in self.values))

    @classmethod
    def trivial(cls, rank: int) -> "Character":
        return cls(tuple(Fraction(0) for _ in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.values)

    def is_trivial(self) -> bool:
        return all(v == 0 for v in self.values)

    def __mul__(self, other: "Character") -> "Character":
        if self.rank != other.rank:
            raise NotWellDefined("characters live on different groups")
        return Character(tuple(a + b for a, b in zip(self.values, other.values)))

    def __pow__(self, n: int) -> "Character":
        return Character(tuple(n * v for v in self.values))

    def order(self) -> int:
        return lcm(1, *(v.denominator for v in self.values))

    def evaluate(self, coordinates: Sequence[int]) -> Fraction:
        """Value on the element sum_i c_i h_i, as a rational mod 1."""
        return _mod1(sum(c * v for c, v in zip(coordinates, self.values)))

    def render(self) -> str:
        return "[" + ", ".join(format_rational(v) for v in self.values) + "]"

    def to_list(self) -> list[str]:
        return [format_rational(v) for v in self.values]

    @classmethod
    def from_list(cls, raw: Iterable[str]) -> "Character":
        vals = []
        for x in raw:
            q = parse_rational(x)
            if q is None:
                raise ValueError(f"bad character value {x!r}")
            vals.append(q)
        return cls(tuple(vals))


# =========================================================
# GROUP RING Z[H^]
# =========================================================
@dataclass(frozen=True, eq=False)
class GroupRingElement:
    """Finite integer combination of characters, no zero coefficients."""

    terms: tuple[tuple[Character, int], ...]
    rank: int

    @classmethod
    def from_mapping(cls, terms: Mapping[Character, int], rank: int) -> "GroupRingElement":
        clean = tuple(sorted((c, n) for c, n in terms.items() if n != 0))
        return cls(clean, rank)

    @classmethod
    def unit(cls, rank: int) -> "GroupRingElement":
        return cls.from_mapping({Character.trivial(rank): 1}, rank)

    @classmethod
    def of(cls, character: Character, coefficient: int = 1) -> "GroupRingElement":
        return cls.from_mapping({character: coefficient}, character.rank)

    def as_dict(self) -> dict[Character, int]:
        return dict(self.terms)

    def _coerce(self, other) -> "GroupRingElement":
        if isinstance(other, GroupRingElement):
            return other
        if isinstance(other, int):
            return GroupRingElement.from_mapping({Character.trivial(self.rank): other}, self.rank)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = self.as_dict()
        for c, n in other.terms:
            acc[c] = acc.get(c, 0) + n
        return GroupRingElement.from_mapping(acc, self.rank)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement(tuple((c, -n) for c, n in self.terms), self.rank)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Character, int] = {}
        for c1, n1 in self.terms:
            for c2, n2 in other.terms:
                c = c1 * c2
                acc[c] = acc.get(c, 0) + n1 * n2
        return GroupRingElement.from_mapping(acc, self.rank)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def coefficient(self, character: Character) -> int:
        return self.as_dict().get(character, 0)

    def trivial_part(self) -> int:
        return self.coefficient(Character.trivial(self.rank))

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"{n}{c.render()}" for c, n in self.terms]
        return parts[0] if len(parts) == 1 else "(" + " + ".join(parts) + ")"

    def to_list(self) -> list[dict]:
        return [{"character": c.to_list(), "coefficient": n} for c, n in self.terms]

    @classmethod
    def from_list(cls, raw: list[dict], rank: int) -> "GroupRingElement":
        acc: dict[Character, int] = {}
        for item in raw:
            c = Character.from_list(item["character"])
            acc[c] = acc.get(c, 0) + int(item["coefficient"])
        return cls.from_mapping(acc, rank)


# =========================================================
# FINITE ABELIAN GROUP H = coker(A)
# =========================================================
@dataclass(frozen=True)
class FiniteAbelianGroup:
    """
    H = Z^n / A Z^n in invariant-factor form, from the Smith form
    L A R = diag(d). x -> L x mod d identifies H with the sum of Z/d_i,
    so h_sigma is column sigma of L reduced mod the factors.
    """

    invariant_factors: tuple[int, ...]
    generator_images: tuple[tuple[int, ...], ...]
    _left: DomainMatrix = field(repr=False, compare=False)
    _kept: tuple[int, ...] = field(repr=False, compare=False)

    @classmethod
    def from_smith_form(cls, sf: SmithForm) -> "FiniteAbelianGroup":
        kept = tuple(i for i, d in enumerate(sf.diagonal) if d != 1)
        factors = tuple(sf.diagonal[i] for i in kept)
        if any(d == 0 for d in factors):
            raise NotWellDefined("cokernel is infinite", diagonal=sf.diagonal)
        left = to_rows(sf.left)
        n = sf.shape[0]
        images = tuple(
            tuple(int(left[i][s]) % sf.diagonal[i] for i in kept) for s in range(n)
        )
        return cls(factors, images, sf.left, kept)

    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def element_order(self, coordinates: Sequence[int]) -> int:
        """Order of the element given in invariant coordinates."""
        out = 1
        for c, d in zip(coordinates, self.invariant_factors):
            out = lcm(out, d // gcd(c % d, d) if c % d else 1)
        return out

    def generator_order(self, sigma: int) -> int:
        return self.element_order(self.generator_images[sigma])

    def character_coordinates(self, character: Character) -> tuple[Fraction, ...]:
        """
        Values of the character on the invariant generators g_i; g_i is
        represented by column i of L^-1.
        """
        inv = to_rows(invert(self._left))
        out = []
        for i in self._kept:
            col = [inv[r][i] for r in range(len(inv))]
            out.append(character.evaluate([int(x) for x in col]))
        return tuple(out)

    def annihilates(self, character: Character, relations: Sequence[Sequence[int]]) -> bool:
        """True iff the character vanishes on every relation vector."""
        return all(character.evaluate(rel) == 0 for rel in relations)
