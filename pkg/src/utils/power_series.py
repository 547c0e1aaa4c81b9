# src/utils/power_series.py
"""
Sparse truncated multivariate power series and exact factor products.

Series      - finite map exponent-vector -> coefficient, valid up to a
              total degree N (optionally also inside a per-variable box).
              Coefficients are ints or GroupRingElements; the engine only
              needs +, * and a zero test from them.
FactorForm  - canonical product of (1 - tag * t^k)^e, tag an optional
              character (None means trivial).

expand / substitute / identify_variables / mul_poly operate on both.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Optional, Sequence, Union

from src.errors import DegenerateSubstitution, DimensionMismatch, TruncationLoss
from src.utils.group_ring import Character, GroupRingElement
from src.utils.parsing import format_monomial, variable_names

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]
Coefficient = Union[int, GroupRingElement]


def _is_zero(c: Coefficient) -> bool:
    return not c


# =========================================================
# SERIES
# =========================================================
class Series:
    """Immutable truncated series; monomials outside the valid region are never stored."""

    __slots__ = ("r", "truncation", "box", "_terms")

    def __init__(self, r: int, truncation: int, terms: Mapping[Monomial, Coefficient] | None = None,
                 box: Optional[Sequence[int]] = None):
        if truncation < 0:
            raise DimensionMismatch("negative truncation", truncation=truncation)
        if box is not None and len(box) != r:
            raise DimensionMismatch("box length differs from variable count", r=r, box=len(box))
        self.r = r
        self.truncation = truncation
        self.box = tuple(box) if box is not None else None
        clean: dict[Monomial, Coefficient] = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != r:
                raise DimensionMismatch("monomial length differs from variable count", monomial=m, r=r)
            if _is_zero(c) or not self.in_range(m):
                continue
            clean[m] = c
        self._terms = clean

    # -------- constructors --------
    @classmethod
    def one(cls, r: int, truncation: int, box: Optional[Sequence[int]] = None,
            unit: Coefficient = 1) -> "Series":
        return cls(r, truncation, {(0,) * r: unit}, box)

    @classmethod
    def zero(cls, r: int, truncation: int, box: Optional[Sequence[int]] = None) -> "Series":
        return cls(r, truncation, {}, box)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[Coefficient]) -> "Series":
        """One-variable series c0 + c1 t + ... valid to degree len - 1."""
        return cls(1, len(coefficients) - 1, {(i,): c for i, c in enumerate(coefficients)})

    # -------- access --------
    @property
    def terms(self) -> dict[Monomial, Coefficient]:
        return dict(self._terms)

    def in_range(self, m: Monomial) -> bool:
        if sum(m) > self.truncation:
            return False
        if self.box is not None and any(e > b for e, b in zip(m, self.box)):
            return False
        return True

    def coefficient(self, m: Sequence[int]) -> Coefficient:
        return self._terms.get(tuple(m), 0)

    def coefficients(self) -> list[Coefficient]:
        """Dense coefficient list of a one-variable series."""
        if self.r != 1:
            raise DimensionMismatch("dense coefficients need one variable", r=self.r)
        top = self.truncation if self.box is None else min(self.truncation, self.box[0])
        return [self._terms.get((i,), 0) for i in range(top + 1)]

    def support(self) -> list[Monomial]:
        return sorted(self._terms)

    def restrict(self, truncation: Optional[int] = None, box: Optional[Sequence[int]] = None) -> "Series":
        n = self.truncation if truncation is None else min(truncation, self.truncation)
        if box is None:
            new_box = self.box
        elif self.box is None:
            new_box = tuple(box)
        else:
            new_box = tuple(min(a, b) for a, b in zip(box, self.box))
        return Series(self.r, n, self._terms, new_box)

    # -------- arithmetic --------
    def _check(self, other: "Series"):
        if not isinstance(other, Series) or other.r != self.r:
            raise DimensionMismatch("series have different variable counts")

    def _joint_region(self, other: "Series"):
        n = min(self.truncation, other.truncation)
        if self.box is None:
            box = other.box
        elif other.box is None:
            box = self.box
        else:
            box = tuple(min(a, b) for a, b in zip(self.box, other.box))
        return n, box

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        n, box = self._joint_region(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return Series(self.r, n, acc, box)

    def __neg__(self) -> "Series":
        return Series(self.r, self.truncation, {m: -c for m, c in self._terms.items()}, self.box)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other: "Series") -> "Series":
        self._check(other)
        n, box = self._joint_region(other)
        out = Series.zero(self.r, n, box)
        acc: dict[Monomial, Coefficient] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if out.in_range(m):
                    acc[m] = acc.get(m, 0) + c1 * c2
        return Series(self.r, n, acc, box)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (self.r, self.truncation, self.box) == (other.r, other.truncation, other.box) \
            and self._terms == other._terms

    def __hash__(self):
        return hash((self.r, self.truncation, self.box, tuple(sorted(self._terms.items(), key=lambda kv: kv[0]))))

    def __repr__(self) -> str:
        return f"Series(r={self.r}, N={self.truncation}, box={self.box}, {self.render()})"

    # -------- rendering / serialization --------
    def render(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or variable_names(self.r)
        parts: list[str] = []
        for m in sorted(self._terms):
            c = self._terms[m]
            mono = format_monomial(m, names)
            if isinstance(c, int):
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                body = mono if (mag == 1 and mono) else (f"{mag} {mono}".strip() if mono else str(mag))
            else:
                sign = "+"
                body = f"{c.render()} {mono}".strip()
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        terms = []
        for m in sorted(self._terms):
            c = self._terms[m]
            terms.append({
                "exponents": list(m),
                "coefficient": c if isinstance(c, int) else c.to_list(),
            })
        return {"r": self.r, "truncation": self.truncation,
                "box": list(self.box) if self.box is not None else None, "terms": terms}

    @classmethod
    def from_dict(cls, raw: dict, rank: Optional[int] = None) -> "Series":
        terms: dict[Monomial, Coefficient] = {}
        for item in raw["terms"]:
            c = item["coefficient"]
            if isinstance(c, list):
                if not c:
                    continue
                group_rank = rank if rank is not None else len(c[0]["character"])
                c = GroupRingElement.from_list(c, group_rank)
            terms[tuple(item["exponents"])] = c
        return cls(raw["r"], raw["truncation"], terms, raw.get("box"))


# =========================================================
# FACTOR FORMS
# =========================================================
@dataclass(frozen=True)
class Factor:
    k: Monomial
    tag: Optional[Character]
    e: int

    def render(self, names: Sequence[str]) -> str:
        mono = format_monomial(self.k, names)
        inner = f"{self.tag.render()} {mono}" if self.tag is not None else mono
        base = f"(1 - {inner})"
        return base if self.e == 1 else f"{base}^{self.e}"


def _tag_key(tag: Optional[Character]):
    return (0, ()) if tag is None else (1, tag.values)


class FactorForm:
    """Canonical product of (1 - tag t^k)^e: keys merged, zero exponents dropped, lex order."""

    __slots__ = ("r", "factors")

    def __init__(self, r: int, factors: Iterable = ()):
        self.r = r
        acc: dict[tuple[Monomial, Optional[Character]], int] = {}
        for item in factors:
            if isinstance(item, Factor):
                k, tag, e = item.k, item.tag, item.e
            else:
                k, tag, e = item
            k = tuple(int(x) for x in k)
            if len(k) != r:
                raise DimensionMismatch("factor key length differs from variable count", key=k, r=r)
            if any(x < 0 for x in k) or not any(k):
                raise DimensionMismatch("factor keys must be nonzero and nonnegative", key=k)
            if tag is not None and tag.is_trivial():
                tag = None
            acc[(k, tag)] = acc.get((k, tag), 0) + int(e)
        ordered = sorted(((k, tag, e) for (k, tag), e in acc.items() if e != 0),
                         key=lambda f: (f[0], _tag_key(f[1])))
        self.factors = tuple(Factor(k, tag, e) for k, tag, e in ordered)

    @classmethod
    def one(cls, r: int) -> "FactorForm":
        return cls(r, ())

    def is_one(self) -> bool:
        return not self.factors

    def has_tags(self) -> bool:
        return any(f.tag is not None for f in self.factors)

    def tag_rank(self) -> Optional[int]:
        for f in self.factors:
            if f.tag is not None:
                return f.tag.rank
        return None

    def __mul__(self, other: "FactorForm") -> "FactorForm":
        if not isinstance(other, FactorForm) or other.r != self.r:
            raise DimensionMismatch("factor forms have different variable counts")
        return FactorForm(self.r, list(self.factors) + list(other.factors))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactorForm):
            return NotImplemented
        return self.r == other.r and self.factors == other.factors

    def __hash__(self):
        return hash((self.r, self.factors))

    def __repr__(self) -> str:
        return f"FactorForm(r={self.r}, {self.render()})"

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or variable_names(self.r)
        if not self.factors:
            return "1"
        return " ".join(f.render(names) for f in self.factors)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "factors": [
                {"k": list(f.k), "tag": f.tag.to_list() if f.tag is not None else None, "e": f.e}
                for f in self.factors
            ],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "FactorForm":
        factors = []
        for item in raw["factors"]:
            tag = Character.from_list(item["tag"]) if item.get("tag") is not None else None
            factors.append((tuple(item["k"]), tag, int(item["e"])))
        return cls(raw["r"], factors)


# =========================================================
# EXPANSION
# =========================================================
def factor_coefficient(e: int, ell: int) -> int:
    """
    Coefficient of x^ell in (1 - x)^e.
    e < 0: binomial(c + ell - 1, ell) with c = -e (symmetric powers)
    e > 0: (-1)^ell binomial(e, ell)
    """
    if e < 0:
        c = -e
        return comb(c + ell - 1, ell)
    if ell > e:
        return 0
    return (-1) ** ell * comb(e, ell)


def expand(f: FactorForm, truncation: int, box: Optional[Sequence[int]] = None) -> Series:
    """Multiply out all factors up to total degree N (and inside box, if given)."""
    rank = f.tag_rank()
    unit: Coefficient = GroupRingElement.unit(rank) if rank is not None else 1
    result = Series.one(f.r, truncation, box, unit=unit)
    acc = dict(result.terms)

    for factor in f.factors:
        step = sum(factor.k)
        ell_max = truncation // step
        if box is not None:
            ell_max = min([ell_max] + [b // k for b, k in zip(box, factor.k) if k])
        if factor.e > 0:
            ell_max = min(ell_max, factor.e)
        if ell_max == 0:
            continue

        pieces: list[tuple[int, Coefficient]] = []
        for ell in range(ell_max + 1):
            coef = factor_coefficient(factor.e, ell)
            if coef == 0:
                continue
            if factor.tag is not None:
                pieces.append((ell, GroupRingElement.of(factor.tag ** ell, coef)))
            else:
                pieces.append((ell, coef))

        nxt: dict[Monomial, Coefficient] = {}
        for m, c in acc.items():
            for ell, coef in pieces:
                mm = tuple(a + ell * k for a, k in zip(m, factor.k))
                if not result.in_range(mm):
                    continue
                nxt[mm] = nxt.get(mm, 0) + c * coef
        acc = {m: c for m, c in nxt.items() if not _is_zero(c)}

    logger.debug("expanded %d factors to N=%d: %d terms", len(f.factors), truncation, len(acc))
    return Series(f.r, truncation, acc, box)


def mul_poly(s: Series, poly: Mapping[Sequence[int], Coefficient]) -> Series:
    """Exact product with a polynomial such as (1 - t); the truncation of s is kept."""
    acc: dict[Monomial, Coefficient] = {}
    for m1, c1 in s.terms.items():
        for m2, c2 in poly.items():
            m2 = tuple(m2)
            if len(m2) != s.r:
                raise DimensionMismatch("polynomial monomial length differs", monomial=m2, r=s.r)
            if any(e < 0 for e in m2):
                raise DimensionMismatch("polynomial exponents must be nonnegative", monomial=m2)
            m = tuple(a + b for a, b in zip(m1, m2))
            if s.in_range(m):
                acc[m] = acc.get(m, 0) + c1 * c2
    return Series(s.r, s.truncation, acc, s.box)


# =========================================================
# SUBSTITUTION
# =========================================================
def _check_mapping(r: int, mapping: Sequence[Sequence[int]]) -> int:
    if len(mapping) != r:
        raise DimensionMismatch("substitution must give an image for every variable",
                                variables=r, images=len(mapping))
    widths = {len(img) for img in mapping}
    if len(widths) > 1:
        raise DimensionMismatch("substitution images have different lengths")
    if any(e < 0 for img in mapping for e in img):
        raise DimensionMismatch("substitution images must be nonnegative")
    return widths.pop() if widths else 0


def _image(m: Sequence[int], mapping: Sequence[Sequence[int]], r_new: int) -> Monomial:
    out = [0] * r_new
    for e, img in zip(m, mapping):
        if e:
            for j, x in enumerate(img):
                out[j] += e * x
    return tuple(out)


def guaranteed_truncation(s: Series, mapping: Sequence[Sequence[int]]) -> Optional[int]:
    """
    Largest N' such that every monomial of total degree <= N' in the image
    only receives contributions from the valid region of s. None for a
    series in no variables.

    A variable with trivial image is rejected even when no stored term uses
    it: the unknown terms past the truncation would land in every degree.
    """
    bounds = []
    degs = [sum(img) for img in mapping]
    live = [i for i in range(s.r) if degs[i] > 0]
    for i in range(s.r):
        if degs[i] == 0:
            raise DegenerateSubstitution("variable with trivial image in a truncated series", variable=i)
    if live:
        bounds.append((s.truncation + 1) * min(degs[i] for i in live) - 1)
        if s.box is not None:
            bounds.extend((s.box[i] + 1) * degs[i] - 1 for i in live)
    return min(bounds) if bounds else None


def substitute(x: Union[FactorForm, Series], mapping: Sequence[Sequence[int]],
               truncation: Optional[int] = None):
    """
    Monomial substitution t_i -> prod_j s_j^{mapping[i][j]}.
    FactorForm keys are rewritten exactly; Series are remapped and cut to
    the guaranteed truncation, with TruncationLoss when that is below the
    requested one.
    """
    r_new = _check_mapping(x.r, mapping)

    if isinstance(x, FactorForm):
        factors = []
        for f in x.factors:
            k = _image(f.k, mapping, r_new)
            if not any(k):
                raise DegenerateSubstitution("factor key maps to the constant monomial", key=f.k)
            factors.append((k, f.tag, f.e))
        return FactorForm(r_new, factors)

    guaranteed = guaranteed_truncation(x, mapping)
    if guaranteed is None:
        guaranteed = truncation if truncation is not None else x.truncation
    target = guaranteed if truncation is None else truncation
    if target > guaranteed:
        msg = f"substituted series valid only to degree {guaranteed}, requested {target}"
        logger.warning(msg)
        warnings.warn(msg, TruncationLoss, stacklevel=2)
        target = guaranteed

    acc: dict[Monomial, Coefficient] = {}
    for m, c in x.terms.items():
        mm = _image(m, mapping, r_new)
        if sum(mm) <= target:
            acc[mm] = acc.get(mm, 0) + c
    return Series(r_new, target, acc)


def identify_variables(x: Union[FactorForm, Series], truncation: Optional[int] = None):
    """All variables -> t."""
    return substitute(x, [(1,)] * x.r, truncation)


def permute_variables(x: Union[FactorForm, Series], order: Sequence[int]):
    """New variable j is old variable order[j]."""
    if sorted(order) != list(range(x.r)):
        raise DimensionMismatch("not a permutation", order=list(order))
    mapping = [[0] * x.r for _ in range(x.r)]
    for j, i in enumerate(order):
        mapping[i][j] = 1
    if isinstance(x, Series):
        box = [x.box[i] for i in order] if x.box is not None else None
        terms = {tuple(m[i] for i in order): c for m, c in x.terms.items()}
        return Series(x.r, x.truncation, terms, box)
    return substitute(x, mapping)


if __name__ == "__main__":
    cusp = FactorForm(1, [((2,), None, -1), ((3,), None, -1), ((6,), None, 1)])
    print(cusp.render())
    p = expand(cusp, 10)
    print(p.render())
    print(mul_poly(p, {(0,): 1, (1,): -1}).render())
