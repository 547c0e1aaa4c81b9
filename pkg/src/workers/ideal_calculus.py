# src/workers/ideal_calculus.py
"""
Ideals written as products of divisorial ideals I_{E_s}^{n_s} and curve
ideals I_{C_j}^{m_j}, and their Poincare series obtained by monomial
substitution into the mixed divisorial/curve base series.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from src.errors import (
    DimensionMismatch,
    HypothesisViolated,
    NonIntegralPresentation,
    UnknownBranch,
    UnknownComponent,
)
from src.utils.power_series import FactorForm, substitute
from src.workers.poincare_engine import mixed_poincare_from_graph
from src.workers.resolution_graph import (
    PLANE_CURVE,
    LinkingData,
    Mode,
    ResolutionGraph,
    linking_data,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdealPresentation:
    divisorial_part: Mapping[str, Fraction] = field(default_factory=dict)
    curve_part: Mapping[str, int] = field(default_factory=dict)

    def is_trivial(self) -> bool:
        return not any(self.divisorial_part.values()) and not any(self.curve_part.values())

    def curves(self) -> list[str]:
        return [j for j, m in self.curve_part.items() if m]


@dataclass(frozen=True, eq=False)
class MixedBase:
    """Mixed series over all components (in graph order) followed by the given branches."""

    factor_form: FactorForm
    components: tuple[str, ...]
    branches: tuple[str, ...]


def validate_presentation(g: ResolutionGraph, ip: IdealPresentation,
                          mode: Mode = PLANE_CURVE) -> IdealPresentation:
    ids = set(g.ids)
    for s, r in ip.divisorial_part.items():
        if s not in ids:
            raise UnknownComponent(f"presentation references unknown component {s!r}")
        if Fraction(r) < 0:
            raise NonIntegralPresentation(f"negative exponent on {s!r}")
        if mode == PLANE_CURVE and Fraction(r).denominator != 1:
            raise NonIntegralPresentation(f"plane-curve presentations need integer exponents ({s!r})")
    labels = {a.label for a in g.arrows}
    for j, m in ip.curve_part.items():
        if j not in labels:
            raise UnknownBranch(f"presentation references unknown branch {j!r}")
        if int(m) != m or m < 0:
            raise NonIntegralPresentation(f"curve exponent of {j!r} must be a nonnegative integer")

    if mode != PLANE_CURVE:
        # sum_s (E_s . E_d) r_s must be integral for every d
        E = g.intersection_matrix().to_list()
        pos = {s: i for i, s in enumerate(g.ids)}
        for d, di in pos.items():
            total = sum(int(E[di][pos[s]]) * Fraction(r) for s, r in ip.divisorial_part.items())
            if total.denominator != 1:
                raise NonIntegralPresentation(f"sum of E.E_{d} r_s is not integral", value=str(total))
    return ip


def divisorial_exponents_from_multiplicities(ld: LinkingData, k: Sequence[int]) -> list[Fraction]:
    """n = M k."""
    if len(k) != len(ld.ids):
        raise DimensionMismatch("k-vector length differs from component count",
                                expected=len(ld.ids), got=len(k))
    return [sum((m * x for m, x in zip(row, k)), Fraction(0)) for row in ld.rows()]


def multiplicity_vector(ld: LinkingData, g: ResolutionGraph, ip: IdealPresentation) -> list[Fraction]:
    """
    Multiplicities of the presented ideal on every component:
    sum_s n_s (column s of M) + sum_j m_j (column of M at the arrow of C_j).
    """
    out = [Fraction(0)] * len(ld.ids)
    for s, n in ip.divisorial_part.items():
        out = [a + Fraction(n) * b for a, b in zip(out, ld.column(s))]
    for j, m in ip.curve_part.items():
        alpha = g.arrow_component(j)
        if alpha is None:
            raise UnknownBranch(f"unknown branch {j!r}")
        out = [a + m * b for a, b in zip(out, ld.column(alpha))]
    return out


def ideal_graph(g: ResolutionGraph, ip: IdealPresentation) -> ResolutionGraph:
    """The graph with only the arrows of curves the ideal vanishes on."""
    return g.with_arrows(ip.curves())


def mixed_base(g: ResolutionGraph, branches: Sequence[str] = (),
               ld: Optional[LinkingData] = None) -> MixedBase:
    ff = mixed_poincare_from_graph(g, g.ids, branches, ld)
    return MixedBase(ff, tuple(g.ids), tuple(branches))


def _images(base: MixedBase, ips: Sequence[IdealPresentation]) -> list[list[int]]:
    """Row per base variable: its exponent in each of the r new variables."""
    mapping = []
    for s in base.components:
        row = []
        for ip in ips:
            n = Fraction(ip.divisorial_part.get(s, 0))
            if n.denominator != 1:
                raise NonIntegralPresentation(f"exponent of {s!r} is not an integer; rescale with d_sigma")
            row.append(int(n))
        mapping.append(row)
    for j in base.branches:
        mapping.append([int(ip.curve_part.get(j, 0)) for ip in ips])
    return mapping


def poincare_of_ideal_set(ips: Sequence[IdealPresentation], base: MixedBase) -> FactorForm:
    """
    P(t_1..t_r) = base(t_s -> prod_i t_i^{n_s^i}, T_j -> prod_i t_i^{m_j^i}).
    Every base curve needs a positive exponent in some ideal.
    """
    if not ips:
        raise DimensionMismatch("no ideal presentations given")
    for ip in ips:
        for s in ip.divisorial_part:
            if s not in base.components:
                raise UnknownComponent(f"presentation references unknown component {s!r}")
        for j, m in ip.curve_part.items():
            if m and j not in base.branches:
                raise UnknownBranch(f"curve {j!r} is not part of the base series")
    for j in base.branches:
        if not any(ip.curve_part.get(j, 0) > 0 for ip in ips):
            raise HypothesisViolated(f"curve {j!r} has exponent 0 in every ideal")

    if all(ip.is_trivial() for ip in ips) and len(ips) == 1:
        return FactorForm.one(1)
    mapping = _images(base, ips)
    out = substitute(base.factor_form, mapping)
    logger.debug("ideal-set series: %s", out.render())
    return out


def poincare_of_ideal(ip: IdealPresentation, base: MixedBase) -> FactorForm:
    """One-variable case; the trivial presentation gives the constant 1."""
    if ip.is_trivial():
        return FactorForm.one(1)
    return poincare_of_ideal_set([ip], base)


def dsigma_rescale(f: FactorForm, d_sigma: int) -> FactorForm:
    """t -> t^{d_sigma}."""
    if d_sigma < 1:
        raise DimensionMismatch("d_sigma must be positive", d_sigma=d_sigma)
    mapping = [[d_sigma if i == j else 0 for j in range(f.r)] for i in range(f.r)]
    return substitute(f, mapping)


def poincare_of_presentation(g: ResolutionGraph, ip: IdealPresentation) -> FactorForm:
    """Convenience: validates, builds the base over the curves of ip and substitutes."""
    validate_presentation(g, ip)
    return poincare_of_ideal(ip, mixed_base(g, ip.curves(), linking_data(g)))
