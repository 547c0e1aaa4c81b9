# src/workers/poincare_engine.py
"""
Product formulas for Poincare series and Alexander polynomials.

 - poincare_from_graph(g, ideals)        prod_s (1 - t^{k_s})^{-chi(E°_s)}
 - alexander_from_strata(g, ideals)      same product grouped by strata S_k
 - mixed_poincare(rc, comps, branches)   divisorial + curve indices read off M
 - poincare_of_filtration(rc, spec)      any ordered mix of indices
 - zeta_and_alexander(p, r)              one-variable zeta, Alexander polynomial
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Sequence, Union

from src.errors import DimensionMismatch, UnknownBranch, UnknownComponent
from src.utils.power_series import FactorForm, identify_variables, permute_variables
from src.workers.curve_resolver import ResolvedCurve
from src.workers.resolution_graph import (
    EulerData,
    LinkingData,
    ResolutionGraph,
    euler_data,
    linking_data,
)

logger = logging.getLogger(__name__)

# an ideal is a name from graph.ideal_specs, a component -> k mapping or a k-vector in component order
IdealSpec = Union[str, Mapping[str, int], Sequence[int]]


def multiplicity_vectors(g: ResolutionGraph, ideals: Sequence[IdealSpec]) -> dict[str, tuple[int, ...]]:
    """k_sigma = (k_sigma^1, ..., k_sigma^r) for every component sigma."""
    ids = g.ids
    columns: list[list[int]] = []
    for spec in ideals:
        if isinstance(spec, str):
            if spec not in g.ideal_specs:
                raise DimensionMismatch(f"unknown ideal {spec!r}")
            spec = g.ideal_specs[spec]
        if isinstance(spec, Mapping):
            unknown = set(spec) - set(ids)
            if unknown:
                raise UnknownComponent(f"ideal references unknown components {sorted(unknown)}")
            col = [int(spec.get(s, 0)) for s in ids]
        else:
            col = [int(x) for x in spec]
            if len(col) != len(ids):
                raise DimensionMismatch("k-vector length differs from component count",
                                        expected=len(ids), got=len(col))
        if any(x < 0 for x in col):
            raise DimensionMismatch("multiplicities must be nonnegative", k=col)
        columns.append(col)
    return {s: tuple(col[i] for col in columns) for i, s in enumerate(ids)}


# =========================================================
# GRAPH FORMULA AND STRATA
# =========================================================
def poincare_from_graph(g: ResolutionGraph, ideals: Sequence[IdealSpec],
                        euler: Optional[EulerData] = None) -> FactorForm:
    euler = euler or euler_data(g)
    ks = multiplicity_vectors(g, ideals)
    factors = []
    for s in g.ids:
        k, chi = ks[s], euler.chi[s]
        if not any(k) or chi == 0:
            continue
        factors.append((k, None, -chi))
    return FactorForm(len(ideals), factors)


def strata(g: ResolutionGraph, ideals: Sequence[IdealSpec],
           euler: Optional[EulerData] = None) -> dict[tuple[int, ...], int]:
    """chi(S_k) = sum of chi(E°_s) over the components with k_s = k, for k != 0."""
    euler = euler or euler_data(g)
    out: dict[tuple[int, ...], int] = {}
    for s, k in multiplicity_vectors(g, ideals).items():
        if any(k):
            out[k] = out.get(k, 0) + euler.chi[s]
    return out


def alexander_from_strata(g: ResolutionGraph, ideals: Sequence[IdealSpec],
                          euler: Optional[EulerData] = None) -> FactorForm:
    return FactorForm(len(ideals), [(k, None, -chi) for k, chi in strata(g, ideals, euler).items()])


# =========================================================
# MIXED DIVISORIAL / CURVE FILTRATIONS
# =========================================================
def _index_vectors(g: ResolutionGraph, ld: LinkingData, kinds: Sequence[tuple[str, object]]):
    """Per index a multiplicity vector over components, plus the arrow labels it punctures with."""
    columns, labels = [], []
    for kind, ref in kinds:
        if kind == "divisorial":
            if ref not in g.ids:
                raise UnknownComponent(f"unknown component {ref!r}")
            columns.append(ld.column(ref))
        elif kind == "curve":
            alpha = g.arrow_component(ref)
            if alpha is None:
                raise UnknownBranch(f"unknown branch {ref!r}")
            columns.append(ld.column(alpha))
            labels.append(ref)
        elif kind == "ideal":
            k = multiplicity_vectors(g, [ref])
            columns.append(tuple(k[s][0] for s in g.ids))
        else:
            raise DimensionMismatch(f"unknown filtration kind {kind!r}")
    return columns, labels


def _product(g: ResolutionGraph, columns, labels) -> FactorForm:
    euler = euler_data(g, labels)
    factors = []
    for i, s in enumerate(g.ids):
        k = tuple(col[i] for col in columns)
        if any(x.denominator != 1 for x in k):
            raise DimensionMismatch("non-integral exponent vector; use the equivariant formula", component=s)
        k = tuple(int(x) for x in k)
        chi = euler.chi[s]
        if not any(k) or chi == 0:
            continue
        factors.append((k, None, -chi))
    return FactorForm(len(columns), factors)


def mixed_poincare_from_graph(g: ResolutionGraph, chosen_components: Sequence[str],
                              chosen_branches: Sequence[str],
                              ld: Optional[LinkingData] = None) -> FactorForm:
    """
    prod_s (1 - t^{m'_s} T^{m''_s})^{-chi(E°_s)} on a dual graph whose arrows
    stand for the branches; only chosen arrows puncture the components.
    """
    ld = ld or linking_data(g)
    kinds = [("divisorial", s) for s in chosen_components] + [("curve", j) for j in chosen_branches]
    columns, labels = _index_vectors(g, ld, kinds)
    return _product(g, columns, labels)


def mixed_poincare(rc: ResolvedCurve, chosen_components: Sequence[str],
                   chosen_branches: Sequence[str]) -> FactorForm:
    for j in chosen_branches:
        rc.arrow_component(j)
    return mixed_poincare_from_graph(rc.graph, chosen_components, chosen_branches)


# =========================================================
# FILTRATION SPECS
# =========================================================
@dataclass(frozen=True)
class FiltrationIndex:
    kind: Literal["divisorial", "curve", "ideal"]
    ref: object  # component id, branch name, or ideal spec


_KIND_RANK = {"divisorial": 0, "curve": 1, "ideal": 2}


@dataclass(frozen=True)
class FiltrationSpec:
    indices: tuple[FiltrationIndex, ...]

    @classmethod
    def of(cls, components: Sequence[str] = (), branches: Sequence[str] = ()) -> "FiltrationSpec":
        return cls(tuple([FiltrationIndex("divisorial", s) for s in components]
                         + [FiltrationIndex("curve", j) for j in branches]))

    @property
    def r(self) -> int:
        return len(self.indices)

    def components(self) -> list[str]:
        return [i.ref for i in self.indices if i.kind == "divisorial"]

    def branches(self) -> list[str]:
        return [i.ref for i in self.indices if i.kind == "curve"]


def poincare_of_filtration(source: Union[ResolvedCurve, ResolutionGraph], spec: FiltrationSpec) -> FactorForm:
    """
    Mixed formula evaluated with divisorial indices first, then curves, then
    ideals; the variables are then permuted into the filtration's order.
    """
    g = source.graph if isinstance(source, ResolvedCurve) else source
    ld = linking_data(g)
    grouped = sorted(range(spec.r), key=lambda i: _KIND_RANK.get(spec.indices[i].kind, len(_KIND_RANK)))
    columns, labels = _index_vectors(g, ld, [(spec.indices[i].kind, spec.indices[i].ref) for i in grouped])
    f = _product(g, columns, labels)
    if grouped == list(range(spec.r)):
        return f
    return permute_variables(f, [grouped.index(j) for j in range(spec.r)])


# =========================================================
# ZETA / ALEXANDER
# =========================================================
@dataclass(frozen=True)
class ZetaAlexander:
    zeta: FactorForm
    alexander: FactorForm


def zeta_and_alexander(p: FactorForm, r: Optional[int] = None) -> ZetaAlexander:
    """
    zeta = p with all variables identified; the Alexander polynomial is
    (1 - t) * zeta for one index and p itself otherwise.
    """
    r = p.r if r is None else r
    if r != p.r:
        raise DimensionMismatch("index count differs from the factor form", r=r, factor_form=p.r)
    zeta = identify_variables(p)
    if r == 1:
        alexander = zeta * FactorForm(1, [((1,), None, 1)])
    else:
        alexander = p
    logger.debug("zeta=%s alexander=%s", zeta.render(), alexander.render())
    return ZetaAlexander(zeta, alexander)
