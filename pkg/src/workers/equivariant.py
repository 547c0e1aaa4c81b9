# src/workers/equivariant.py
"""
Equivariant Poincare series over the group ring of H = coker(-E) for
rational surface singularities.

alpha_s is the character h_d -> exp(-2 pi i m_sd); the series is
prod_s (1 - alpha_s t^{d k_s})^{-chi(E°_s)}. The invariant part keeps the
trivial-character coefficients and substitutes t^d -> t.
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence

from src.errors import NotDivisible, NotWellDefined
from src.utils.group_ring import Character, GroupRingElement
from src.utils.power_series import FactorForm, Series
from src.workers.poincare_engine import IdealSpec, multiplicity_vectors
from src.workers.resolution_graph import (
    EulerData,
    LinkingData,
    ResolutionGraph,
    euler_data,
    linking_data,
)

logger = logging.getLogger(__name__)


def characters_from_linking(ld: LinkingData) -> dict[str, Character]:
    """alpha_s = -(row s of M) mod 1, checked to vanish on the columns of -E."""
    relations = [list(col) for col in zip(*ld.minus_e)]
    out = {}
    for s in ld.ids:
        alpha = Character(tuple(-q for q in ld.row(s)))
        if not ld.group.annihilates(alpha, relations):
            raise NotWellDefined(f"alpha_{s} does not vanish on the relations of H")
        out[s] = alpha
    logger.debug("characters: %s", {s: a.render() for s, a in out.items()})
    return out


def equivariant_poincare(g: ResolutionGraph, ideals: Sequence[IdealSpec],
                         ld: Optional[LinkingData] = None,
                         euler: Optional[EulerData] = None) -> FactorForm:
    ld = ld or linking_data(g)
    euler = euler or euler_data(g)
    alphas = characters_from_linking(ld)
    ks = multiplicity_vectors(g, ideals)
    factors = []
    for s in g.ids:
        k, chi = ks[s], euler.chi[s]
        if not any(k) or chi == 0:
            continue
        factors.append((tuple(ld.d * x for x in k), alphas[s], -chi))
    return FactorForm(len(ideals), factors)


def invariant_part(p: Series, d: int) -> Series:
    """Trivial-character coefficients, exponents divided by d."""
    terms = {}
    for m, c in p.terms.items():
        coef = c.trivial_part() if isinstance(c, GroupRingElement) else c
        if not coef:
            continue
        if any(e % d for e in m):
            raise NotDivisible(f"exponent {m} is not a multiple of {d}")
        terms[tuple(e // d for e in m)] = coef
    box = [b // d for b in p.box] if p.box is not None else None
    return Series(p.r, p.truncation // d, terms, box)
