# src/workers/oracle.py
"""
Brute-force Poincare series from jet-space dimensions.

For order-function filtrations the coefficient at t^v is
    c_v = sum_{S subset {1..r}} (-1)^{|S|+1} h(v + 1_S),   S = {} included,
with h(w) = dim O / J(w). h is the rank of the evaluation map
g -> (jets of g along every realizing curve) over a monomial basis.

A curve index is realised by its branch. A divisorial index v_s is realised
by s_cnt = W // m_ss + 1 curvettes at distinct generic points of E_s:
below W their jet conditions cut out exactly {v_s >= w}.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Mapping, Optional, Sequence, Union

import pandas as pd
from cachetools import LRUCache
from sympy.polys.ring_series import rs_mul

from src import config
from src.errors import (
    DimensionMismatch,
    HypothesisViolated,
    OracleMismatch,
    SeedsDisagree,
)
from src.utils.exact_linalg import rank, rat_matrix, to_fraction
from src.utils.power_series import FactorForm, Series, expand
from src.workers.curve_resolver import (
    R,
    T,
    PuiseuxBranch,
    ResolvedCurve,
    curvette,
    generic_seeds,
)
from src.workers.poincare_engine import FiltrationSpec
from src.workers.resolution_graph import linking_data

logger = logging.getLogger(__name__)


# =========================================================
# REALIZATIONS
# =========================================================
@dataclass(frozen=True)
class RealizedIndex:
    kind: Literal["curve", "divisorial"]
    ref: str
    # one tuple of curves per seed family; curve indices have a single family
    families: tuple[tuple[PuiseuxBranch, ...], ...]
    seeds: tuple[tuple[Fraction, ...], ...] = ()
    # largest box side the curvettes were counted for; None for curve indices
    bound: Optional[int] = None

    def curves(self, family: int = 0) -> tuple[PuiseuxBranch, ...]:
        if self.kind == "curve":
            return self.families[0]
        return self.families[family]


@dataclass(frozen=True)
class ValuationRealization:
    indices: tuple[RealizedIndex, ...]

    @property
    def r(self) -> int:
        return len(self.indices)

    def family_count(self) -> int:
        counts = [len(i.families) for i in self.indices if i.kind == "divisorial"]
        return min(counts) if counts else 1

    def has_divisorial(self) -> bool:
        return any(i.kind == "divisorial" for i in self.indices)


def curvette_count(m_ss: Fraction, bound: int) -> int:
    """Curvettes needed so their jets cut out {v_s >= w} for all w <= bound."""
    return int(bound // m_ss) + 1


def realize(rc: ResolvedCurve, spec: FiltrationSpec, box: Optional[Sequence[int]] = None,
            seed: Optional[int] = None, families: Optional[int] = None,
            seeds: Optional[Mapping[str, Sequence]] = None) -> ValuationRealization:
    """
    Curves realising every index of spec inside box. `seeds` fixes the first
    curvette of each family on a component (one seed per family); the rest
    are drawn from random.Random(seed).
    """
    if spec.r > config.ORACLE_MAX_INDICES:
        raise DimensionMismatch("too many indices for the oracle",
                                r=spec.r, max=config.ORACLE_MAX_INDICES)
    box = list(box) if box is not None else [config.DEFAULT_TRUNCATION] * spec.r
    if len(box) != spec.r:
        raise DimensionMismatch("box length differs from index count", r=spec.r, box=len(box))
    rng = random.Random(config.DEFAULT_SEED if seed is None else seed)
    ld = linking_data(rc.graph)

    out = []
    for idx, b in zip(spec.indices, box):
        if idx.kind == "curve":
            out.append(RealizedIndex("curve", idx.ref, ((rc.branch(idx.ref),),)))
            continue
        if idx.kind != "divisorial":
            raise DimensionMismatch(f"the oracle cannot realise {idx.kind!r} indices")

        sigma = idx.ref
        count = curvette_count(ld.m(sigma, sigma), b + 1)
        fixed = list(seeds.get(sigma, ())) if seeds else []
        n_fam = len(fixed) if fixed else (families or config.CURVETTE_SEED_COUNT)
        used: set[Fraction] = {Fraction(s) for s in fixed}
        fams, fam_seeds = [], []
        for f in range(n_fam):
            chosen = [Fraction(fixed[f])] if fixed else []
            extra = generic_seeds(rc, sigma, count - len(chosen), rng, exclude=used)
            used.update(extra)
            chosen += extra
            fams.append(tuple(curvette(rc, sigma, s) for s in chosen))
            fam_seeds.append(tuple(chosen))
        logger.debug("realised %s by %d families of %d curvettes", sigma, n_fam, count)
        out.append(RealizedIndex("divisorial", sigma, tuple(fams), tuple(fam_seeds), b))
    return ValuationRealization(tuple(out))


def realize_branches(branches: Sequence[PuiseuxBranch]) -> ValuationRealization:
    """Curve indices straight from parametrizations, no resolution needed."""
    return ValuationRealization(tuple(RealizedIndex("curve", b.name, ((b,),)) for b in branches))


# =========================================================
# JET TABLE
# =========================================================
def _order(p) -> Optional[int]:
    return min(m[0] for m in p.keys()) if p else None


def _powers(p, top: int, prec: int) -> list:
    out = [R.one]
    for _ in range(top):
        out.append(rs_mul(out[-1], p, T, prec))
    return out


class JetTable:
    """
    Rows: monomials x^a y^b that are nonzero modulo the bounds of some curve.
    Columns: (index i, curve j, degree e) for e < bounds[i].
    """

    def __init__(self, vr: ValuationRealization, bounds: Sequence[int], family: int = 0):
        if len(bounds) != vr.r:
            raise DimensionMismatch("bound vector length differs from index count", r=vr.r)
        self.r = vr.r
        self.bounds = tuple(int(b) for b in bounds)
        for idx, w in zip(vr.indices, self.bounds):
            if idx.bound is not None and w > idx.bound + 1:
                raise DimensionMismatch(f"box exceeds the one {idx.ref} was realised for",
                                        realised=idx.bound, requested=w - 1)
        self.constraints: list[tuple[int, PuiseuxBranch]] = [
            (i, c) for i, idx in enumerate(vr.indices) for c in idx.curves(family)
        ]
        self.degree_bound = max(self.bounds, default=0)

        coords = []
        for i, c in self.constraints:
            x, y = c.coordinates()
            ox, oy = _order(x), _order(y)
            # every realization passes through the origin, so v(x), v(y) >= 1
            if (ox is not None and ox < 1) or (oy is not None and oy < 1):
                raise HypothesisViolated(f"curve {c.name!r} does not pass through the origin")
            coords.append((x, y, ox, oy))

        self.monomials: list[tuple[int, int]] = []
        B = self.degree_bound
        for a in range(B + 1):
            for b in range(B + 1 - a):
                if any(self._alive(a, b, ox, oy, self.bounds[i])
                       for (i, _), (_, _, ox, oy) in zip(self.constraints, coords)):
                    self.monomials.append((a, b))

        self.columns: list[tuple[int, int, int]] = []
        blocks = []
        for j, ((i, _), (x, y, _, _)) in enumerate(zip(self.constraints, coords)):
            w = self.bounds[i]
            if w == 0:
                continue
            xp, yp = _powers(x, B, w), _powers(y, B, w)
            block = []
            for a, b in self.monomials:
                p = rs_mul(xp[a], yp[b], T, w)
                block.append([to_fraction(p.get((e,), 0)) for e in range(w)])
            blocks.append(block)
            self.columns += [(i, j, e) for e in range(w)]
        self.rows = [sum((blk[k] for blk in blocks), []) for k in range(len(self.monomials))]
        self._cache: LRUCache = LRUCache(maxsize=4096)
        self._pivots: Optional[list[int]] = None
        logger.debug("jet table: %d monomials x %d columns, bounds=%s",
                     len(self.monomials), len(self.columns), self.bounds)

    @staticmethod
    def _alive(a: int, b: int, ox: Optional[int], oy: Optional[int], w: int) -> bool:
        if (a and ox is None) or (b and oy is None):
            return False
        return a * (ox or 0) + b * (oy or 0) < w

    def _columns_below(self, w: Sequence[int]) -> list[int]:
        return [k for k, (i, _, e) in enumerate(self.columns) if e < w[i]]

    def _one_index_pivots(self) -> list[int]:
        """Pivot columns after sorting columns by degree; rank of a degree prefix = pivots in it."""
        if self._pivots is None:
            order = sorted(range(len(self.columns)), key=lambda k: (self.columns[k][2], self.columns[k][1]))
            degrees = [self.columns[k][2] for k in order]
            if not self.rows or not order:
                self._pivots = []
            else:
                m = rat_matrix([[row[k] for k in order] for row in self.rows])
                _, pivots = m.rref()
                self._pivots = [degrees[p] for p in pivots]
        return self._pivots

    def codim(self, w: Sequence[int]) -> int:
        w = tuple(int(x) for x in w)
        if any(a > b for a, b in zip(w, self.bounds)):
            raise DimensionMismatch("weight exceeds the table bounds", w=w, bounds=self.bounds)
        if w in self._cache:
            return self._cache[w]
        if self.r == 1:
            h = sum(1 for d in self._one_index_pivots() if d < w[0])
        else:
            cols = self._columns_below(w)
            if not cols or not self.rows:
                h = 0
            else:
                h = rank(rat_matrix([[row[k] for k in cols] for row in self.rows]))
        self._cache[w] = h
        return h


# =========================================================
# OPERATIONS
# =========================================================
def codim(vr: ValuationRealization, w: Sequence[int], family: int = 0) -> int:
    """h(w) = dim O / J(w)."""
    return JetTable(vr, w, family).codim(w)


def _series_from_table(table: JetTable, box: Sequence[int]) -> Series:
    r = table.r
    terms = {}
    for v in itertools.product(*(range(b + 1) for b in box)):
        c = 0
        for size in range(r + 1):
            sign = -1 if size % 2 == 0 else 1
            for S in itertools.combinations(range(r), size):
                c += sign * table.codim(tuple(x + (1 if i in S else 0) for i, x in enumerate(v)))
        # a projective space minus at most two subspaces has chi >= 0
        if c < 0 and r <= 2:
            raise OracleMismatch("negative Euler characteristic in the oracle", monomial=v, value=c)
        if c:
            terms[v] = c
    return Series(r, sum(box), terms, box)


def poincare_bruteforce(vr: ValuationRealization, box: Sequence[int], family: int = 0) -> Series:
    """Boxed series with coefficients from inclusion-exclusion over jet codimensions."""
    box = [int(b) for b in box]
    if len(box) != vr.r:
        raise DimensionMismatch("box length differs from index count", r=vr.r, box=len(box))
    table = JetTable(vr, [b + 1 for b in box], family)
    series = _series_from_table(table, box)
    logger.debug("oracle series (family %d): %d terms", family, len(series.terms))
    return series


@dataclass(frozen=True)
class AgreementReport:
    series: Series
    families: int
    seeds: dict[str, tuple[tuple[Fraction, ...], ...]] = field(default_factory=dict)


def check_divisorial(vr: ValuationRealization, box: Sequence[int]) -> AgreementReport:
    """Recompute the oracle for every seed family and insist they agree."""
    seeds = {i.ref: i.seeds for i in vr.indices if i.kind == "divisorial"}
    if not vr.has_divisorial():
        return AgreementReport(poincare_bruteforce(vr, box), 1, seeds)
    n = vr.family_count()
    if n < config.CURVETTE_SEED_COUNT:
        raise HypothesisViolated("not enough seed families to certify genericity",
                                 families=n, required=config.CURVETTE_SEED_COUNT)

    first = poincare_bruteforce(vr, box, 0)
    for f in range(1, n):
        other = poincare_bruteforce(vr, box, f)
        if other != first:
            diff = next(m for m in sorted(set(first.terms) | set(other.terms))
                        if first.coefficient(m) != other.coefficient(m))
            raise SeedsDisagree("curvette families give different series", family=f, monomial=diff,
                                first=first.coefficient(diff), other=other.coefficient(diff))
    return AgreementReport(first, n, seeds)


# =========================================================
# ENGINE VS ORACLE
# =========================================================
@dataclass(frozen=True, eq=False)
class ComparisonReport:
    compared: int
    mismatches: pd.DataFrame

    @property
    def matches(self) -> bool:
        return self.mismatches.empty

    def first_mismatch(self) -> Optional[dict]:
        if self.matches:
            return None
        row = self.mismatches.iloc[0]
        return {"monomial": tuple(row["monomial"]), "engine": int(row["engine"]), "oracle": int(row["oracle"])}

    def raise_on_mismatch(self):
        first = self.first_mismatch()
        if first is not None:
            raise OracleMismatch("engine and oracle differ", **first)


def compare(engine: Union[FactorForm, Series], oracle: Series) -> ComparisonReport:
    """Coefficient-by-coefficient over the region valid for both sides."""
    if engine.r != oracle.r:
        raise DimensionMismatch("engine and oracle have different variable counts")
    box = oracle.box
    if isinstance(engine, FactorForm):
        engine = expand(engine, oracle.truncation, box)
    region = Series(oracle.r, min(engine.truncation, oracle.truncation), {},
                    _joint_box(engine.box, box))

    compared, rows = 0, []
    for v in _region_monomials(region):
        compared += 1
        a, b = engine.coefficient(v), oracle.coefficient(v)
        if a != b:
            rows.append({"monomial": v, "engine": a, "oracle": b})
    df = pd.DataFrame(rows, columns=["monomial", "engine", "oracle"])
    if not df.empty:
        logger.warning("engine/oracle mismatch at %d of %d monomials", len(df), compared)
    return ComparisonReport(compared, df)


def _joint_box(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return tuple(min(x, y) for x, y in zip(a, b))


def _region_monomials(region: Series):
    n = region.truncation
    ranges = [range((region.box[i] if region.box else n) + 1) for i in range(region.r)]
    for v in itertools.product(*ranges):
        if region.in_range(v):
            yield v
