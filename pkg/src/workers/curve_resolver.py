# src/workers/curve_resolver.py
"""
Embedded resolution of plane branches by simulated blowups.

Branches are exact polynomial parametrisations (x(t), y(t)) over Q. At every
infinitely near point a branch is described by local coordinates (u, v) as
t-series; blowing up divides by the coordinate of lower order:
  ord u <= ord v : (u, v) -> (u, v/u - c), direction c = (v/u)(0)
  ord u >  ord v : (u, v) -> (v, u/v),     direction infinity
The exceptional curve of the blown-up point is always {u = 0} at its
children. Divisions by non-monomials go through ring_series inversion and
consume t-adic precision; exhausting it restarts with a doubled budget.

Ops:
 - resolve(branches)                 -> ResolvedCurve
 - intersection_number(b1, b2)       -> Noether's sum of m_p(C1) m_p(C2)
 - curvette(rc, sigma, seed)         -> branch meeting E_sigma transversally
 - blowup_tree / random_resolution   -> trees without branches
 - extra_corner_blowups(rc, pairs)   -> blow up intersection points of components
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, inf
from typing import Iterable, Optional, Sequence

import pandas as pd
from sympy.polys.domains import QQ
from sympy.polys.ring_series import mul_xin, rs_mul, rs_series_inversion, rs_trunc
from sympy.polys.rings import ring

from src import config
from src.errors import (
    BadReference,
    IndistinguishableBranches,
    NotPrimitive,
    OracleMismatch,
    ParseError,
    SeedNotGeneric,
    TruncationTooShort,
    UnknownBranch,
    UnknownComponent,
)
from src.utils.exact_linalg import to_fraction, to_qq
from src.utils.parsing import format_monomial, format_rational
from src.workers.resolution_graph import (
    PLANE_CURVE,
    Arrow,
    Component,
    ResolutionGraph,
    euler_data,
    validate,
)

logger = logging.getLogger(__name__)

# one-variable series ring shared by every branch computation
R, T = ring("t", QQ)

Terms = tuple[tuple[int, Fraction], ...]


# =========================================================
# BRANCHES
# =========================================================
def _normalize_terms(raw: Iterable) -> Terms:
    return tuple((int(e), Fraction(c)) for e, c in raw)


def poly_from_terms(terms: Terms):
    return R.from_dict({(e,): to_qq(c) for e, c in terms}) if terms else R.zero


def terms_from_poly(p) -> Terms:
    return tuple(sorted((m[0], to_fraction(c)) for m, c in p.items()))


@dataclass(frozen=True)
class PuiseuxBranch:
    """
    x = t^n, y = sum a_i t^i (x and y exchanged when swapped).
    x_terms overrides t^n with a general polynomial; curvettes use it.
    """

    name: str
    x_order: int
    y_terms: Terms = ()
    swapped: bool = False
    x_terms: Optional[Terms] = None

    def __post_init__(self):
        object.__setattr__(self, "y_terms", _normalize_terms(self.y_terms))
        if self.x_terms is not None:
            object.__setattr__(self, "x_terms", _normalize_terms(self.x_terms))

    @classmethod
    def from_polynomials(cls, name: str, x, y) -> "PuiseuxBranch":
        x_terms = terms_from_poly(x)
        if not x_terms:
            # x = 0: store the curve swapped so the leading exponent lives on y
            y_terms = terms_from_poly(y)
            return cls(name, y_terms[0][0] if y_terms else 0, (), True, y_terms)
        return cls(name, x_terms[0][0], terms_from_poly(y), False, x_terms)

    def first_terms(self) -> Terms:
        return self.x_terms if self.x_terms is not None else ((self.x_order, Fraction(1)),)

    def coordinate_terms(self) -> tuple[Terms, Terms]:
        """(x terms, y terms) with the swap applied."""
        if self.swapped:
            return self.y_terms, self.first_terms()
        return self.first_terms(), self.y_terms

    def coordinates(self):
        x, y = self.coordinate_terms()
        return poly_from_terms(x), poly_from_terms(y)

    def describe(self) -> str:
        def poly(terms):
            if not terms:
                return "0"
            out = []
            for e, c in terms:
                mono = format_monomial((e,))
                out.append(mono if c == 1 else f"{format_rational(c)} {mono}")
            return " + ".join(out)
        x, y = self.coordinate_terms()
        return f"{self.name}: x = {poly(x)}, y = {poly(y)}"

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "x_order": self.x_order,
            "y_terms": [[e, format_rational(c)] for e, c in self.y_terms],
            "swapped": self.swapped,
        }
        if self.x_terms is not None:
            out["x_terms"] = [[e, format_rational(c)] for e, c in self.x_terms]
        return out


def validate_branch(b: PuiseuxBranch) -> PuiseuxBranch:
    where = f"branch {b.name!r}"
    if b.x_order < 1:
        raise ParseError("x_order must be a positive integer", location=where)
    for label, terms in (("y_terms", b.y_terms), ("x_terms", b.x_terms or ())):
        exps = [e for e, _ in terms]
        if any(e < 1 for e in exps):
            raise ParseError(f"{label} exponents must be positive", location=where)
        if any(e2 <= e1 for e1, e2 in zip(exps, exps[1:])):
            raise ParseError(f"{label} exponents must be strictly increasing", location=where)
        if any(c == 0 for _, c in terms):
            raise ParseError(f"{label} coefficients must be nonzero", location=where)
    if b.x_terms is not None and (not b.x_terms or b.x_terms[0][0] != b.x_order):
        raise ParseError("x_order must be the lowest exponent of x_terms", location=where)

    exps = [e for e, _ in b.first_terms()] + [e for e, _ in b.y_terms]
    g = 0
    for e in exps:
        g = gcd(g, e)
    if g != 1:
        raise NotPrimitive(f"parametrization of {b.name!r} is not injective", gcd=g)
    return b


# =========================================================
# INFINITELY NEAR POINTS
# =========================================================
@dataclass(frozen=True)
class InfinitelyNearPoint:
    id: str
    parent: Optional[str]
    # None means the point at infinity of the parent (or the root itself)
    direction: Optional[Fraction]
    u_curve: Optional[str]
    v_curve: Optional[str]
    proximate_to: frozenset[str]
    multiplicities: dict[str, int] = field(default_factory=dict, hash=False, compare=False)

    @property
    def branches_through(self) -> frozenset[str]:
        return frozenset(self.multiplicities)


@dataclass(frozen=True)
class InfinitelyNearTree:
    points: tuple[InfinitelyNearPoint, ...]

    def get(self, point_id: str) -> InfinitelyNearPoint:
        for p in self.points:
            if p.id == point_id:
                return p
        raise UnknownComponent(f"unknown point {point_id!r}")

    def children(self, point_id: str) -> list[InfinitelyNearPoint]:
        return [p for p in self.points if p.parent == point_id]

    def chart_path(self, point_id: str) -> list[Optional[Fraction]]:
        """Directions from the root down to the point (root excluded)."""
        out = []
        p = self.get(point_id)
        while p.parent is not None:
            out.append(p.direction)
            p = self.get(p.parent)
        return out[::-1]

    def proximate_count(self, point_id: str) -> int:
        return sum(1 for p in self.points if point_id in p.proximate_to)

    def instructions(self) -> list[tuple[Optional[str], Optional[Fraction]]]:
        return [(p.parent, p.direction) for p in self.points]


class _TreeBuilder:
    """Adds blown-up points and keeps the dual graph edges current."""

    def __init__(self):
        self.points: dict[str, InfinitelyNearPoint] = {}
        self.edges: list[tuple[str, str]] = []
        self.used: dict[str, set] = {}
        # creation order of the points; ids are labels only
        self.rank: dict[str, int] = {}

    def curves_at(self, parent: Optional[str], direction: Optional[Fraction]):
        """(u_curve, v_curve) through the point (parent, direction)."""
        if parent is None:
            return None, None
        p = self.points[parent]
        if direction is None:
            return parent, p.u_curve
        if direction == 0:
            return parent, p.v_curve
        return parent, None

    def add(self, parent: Optional[str], direction: Optional[Fraction],
            multiplicities: Optional[dict[str, int]] = None) -> str:
        if parent is not None:
            if parent not in self.points:
                raise BadReference(f"unknown parent point {parent!r}")
            if direction in self.used[parent]:
                raise BadReference(f"point ({parent}, {direction}) already blown up")
            self.used[parent].add(direction)
        elif self.points:
            raise BadReference("only the first point may be the origin")

        u_curve, v_curve = self.curves_at(parent, direction)
        pid = f"E{len(self.points) + 1}"
        self.rank[pid] = len(self.rank)
        proximate = frozenset(c for c in (u_curve, v_curve) if c is not None)
        for c in proximate:
            self.edges.append((c, pid))
        if u_curve is not None and v_curve is not None:
            for i, e in enumerate(self.edges):
                if set(e) == {u_curve, v_curve}:
                    del self.edges[i]
                    break

        self.points[pid] = InfinitelyNearPoint(
            pid, parent, direction, u_curve, v_curve, proximate, dict(multiplicities or {}))
        self.used[pid] = set()
        return pid

    def tree(self) -> InfinitelyNearTree:
        return InfinitelyNearTree(tuple(self.points.values()))

    def graph(self, arrows: Sequence[Arrow] = ()) -> ResolutionGraph:
        tree = self.tree()
        comps = tuple(Component(p.id, -1 - tree.proximate_count(p.id)) for p in tree.points)
        return ResolutionGraph(comps, tuple(self.edges), tuple(arrows))


# =========================================================
# JETS
# =========================================================
class _Exhausted(Exception):
    def __init__(self, shared: bool = False):
        super().__init__("t-adic precision exhausted")
        self.shared = shared


@dataclass(frozen=True)
class _Jet:
    """Local coordinates of a branch, known mod t^prec unless exact."""

    name: str
    u: object
    v: object
    u_exact: bool
    v_exact: bool
    prec: int


def _order(p, exact: bool, prec: int):
    if not p:
        if exact:
            return inf
        raise _Exhausted()
    low = min(m[0] for m in p.keys())
    if not exact and low >= prec:
        raise _Exhausted()
    return low


def _divide(num, num_exact: bool, den, den_exact: bool, a: int, prec: int):
    """num / den with ord den = a <= ord num, valid mod t^prec."""
    if not num and num_exact:
        return num, True
    shifted = mul_xin(num, 0, -a) if num else num
    unit = mul_xin(den, 0, -a)
    if den_exact and len(unit) == 1:
        q = shifted.mul_ground(QQ.one / unit[(0,)])
        exact = num_exact
    else:
        q = rs_mul(shifted, rs_series_inversion(unit, T, prec), T, prec)
        exact = False
    if not exact:
        q = rs_trunc(q, T, prec)
    return q, exact


def _truncated(p, exact: bool, prec: int):
    return p if exact else rs_trunc(p, T, prec)


def _blow_up(jet: _Jet):
    """-> (direction, child jet, multiplicity of the branch at this point)."""
    a = _order(jet.u, jet.u_exact, jet.prec)
    b = _order(jet.v, jet.v_exact, jet.prec)
    mult = int(min(a, b))
    if a <= b:
        prec = jet.prec - a
        if prec < 1:
            raise _Exhausted()
        v1, v1_exact = _divide(jet.v, jet.v_exact, jet.u, jet.u_exact, a, prec)
        c = v1.get((0,), QQ.zero)
        child = _Jet(jet.name, _truncated(jet.u, jet.u_exact, prec), v1 - c,
                     jet.u_exact, v1_exact, prec)
        return to_fraction(c), child, mult
    prec = jet.prec - b
    if prec < 1:
        raise _Exhausted()
    u1, u1_exact = _divide(jet.u, jet.u_exact, jet.v, jet.v_exact, b, prec)
    child = _Jet(jet.name, _truncated(jet.v, jet.v_exact, prec), u1, jet.v_exact, u1_exact, prec)
    return None, child, mult


def _direction_key(d: Optional[Fraction]):
    return (1, Fraction(0)) if d is None else (0, d)


def _simulate(branches: Sequence[PuiseuxBranch], budget: int):
    builder = _TreeBuilder()
    exits: dict[str, tuple[str, Optional[Fraction]]] = {}
    jets = []
    for b in branches:
        x, y = b.coordinates()
        jets.append(_Jet(b.name, x, y, True, True, budget))

    stack = [(None, None, jets)]
    while stack:
        parent, direction, group = stack.pop()
        if parent is not None and len(group) == 1:
            _, v_curve = builder.curves_at(parent, direction)
            jet = group[0]
            if v_curve is None and _order(jet.u, jet.u_exact, jet.prec) == 1:
                exits[jet.name] = (parent, direction)
                continue

        try:
            blown = [_blow_up(jet) for jet in group]
        except _Exhausted:
            raise _Exhausted(shared=len(group) > 1) from None

        pid = builder.add(parent, direction, {jet.name: m for jet, (_, _, m) in zip(group, blown)})
        children: dict = {}
        for d, child, _ in blown:
            children.setdefault(d, []).append(child)
        for d in sorted(children, key=_direction_key, reverse=True):
            stack.append((pid, d, children[d]))

    return builder, exits


# =========================================================
# RESOLVED CURVES
# =========================================================
@dataclass(frozen=True, eq=False)
class ResolvedCurve:
    graph: ResolutionGraph
    valuations: dict[tuple[str, str], int]
    branch_semidata: dict[str, tuple[int, ...]]
    tree: InfinitelyNearTree
    branches: tuple[PuiseuxBranch, ...] = ()
    exits: dict[str, tuple[str, Optional[Fraction]]] = field(default_factory=dict)

    @property
    def branch_names(self) -> list[str]:
        return [b.name for b in self.branches]

    def branch(self, name: str) -> PuiseuxBranch:
        for b in self.branches:
            if b.name == name:
                return b
        raise UnknownBranch(f"unknown branch {name!r}")

    def arrow_component(self, name: str) -> str:
        if name not in self.exits:
            raise UnknownBranch(f"unknown branch {name!r}")
        return self.exits[name][0]

    def valuation_vector(self, name: str) -> tuple[int, ...]:
        self.branch(name)
        return tuple(self.valuations[(sigma, name)] for sigma in self.graph.ids)

    def special_directions(self, sigma: str) -> set:
        """Directions on E_sigma hit by other components, blown-up points or branches."""
        p = self.tree.get(sigma)
        out = {c.direction for c in self.tree.children(sigma)}
        out |= {d for comp, d in self.exits.values() if comp == sigma}
        out.add(None)
        if p.v_curve is not None:
            out.add(Fraction(0))
        return out

    def valuation_table(self) -> pd.DataFrame:
        chi = euler_data(self.graph).chi
        rows = []
        for c in self.graph.components:
            row = {"component": c.id, "self_intersection": c.self_intersection, "chi": chi[c.id]}
            for name in self.branch_names:
                row[name] = self.valuations[(c.id, name)]
            rows.append(row)
        return pd.DataFrame(rows)


def _valuations(tree: InfinitelyNearTree, names: Sequence[str]) -> dict[tuple[str, str], int]:
    """v_p(C) = m_p(C) + sum of v_q(C) over the points q that p is proximate to."""
    val: dict[tuple[str, str], int] = {}
    for p in tree.points:
        for name in names:
            val[(p.id, name)] = p.multiplicities.get(name, 0) + sum(val[(q, name)] for q in p.proximate_to)
    return val


def _finish(builder: _TreeBuilder, branches: Sequence[PuiseuxBranch], exits) -> ResolvedCurve:
    names = [b.name for b in branches]
    arrows = [Arrow(exits[n][0], n) for n in names]
    graph = validate(builder.graph(arrows), PLANE_CURVE)
    tree = builder.tree()
    semidata = {n: tuple(p.multiplicities[n] for p in tree.points if n in p.multiplicities) for n in names}
    return ResolvedCurve(graph, _valuations(tree, names), semidata, tree, tuple(branches), dict(exits))


def resolve(branches: Sequence[PuiseuxBranch]) -> ResolvedCurve:
    """
    Blow up the origin and every infinitely near point a branch passes
    through until each strict transform is smooth, meets one exceptional
    component transversally at a free point and no other branch.
    """
    branches = [validate_branch(b) for b in branches]
    names = [b.name for b in branches]
    if len(set(names)) != len(names):
        raise BadReference("branch names must be unique", names=names)
    seen = {}
    for b in branches:
        key = b.coordinate_terms()
        if key in seen:
            raise IndistinguishableBranches(f"branches {seen[key]!r} and {b.name!r} coincide")
        seen[key] = b.name

    budget = config.PUISEUX_PRECISION
    while True:
        try:
            builder, exits = _simulate(branches, budget)
            break
        except _Exhausted as exc:
            if budget >= config.PUISEUX_PRECISION_CAP:
                if exc.shared:
                    raise IndistinguishableBranches(
                        "branches still share a point when the precision budget is exhausted",
                        budget=budget) from None
                raise TruncationTooShort("precision budget exhausted", budget=budget) from None
            budget = min(2 * budget, config.PUISEUX_PRECISION_CAP)
            logger.warning("precision exhausted, retrying blowups with budget %d", budget)

    rc = _finish(builder, branches, exits)
    logger.debug("resolved %d branches with %d blowups", len(branches), len(rc.tree.points))
    return rc


# =========================================================
# INTERSECTION NUMBERS
# =========================================================
def _smooth_graph_equation(b: PuiseuxBranch):
    """(g terms, which) when b is y = g(x) (which='y') or x = g(y) (which='x')."""
    if b.x_terms is not None or b.x_order != 1:
        return None
    return b.y_terms, ("x" if b.swapped else "y")


def _substitution_order(smooth: PuiseuxBranch, other: PuiseuxBranch) -> Optional[int]:
    eq = _smooth_graph_equation(smooth)
    if eq is None:
        return None
    g_terms, which = eq
    x, y = other.coordinates()
    lhs, arg = (y, x) if which == "y" else (x, y)
    value = lhs - sum((arg ** e).mul_ground(to_qq(c)) for e, c in g_terms) if g_terms else lhs
    if not value:
        raise IndistinguishableBranches(f"{other.name!r} lies on {smooth.name!r}")
    return min(m[0] for m in value.keys())


def intersection_number(b1: PuiseuxBranch, b2: PuiseuxBranch) -> int:
    """Noether's formula over the infinitely near points shared by both branches."""
    if b1.name == b2.name:
        b2 = replace(b2, name=f"{b2.name}'")
    rc = resolve([b1, b2])
    total = sum(p.multiplicities.get(b1.name, 0) * p.multiplicities.get(b2.name, 0)
                for p in rc.tree.points)

    for smooth, other in ((b2, b1), (b1, b2)):
        check = _substitution_order(smooth, other)
        if check is not None:
            if check != total:
                raise OracleMismatch("intersection number disagrees with substitution",
                                     noether=total, substitution=check)
            break
    return total


# =========================================================
# CURVETTES
# =========================================================
def _push_down(tree: InfinitelyNearTree, sigma: str, seed: Fraction):
    """Line through direction `seed` of E_sigma, mapped back to (x, y)."""
    u, v = T, T.mul_ground(to_qq(seed))
    p = tree.get(sigma)
    while p.parent is not None:
        if p.direction is None:
            u, v = u * v, u
        else:
            u, v = u, u * (v + to_qq(p.direction))
        p = tree.get(p.parent)
    return u, v


def curvette(rc: ResolvedCurve, sigma: str, seed, name: Optional[str] = None) -> PuiseuxBranch:
    seed = Fraction(seed)
    rc.tree.get(sigma)
    if seed in rc.special_directions(sigma):
        raise SeedNotGeneric(f"seed {format_rational(seed)} is a special point of {sigma}")
    x, y = _push_down(rc.tree, sigma, seed)
    return PuiseuxBranch.from_polynomials(name or f"L[{sigma}:{format_rational(seed)}]", x, y)


def draw_seed(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-97, 97), rng.randint(1, 13))


def generic_seeds(rc: ResolvedCurve, sigma: str, count: int, rng: random.Random,
                  exclude: Iterable[Fraction] = ()) -> list[Fraction]:
    """`count` distinct seeds avoiding the special points of E_sigma and `exclude`."""
    banned = set(rc.special_directions(sigma)) | set(exclude)
    out: list[Fraction] = []
    for _ in range(count):
        for attempt in range(config.SEED_RETRIES):
            s = draw_seed(rng)
            if s not in banned:
                break
            logger.debug("rejected seed %s on %s (attempt %d)", s, sigma, attempt + 1)
        else:
            raise SeedNotGeneric(f"no generic seed on {sigma} after {config.SEED_RETRIES} draws")
        banned.add(s)
        out.append(s)
    return out


# =========================================================
# TREES WITHOUT BRANCHES
# =========================================================
def blowup_tree(instructions: Sequence[tuple[Optional[str], Optional[Fraction]]]) -> ResolvedCurve:
    """
    Build a resolution from explicit (parent, direction) blowups; the first
    instruction is the origin (parent None). direction None is infinity.
    """
    builder = _TreeBuilder()
    for parent, direction in instructions:
        builder.add(parent, Fraction(direction) if direction is not None else None)
    return _finish(builder, [], {})


def random_resolution(rng: random.Random, n_points: int) -> ResolvedCurve:
    instructions: list[tuple[Optional[str], Optional[Fraction]]] = [(None, None)]
    used: dict[str, set] = {"E1": set()}
    while len(instructions) < n_points:
        parent = rng.choice(sorted(used))
        options = [d for d in (Fraction(0), None) if d not in used[parent]]
        pick = rng.random()
        if options and pick < 0.6:
            d = rng.choice(options)
        else:
            d = draw_seed(rng)
            if d in used[parent]:
                continue
        used[parent].add(d)
        used[f"E{len(instructions) + 1}"] = set()
        instructions.append((parent, d))
    return blowup_tree(instructions)


def extra_corner_blowups(rc: ResolvedCurve, pairs: Sequence[tuple[str, str]]) -> ResolvedCurve:
    """
    Blow up the intersection point of each adjacent pair (a, b). The new
    component has chi = 0 and valuations v_a + v_b.
    """
    builder = _TreeBuilder()
    for p in rc.tree.points:
        builder.add(p.parent, p.direction, p.multiplicities)
    for a, b in pairs:
        edges = builder.edges
        if not any(set(e) == {a, b} for e in edges):
            raise BadReference(f"components {a!r} and {b!r} are not adjacent")
        early, late = sorted((a, b), key=builder.rank.__getitem__)
        q = builder.points[late]
        direction = None if q.u_curve == early else Fraction(0)
        builder.add(late, direction)
    return _finish(builder, rc.branches, rc.exits)
