# src/workers/resolution_graph.py
"""
Dual graph of an embedded resolution and its derived data.

Ops:
 - validate(g, mode)      -> g, raises on structural / mode errors
 - euler_data(g)          -> chi(E°_sigma) per component
 - linking_data(g)        -> M = -E^-1, d = det(-E), H = coker(-E)
 - element_order(ld, s)   -> order d_sigma of h_sigma in H

All components are rational curves; multi-edges count once per incidence.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import lcm
from typing import Literal, Mapping, Optional, Sequence

import networkx as nx
from sympy.polys.matrices import DomainMatrix

from src.errors import (
    BadReference,
    Disconnected,
    NotNegativeDefinite,
    NotUnimodular,
    NotWellDefined,
    SingularIntersectionMatrix,
    SingularMatrix,
    UnknownComponent,
)
from src.utils.exact_linalg import (
    determinant,
    int_matrix,
    invert,
    is_positive_definite,
    smith_normal_form,
    to_int_rows,
    to_rows,
    SmithForm,
)
from src.utils.group_ring import FiniteAbelianGroup

logger = logging.getLogger(__name__)

Mode = Literal["plane-curve", "rational-singularity"]
PLANE_CURVE: Mode = "plane-curve"
RATIONAL_SINGULARITY: Mode = "rational-singularity"


# =========================================================
# TYPES
# =========================================================
@dataclass(frozen=True)
class Component:
    id: str
    self_intersection: int


@dataclass(frozen=True)
class Arrow:
    component: str
    label: str


@dataclass(frozen=True, eq=False)
class ResolutionGraph:
    components: tuple[Component, ...]
    edges: tuple[tuple[str, str], ...] = ()
    arrows: tuple[Arrow, ...] = ()
    ideal_specs: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    # -------- lookups --------
    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.components]

    def index(self, component_id: str) -> int:
        for i, c in enumerate(self.components):
            if c.id == component_id:
                return i
        raise UnknownComponent(f"unknown component {component_id!r}")

    def arrows_at(self, component_id: str, labels: Optional[Sequence[str]] = None) -> int:
        return sum(1 for a in self.arrows
                   if a.component == component_id and (labels is None or a.label in labels))

    def arrow_component(self, label: str) -> Optional[str]:
        for a in self.arrows:
            if a.label == label:
                return a.component
        return None

    def nx_graph(self) -> nx.MultiGraph:
        G = nx.MultiGraph()
        for c in self.components:
            G.add_node(c.id, self_intersection=c.self_intersection)
        G.add_edges_from(self.edges)
        return G

    def intersection_matrix(self) -> DomainMatrix:
        """E with E_ss = self-intersection and E_sd = number of edges s-d."""
        n = len(self.components)
        pos = {c.id: i for i, c in enumerate(self.components)}
        rows = [[0] * n for _ in range(n)]
        for c in self.components:
            rows[pos[c.id]][pos[c.id]] = c.self_intersection
        for a, b in self.edges:
            rows[pos[a]][pos[b]] += 1
            rows[pos[b]][pos[a]] += 1
        return int_matrix(rows)

    # -------- derived graphs --------
    def with_arrows(self, labels: Sequence[str]) -> "ResolutionGraph":
        """Same graph keeping only the arrows with the given labels."""
        return replace(self, arrows=tuple(a for a in self.arrows if a.label in labels))

    def with_corner_blowup(self, a: str, b: str, new_id: Optional[str] = None) -> "ResolutionGraph":
        """
        Blow up the intersection point of adjacent components a and b.
        The new (-1)-component sits between them; every ideal spec gets
        multiplicity k_a + k_b on it.
        """
        edges = list(self.edges)
        for i, (x, y) in enumerate(edges):
            if {x, y} == {a, b}:
                del edges[i]
                break
        else:
            raise BadReference(f"components {a!r} and {b!r} are not adjacent")
        new_id = new_id or f"E{len(self.components) + 1}"
        if new_id in self.ids:
            raise BadReference(f"component id {new_id!r} already used")

        comps = []
        for c in self.components:
            if c.id in (a, b):
                c = Component(c.id, c.self_intersection - 1)
            comps.append(c)
        comps.append(Component(new_id, -1))
        edges += [(a, new_id), (new_id, b)]
        specs = {
            name: {**dict(k), new_id: k.get(a, 0) + k.get(b, 0)}
            for name, k in self.ideal_specs.items()
        }
        return ResolutionGraph(tuple(comps), tuple(edges), self.arrows, specs)

    # -------- serialization --------
    def to_dict(self) -> dict:
        return {
            "components": [{"id": c.id, "self_intersection": c.self_intersection} for c in self.components],
            "edges": [list(e) for e in self.edges],
            "arrows": [{"component": a.component, "label": a.label} for a in self.arrows],
            "ideal_specs": {name: dict(k) for name, k in self.ideal_specs.items()},
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ResolutionGraph":
        return cls(
            components=tuple(Component(str(c["id"]), int(c["self_intersection"])) for c in raw["components"]),
            edges=tuple((str(a), str(b)) for a, b in raw.get("edges", [])),
            arrows=tuple(Arrow(str(a["component"]), str(a["label"])) for a in raw.get("arrows", [])),
            ideal_specs={str(n): {str(s): int(v) for s, v in k.items()}
                         for n, k in (raw.get("ideal_specs") or {}).items()},
        )

    def to_dot(self, euler: Optional["EulerData"] = None) -> str:
        lines = ["graph resolution {"]
        for c in self.components:
            label = f"{c.id}\\n{c.self_intersection}"
            if euler is not None:
                label += f"\\nchi={euler.chi[c.id]}"
            lines.append(f'  "{c.id}" [label="{label}"];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -- "{b}";')
        for i, arrow in enumerate(self.arrows):
            node = f"arrow{i}"
            lines.append(f'  "{node}" [label="{arrow.label}", shape=plaintext];')
            lines.append(f'  "{arrow.component}" -- "{node}" [dir=forward];')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class EulerData:
    chi: dict[str, int]

    def total(self) -> int:
        return sum(self.chi.values())


@dataclass(frozen=True, eq=False)
class LinkingData:
    ids: tuple[str, ...]
    M: DomainMatrix
    d: int
    smith: SmithForm
    minus_e: tuple[tuple[int, ...], ...]
    group: FiniteAbelianGroup
    _rows: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def m(self, sigma: str, delta: str) -> Fraction:
        return self._rows[self.position(sigma)][self.position(delta)]

    def position(self, component_id: str) -> int:
        try:
            return self.ids.index(component_id)
        except ValueError:
            raise UnknownComponent(f"unknown component {component_id!r}") from None

    def row(self, sigma: str) -> tuple[Fraction, ...]:
        return self._rows[self.position(sigma)]

    def column(self, delta: str) -> tuple[Fraction, ...]:
        j = self.position(delta)
        return tuple(r[j] for r in self._rows)

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]


# =========================================================
# OPERATIONS
# =========================================================
def validate(g: ResolutionGraph, mode: Mode = PLANE_CURVE) -> ResolutionGraph:
    ids = g.ids
    if not ids:
        raise Disconnected("graph has no components")
    if len(set(ids)) != len(ids):
        raise BadReference("duplicate component ids", ids=ids)
    known = set(ids)

    for c in g.components:
        if not isinstance(c.self_intersection, int) or c.self_intersection >= 0:
            raise BadReference(f"component {c.id!r} needs a negative self-intersection",
                               self_intersection=c.self_intersection)
    for a, b in g.edges:
        if a not in known or b not in known:
            raise BadReference(f"edge ({a}, {b}) references an unknown component")
        if a == b:
            raise BadReference(f"self-loop at {a!r}")
    for arrow in g.arrows:
        if arrow.component not in known:
            raise BadReference(f"arrow {arrow.label!r} references unknown component {arrow.component!r}")
    for name, k in g.ideal_specs.items():
        for s, v in k.items():
            if s not in known:
                raise BadReference(f"ideal {name!r} references unknown component {s!r}")
            if v < 0:
                raise BadReference(f"ideal {name!r} has a negative multiplicity on {s!r}")

    if not nx.is_connected(g.nx_graph()):
        raise Disconnected("dual graph is not connected")

    minus_e = -g.intersection_matrix()
    if mode == PLANE_CURVE:
        det = determinant(minus_e)
        if det != 1:
            raise NotUnimodular("plane-curve graphs need det(-E) = 1", det=det)
    elif mode == RATIONAL_SINGULARITY:
        if not is_positive_definite(minus_e):
            raise NotNegativeDefinite("intersection matrix is not negative definite")
    else:
        raise BadReference(f"unknown mode {mode!r}")

    logger.debug("validated %s graph: %d components, %d edges, %d arrows",
                 mode, len(ids), len(g.edges), len(g.arrows))
    return g


def euler_data(g: ResolutionGraph, arrow_labels: Optional[Sequence[str]] = None) -> EulerData:
    """
    chi(E°_s) = 2 - edge incidences at s - arrows at s.
    With arrow_labels, only those arrows puncture the components.
    """
    G = g.nx_graph()
    chi = {c.id: 2 - G.degree(c.id) - g.arrows_at(c.id, arrow_labels) for c in g.components}
    return EulerData(chi)


def linking_data(g: ResolutionGraph) -> LinkingData:
    E = g.intersection_matrix()
    try:
        M = -invert(E)
    except SingularMatrix:
        raise SingularIntersectionMatrix("intersection matrix is singular") from None
    minus_e = -E
    d = abs(int(determinant(minus_e)))
    smith = smith_normal_form(minus_e)
    group = FiniteAbelianGroup.from_smith_form(smith)
    rows = tuple(tuple(r) for r in to_rows(M))
    if group.order() != d:
        raise NotWellDefined("cokernel order differs from det(-E)", order=group.order(), d=d)
    logger.debug("linking data: d=%d, H=%s", d, group.invariant_factors or "trivial")
    minus_rows = tuple(tuple(r) for r in to_int_rows(minus_e))
    return LinkingData(tuple(g.ids), M, d, smith, minus_rows, group, rows)


def element_order(ld: LinkingData, sigma: str) -> int:
    """lcm of the denominators of row sigma of M; equals the order of h_sigma."""
    i = ld.position(sigma)
    order = lcm(1, *(q.denominator for q in ld.row(sigma)))
    if order != ld.group.generator_order(i):
        raise NotWellDefined("element order disagrees with the group presentation",
                             component=sigma, from_m=order, from_group=ld.group.generator_order(i))
    return order
