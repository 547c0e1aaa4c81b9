# src/handlers/jobfile.py
"""
Job files: one JSON document per run.

{
  "branches": [{"name": "C", "x_order": 2, "y_terms": [[3, "1"]]}],   # or "graph": {...}
  "ideals": ["curve", {"E1": 1}, [1, 2, 3]],
  "filtration": {"components": ["E3"], "branches": ["C"]},
  "presentations": [{"divisorial": {"E3": "1"}, "curves": {"C": 1}}],
  "options": {"truncation": 20, "mode": "plane-curve", "box": [10], "seeds": {"E3": ["1", "2", "5/3"]}}
}

Rationals are strings "p/q" (plain ints accepted); floats are rejected.
"""
from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.errors import JobError, ParseError
from src.utils.parsing import parse_rational
from src.workers.curve_resolver import PuiseuxBranch
from src.workers.ideal_calculus import IdealPresentation
from src.workers.poincare_engine import FiltrationIndex, FiltrationSpec
from src.workers.resolution_graph import ResolutionGraph

logger = logging.getLogger(__name__)


def _rational(value: Any) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError("rationals must be integers or 'p/q' strings")
    if isinstance(value, int):
        return Fraction(value)
    q = parse_rational(str(value))
    if q is None:
        raise ValueError(f"not a rational: {value!r}")
    return q


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# =========================================================
# SECTIONS
# =========================================================
class BranchModel(_Strict):
    name: str
    x_order: int = Field(..., ge=1)
    y_terms: list[tuple[int, Any]] = Field(default_factory=list)
    swapped: bool = False
    x_terms: Optional[list[tuple[int, Any]]] = None

    @field_validator("y_terms", "x_terms")
    @classmethod
    def _exact_coefficients(cls, v):
        if v is None:
            return v
        return [(e, _rational(c)) for e, c in v]

    def to_branch(self) -> PuiseuxBranch:
        return PuiseuxBranch(self.name, self.x_order, tuple(self.y_terms), self.swapped,
                             tuple(self.x_terms) if self.x_terms is not None else None)


class ComponentModel(_Strict):
    id: str
    self_intersection: int


class ArrowModel(_Strict):
    component: str
    label: str


class GraphModel(_Strict):
    components: list[ComponentModel]
    edges: list[tuple[str, str]] = Field(default_factory=list)
    arrows: list[ArrowModel] = Field(default_factory=list)
    ideal_specs: dict[str, dict[str, int]] = Field(default_factory=dict)

    def to_graph(self) -> ResolutionGraph:
        return ResolutionGraph.from_dict(self.model_dump())


class FiltrationIndexModel(_Strict):
    kind: Literal["divisorial", "curve", "ideal"]
    ref: Union[str, dict[str, int], list[int]]


class FiltrationModel(_Strict):
    components: list[str] = Field(default_factory=list)
    branches: list[str] = Field(default_factory=list)
    # explicit ordering; overrides components/branches when given
    indices: Optional[list[FiltrationIndexModel]] = None

    def to_spec(self) -> FiltrationSpec:
        if self.indices is not None:
            return FiltrationSpec(tuple(FiltrationIndex(i.kind, i.ref) for i in self.indices))
        return FiltrationSpec.of(self.components, self.branches)


class PresentationModel(_Strict):
    divisorial: dict[str, Any] = Field(default_factory=dict)
    curves: dict[str, int] = Field(default_factory=dict)

    @field_validator("divisorial")
    @classmethod
    def _exact_exponents(cls, v):
        return {s: _rational(x) for s, x in v.items()}

    def to_presentation(self) -> IdealPresentation:
        return IdealPresentation(dict(self.divisorial), dict(self.curves))


class OptionsModel(_Strict):
    truncation: Optional[int] = Field(None, ge=0)
    mode: Literal["plane-curve", "rational-singularity"] = "plane-curve"
    box: Optional[list[int]] = None
    seeds: dict[str, list[Any]] = Field(default_factory=dict)

    @field_validator("seeds")
    @classmethod
    def _exact_seeds(cls, v):
        return {s: [_rational(x) for x in xs] for s, xs in v.items()}


class JobFile(_Strict):
    branches: Optional[list[BranchModel]] = None
    graph: Optional[GraphModel] = None
    ideals: list[Union[str, dict[str, int], list[int]]] = Field(default_factory=list)
    filtration: Optional[FiltrationModel] = None
    presentations: list[PresentationModel] = Field(default_factory=list)
    options: OptionsModel = Field(default_factory=OptionsModel)

    def check(self) -> "JobFile":
        """Geometry source and cross references the schema cannot see."""
        if (self.branches is None) == (self.graph is None):
            raise JobError("exactly one of 'branches' or 'graph' is required")
        if self.branches is not None:
            names = [b.name for b in self.branches]
            if len(set(names)) != len(names):
                raise JobError("branch names must be unique", names=names)
            known_branches = set(names)
        else:
            known_branches = {a.label for a in self.graph.arrows}
            known_components = {c.id for c in self.graph.components}
            for ideal in self.ideals:
                if isinstance(ideal, str) and ideal not in self.graph.ideal_specs:
                    raise JobError(f"ideal {ideal!r} is not defined in graph.ideal_specs")
            for p in self.presentations:
                missing = set(p.divisorial) - known_components
                if missing:
                    raise JobError(f"presentation references unknown components {sorted(missing)}")
        if self.filtration is not None:
            missing = set(self.filtration.to_spec().branches()) - known_branches
            if missing:
                raise JobError(f"filtration references unknown branches {sorted(missing)}")
        for p in self.presentations:
            missing = set(p.curves) - known_branches
            if missing:
                raise JobError(f"presentation references unknown branches {sorted(missing)}")
        return self

    def branch_objects(self) -> list[PuiseuxBranch]:
        return [b.to_branch() for b in self.branches or []]

    def ideal_presentations(self) -> list[IdealPresentation]:
        return [p.to_presentation() for p in self.presentations]


# =========================================================
# LOADING
# =========================================================
def parse_job(text: str, source: str = "<job>") -> JobFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    try:
        job = JobFile.model_validate(raw)
    except ValidationError as exc:
        err = exc.errors()[0]
        where = ".".join(str(p) for p in err["loc"]) or source
        raise ParseError(err["msg"], location=where) from None
    logger.debug("loaded job %s", source)
    return job.check()


def load_job(path: Union[str, Path]) -> JobFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise JobError(f"cannot read job file {path}: {exc.strerror}") from None
    return parse_job(text, str(path))
