# src/handlers/commands.py
"""
One handler per CLI sub-command. Handlers take a loaded JobFile plus the
parsed flags and return a CommandResult; printing and exit codes are the
CLI's business.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from src import config
from src.errors import HypothesisViolated, JobError, OracleMismatch
from src.handlers.jobfile import JobFile
from src.utils.parsing import format_rational
from src.utils.power_series import FactorForm, expand
from src.workers.curve_resolver import ResolvedCurve, resolve
from src.workers.equivariant import characters_from_linking, equivariant_poincare, invariant_part
from src.workers.ideal_calculus import (
    ideal_graph,
    mixed_base,
    multiplicity_vector,
    poincare_of_ideal,
    poincare_of_ideal_set,
    validate_presentation,
)
from src.workers.oracle import check_divisorial, compare, realize
from src.workers.poincare_engine import (
    FiltrationSpec,
    alexander_from_strata,
    poincare_from_graph,
    poincare_of_filtration,
    zeta_and_alexander,
)
from src.workers.resolution_graph import (
    RATIONAL_SINGULARITY,
    ResolutionGraph,
    element_order,
    euler_data,
    linking_data,
    validate,
)

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    text: str
    data: dict = field(default_factory=dict)
    dot: Optional[str] = None
    exit_code: int = 0


@dataclass
class Options:
    truncate: Optional[int] = None
    seed: Optional[int] = None
    compare: bool = False


# =========================================================
# SHARED
# =========================================================
def geometry(job: JobFile) -> tuple[ResolutionGraph, Optional[ResolvedCurve]]:
    if job.branches is not None:
        rc = resolve(job.branch_objects())
        return rc.graph, rc
    g = validate(job.graph.to_graph(), job.options.mode)
    return g, None


def truncation(job: JobFile, opts: Options) -> int:
    if opts.truncate is not None:
        return opts.truncate
    if job.options.truncation is not None:
        return job.options.truncation
    return config.DEFAULT_TRUNCATION


def _source(g: ResolutionGraph, rc: Optional[ResolvedCurve]) -> Union[ResolutionGraph, ResolvedCurve]:
    return rc if rc is not None else g


def filtration_spec(job: JobFile, g: ResolutionGraph, rc: Optional[ResolvedCurve]) -> FiltrationSpec:
    """Job filtration, else every branch as a curve index."""
    if job.filtration is not None:
        return job.filtration.to_spec()
    names = rc.branch_names if rc is not None else [a.label for a in g.arrows]
    if not names:
        raise JobError("job needs 'ideals', a 'filtration' or at least one branch")
    return FiltrationSpec.of((), names)


def engine_series(job: JobFile, g: ResolutionGraph, rc: Optional[ResolvedCurve]) -> FactorForm:
    if job.filtration is None and job.ideals:
        return poincare_from_graph(g, job.ideals)
    return poincare_of_filtration(_source(g, rc), filtration_spec(job, g, rc))


def _series_block(label: str, f: FactorForm, n: int) -> tuple[list[str], dict]:
    s = expand(f, n)
    lines = [f"{label} = {f.render()}", f"  to degree {n}: {s.render()}"]
    return lines, {"factor_form": f.to_dict(), "series": s.to_dict()}


# =========================================================
# HANDLERS
# =========================================================
def cmd_resolve(job: JobFile, opts: Options) -> CommandResult:
    if job.branches is None:
        raise JobError("resolve needs a 'branches' section")
    g, rc = geometry(job)
    graph = ResolutionGraph(g.components, g.edges, g.arrows,
                            {n: dict(zip(g.ids, rc.valuation_vector(n))) for n in rc.branch_names})
    table = rc.valuation_table()
    lines = [f"{len(g.components)} components, {len(g.edges)} edges, {len(g.arrows)} arrows"]
    lines += [f"  {a} -- {b}" for a, b in g.edges]
    lines += [f"  {a.label} -> {a.component}" for a in g.arrows]
    lines += ["", table.to_string(index=False)]
    data = {
        "graph": graph.to_dict(),
        "branches": [b.to_dict() for b in rc.branches],
        "valuations": table.to_dict(orient="records"),
    }
    return CommandResult("\n".join(lines), data, dot=g.to_dot(euler_data(g)))


def cmd_poincare(job: JobFile, opts: Options) -> CommandResult:
    g, rc = geometry(job)
    lines, data = _series_block("P", engine_series(job, g, rc), truncation(job, opts))
    return CommandResult("\n".join(lines), data)


def cmd_alexander(job: JobFile, opts: Options) -> CommandResult:
    g, rc = geometry(job)
    n = truncation(job, opts)
    if job.ideals:
        f = alexander_from_strata(g, job.ideals)
    else:
        f = zeta_and_alexander(engine_series(job, g, rc)).alexander
    lines, data = _series_block("Delta", f, n)
    return CommandResult("\n".join(lines), data)


def cmd_zeta(job: JobFile, opts: Options) -> CommandResult:
    g, rc = geometry(job)
    za = zeta_and_alexander(engine_series(job, g, rc))
    lines, data = _series_block("zeta", za.zeta, truncation(job, opts))
    data["alexander"] = za.alexander.to_dict()
    lines.append(f"Delta = {za.alexander.render()}")
    return CommandResult("\n".join(lines), data)


def cmd_equivariant(job: JobFile, opts: Options) -> CommandResult:
    g, _ = geometry(job)
    if not job.ideals:
        raise JobError("equivariant needs an 'ideals' section")
    n = truncation(job, opts)
    ld = linking_data(g)
    f = equivariant_poincare(g, job.ideals, ld)
    s = expand(f, n)
    lines = [f"d = {ld.d}, H = {'Z/' + ' + Z/'.join(map(str, ld.group.invariant_factors)) if ld.d > 1 else '0'}",
             f"P^L = {f.render()}", f"  to degree {n}: {s.render()}"]
    data = {"d": ld.d, "factor_form": f.to_dict(), "series": s.to_dict()}
    if ld.d > 1:
        data["characters"] = {}
        for s_id, alpha in characters_from_linking(ld).items():
            coords = ld.group.character_coordinates(alpha)
            data["characters"][s_id] = {"values": alpha.to_list(), "order": element_order(ld, s_id),
                                        "invariant": [format_rational(q) for q in coords]}
            lines.append(f"  alpha_{s_id} = {alpha.render()} on H: ({', '.join(map(format_rational, coords))})")
    if len(job.ideals) == 1:
        inv = invariant_part(s, ld.d)
        lines.append(f"  invariant part: {inv.render()}")
        data["invariant_part"] = inv.to_dict()
    return CommandResult("\n".join(lines), data)


def cmd_ideal(job: JobFile, opts: Options) -> CommandResult:
    ips = job.ideal_presentations()
    if not ips:
        raise JobError("ideal needs a 'presentations' section")
    g, _ = geometry(job)
    mode = job.options.mode
    for ip in ips:
        validate_presentation(g, ip, mode)
    n = truncation(job, opts)
    ld = linking_data(g)
    lines, data = [], {"presentations": []}

    for i, ip in enumerate(ips):
        k = multiplicity_vector(ld, g, ip)
        data["presentations"].append({"multiplicities": dict(zip(g.ids, map(format_rational, k))),
                                      "d_sigma": {s: element_order(ld, s) for s in ip.divisorial_part}})
        lines.append(f"I{i + 1}: k = ({', '.join(map(format_rational, k))})")

    if mode == RATIONAL_SINGULARITY:
        # series on a general singularity come from the product formula with k
        ks = [multiplicity_vector(ld, g, ip) for ip in ips]
        if any(x.denominator != 1 for k in ks for x in k):
            raise HypothesisViolated("multiplicity vector is not integral")
        used = g.with_arrows(sorted({j for ip in ips for j in ip.curves()}))
        f = poincare_from_graph(used, [[int(x) for x in k] for k in ks])
    else:
        curves = sorted({j for ip in ips for j in ip.curve_part})
        base = mixed_base(g, curves, ld)
        f = poincare_of_ideal(ips[0], base) if len(ips) == 1 else poincare_of_ideal_set(ips, base)
        if len(ips) == 1 and not ips[0].is_trivial():
            k = [int(x) for x in multiplicity_vector(ld, g, ips[0])]
            direct = poincare_from_graph(ideal_graph(g, ips[0]), [k])
            if direct != f:
                raise OracleMismatch("substitution and product formula disagree",
                                     substitution=f.render(), product=direct.render())
    block, series = _series_block("P_I", f, n)
    data.update(series)
    return CommandResult("\n".join(lines + block), data)


def cmd_oracle(job: JobFile, opts: Options) -> CommandResult:
    g, rc = geometry(job)
    if rc is None:
        raise JobError("oracle needs a 'branches' section")
    spec = filtration_spec(job, g, rc)
    n = truncation(job, opts)
    box = job.options.box or [n] * spec.r
    seed = opts.seed if opts.seed is not None else config.DEFAULT_SEED
    vr = realize(rc, spec, box, seed=seed, seeds=job.options.seeds or None)
    report = check_divisorial(vr, box)
    oracle = report.series
    lines = [f"oracle (box {tuple(box)}): {oracle.render()}"]
    data = {"oracle": oracle.to_dict(), "seed_families": report.families,
            "seeds": {s: [[format_rational(q) for q in fam] for fam in fams]
                      for s, fams in report.seeds.items()}}
    if not opts.compare:
        return CommandResult("\n".join(lines), data)

    engine = poincare_of_filtration(rc, spec)
    cmp = compare(engine, oracle)
    data["compared"] = cmp.compared
    if cmp.matches:
        lines.append(f"MATCH ({cmp.compared} coefficients)")
        data["match"] = True
        return CommandResult("\n".join(lines), data)
    first = cmp.first_mismatch()
    lines.append(f"MISMATCH at {first['monomial']}: engine {first['engine']}, oracle {first['oracle']}")
    data["match"] = False
    data["first_mismatch"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in first.items()}
    return CommandResult("\n".join(lines), data, exit_code=OracleMismatch.exit_code)


HANDLERS: dict[str, Callable[[JobFile, Options], CommandResult]] = {
    "resolve": cmd_resolve,
    "poincare": cmd_poincare,
    "alexander": cmd_alexander,
    "zeta": cmd_zeta,
    "equivariant": cmd_equivariant,
    "ideal": cmd_ideal,
    "oracle": cmd_oracle,
}
