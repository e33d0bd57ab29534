"""Business handlers shared by the HTTP routes and the local CLI client.

Each handler takes a validated request model and returns a plain dict ready
for canonical JSON serialization.  Domain exceptions propagate to the caller
(the app maps them to HTTP errors, the CLI to exit codes).
"""

from __future__ import annotations

import base64

from ..model import GaborTriple, build_cyclic_model
from ..sweep import (
    parse_result_table,
    render_heatmap,
    resume_sweep,
    run_sweep,
    sweep_spec_from_dict,
    table_to_csv,
)
from ..verdict import (
    Tolerances,
    asf_verdict,
    indicator_pair,
    painless_oracle,
    scale_study,
    to_jsonable,
)
from .schemas import (
    CheckRequest,
    OracleRequest,
    ReportRequest,
    ScaleStudyRequest,
    SweepRequest,
    TolerancesIn,
    TripleIn,
)


def _triple(t: TripleIn) -> GaborTriple:
    return GaborTriple(shift=t.shift, mod_step=t.mod_step, win_len=t.win_len)


def _tolerances(t: TolerancesIn | None) -> Tolerances:
    if t is None:
        return Tolerances()
    return Tolerances(**t.model_dump())


def check(req: CheckRequest) -> dict:
    synth = _triple(req.synth)
    anal = _triple(req.anal) if req.anal is not None else synth
    model = build_cyclic_model(synth, anal, req.grid_res, req.period)
    verdict = asf_verdict(indicator_pair(model, synth, anal), req.p, _tolerances(req.tolerances))
    return to_jsonable(verdict.to_dict())


def oracle(req: OracleRequest) -> dict:
    synth = _triple(req.synth)
    model = build_cyclic_model(synth, synth, req.grid_res, req.period)
    counts, bounds = painless_oracle(synth.shift, synth.mod_step, synth.win_len, model)
    covering = [int(round(v.real)) for v in counts.values]
    return {
        "g_min": min(covering),
        "g_max": max(covering),
        "lower": bounds.lower,
        "upper": bounds.upper,
        "covering": covering,
    }


def study(req: ScaleStudyRequest) -> dict:
    synth = _triple(req.synth)
    anal = _triple(req.anal) if req.anal is not None else synth
    result = scale_study(synth, anal, req.p, req.period, req.sizes, _tolerances(req.tolerances))
    return to_jsonable(result.to_dict())


def sweep(req: SweepRequest) -> dict:
    spec_dict = {
        "axes": req.spec.axes,
        "model": req.spec.model.model_dump(exclude_none=True),
        "seed": req.spec.seed,
    }
    if req.spec.tolerances is not None:
        spec_dict["tolerances"] = req.spec.tolerances.model_dump()
    spec = sweep_spec_from_dict(spec_dict)
    if req.partial_csv:
        table = resume_sweep(spec, parse_result_table(req.partial_csv), req.workers, req.timing)
    else:
        table = run_sweep(spec, req.workers, req.timing)
    skipped = sum(1 for r in table.rows if r.status.startswith("SKIPPED"))
    return {
        "csv": table_to_csv(table),
        "rows": len(table.rows),
        "skipped": skipped,
        "spec_hash": table.spec_hash,
    }


def report(req: ReportRequest) -> dict:
    table = parse_result_table(req.csv)
    data, width, height = render_heatmap(table, req.x_axis, req.y_axis, req.metric, req.fixed)
    return {
        "pgm_base64": base64.b64encode(data).decode("ascii"),
        "width": width,
        "height": height,
    }
