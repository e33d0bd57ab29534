"""Grid sweeps over lattice parameters with persistence, resume, heatmaps.

A sweep enumerates the product of the axis value lists in the fixed order
(a, b, c, alpha, beta, rho, p), last axis fastest.  Omitted analysis axes
mirror their synthesis counterpart point by point (alpha <- a, beta <- b,
rho <- c), so the grid size is always the product of the axes actually
given.  Each cell is evaluated independently and cells whose parameters do
not land on the grid are recorded as SKIPPED-INCOMMENSURATE rather than
auto-refined: silently changing the model would make neighboring cells
incomparable.

CSV schema (version v1, column order fixed):
    # asf-lab v1 spec=<sha256 of the canonical spec>
    idx,a,b,c,alpha,beta,rho,p,L,status,classification,lower,upper,condition,bessel_bound,ms

`status` is OK for single-size cells, the trend label (STABLE /
DEGENERATING / INCONCLUSIVE) for size-list cells, and
SKIPPED-INCOMMENSURATE for skipped cells, which carry no verdict fields.
The ms column is 0 unless timing is requested explicitly; wall-clock values
would break byte-identical reproducibility, which is the stronger contract.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from .errors import IncommensurateParameters, SpecHashMismatchError, SweepSpecError
from .model import GaborTriple, build_cyclic_model, conjugate_exponent
from .verdict import (
    ASF,
    NOT_ASF,
    UNDECIDED,
    Tolerances,
    asf_verdict,
    canonical_json,
    indicator_pair,
    scale_study,
)

AXIS_NAMES = ("a", "b", "c", "alpha", "beta", "rho", "p")
_MIRROR = {"alpha": "a", "beta": "b", "rho": "c"}

CSV_COLUMNS = (
    "idx", "a", "b", "c", "alpha", "beta", "rho", "p",
    "L", "status", "classification", "lower", "upper", "condition", "bessel_bound", "ms",
)
CSV_HEADER_PREFIX = "# asf-lab v1 spec="

STATUS_OK = "OK"
STATUS_SKIPPED = "SKIPPED-INCOMMENSURATE"

GRID_CAP = 10**6

#: classification -> PGM gray level
CLASS_PIXEL = {ASF: 255, UNDECIDED: 128, NOT_ASF: 0}
SKIPPED_PIXEL = 64
#: condition metric: pixel = clip(log10(cond)/log10(cap) * 255); inf clips to 255
CONDITION_PIXEL_CAP = 1e8


@dataclass(frozen=True)
class SweepSpec:
    """Axis value lists plus the model policy and tolerance overrides."""

    axes: dict
    period: float
    size: int | None = None
    sizes: tuple[int, ...] | None = None
    tolerances: Tolerances = Tolerances()

    def __post_init__(self):
        axes = {name: tuple(float(v) for v in vals) for name, vals in self.axes.items()}
        object.__setattr__(self, "axes", axes)
        for name in axes:
            if name not in AXIS_NAMES:
                raise SweepSpecError(f"unknown axis {name!r}; expected one of {AXIS_NAMES}")
            if not axes[name]:
                raise SweepSpecError(f"axis {name!r} has an empty value list")
        for required in ("a", "b", "c", "p"):
            if required not in axes:
                raise SweepSpecError(f"axis {required!r} is required")
        for name, vals in axes.items():
            for v in vals:
                if name == "p":
                    try:
                        conjugate_exponent(v)
                    except ValueError as exc:
                        raise SweepSpecError(f"axis p: {exc}") from exc
                elif not (math.isfinite(v) and v > 0.0):
                    raise SweepSpecError(f"axis {name!r}: values must be positive, got {v}")
        if not (math.isfinite(self.period) and self.period > 0.0):
            raise SweepSpecError(f"period must be positive, got {self.period}")
        if (self.size is None) == (self.sizes is None):
            raise SweepSpecError("exactly one of model size / model sizes must be given")
        if self.size is not None and self.size < 1:
            raise SweepSpecError(f"model size must be >= 1, got {self.size}")
        if self.sizes is not None:
            sizes = tuple(int(L) for L in self.sizes)
            if not sizes or sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
                raise SweepSpecError(
                    f"model sizes must be strictly increasing positive integers, got {sizes}"
                )
            object.__setattr__(self, "sizes", sizes)
        if self.grid_size() > GRID_CAP:
            raise SweepSpecError(f"grid size {self.grid_size()} exceeds cap {GRID_CAP}")

    def present_axes(self) -> list[str]:
        return [name for name in AXIS_NAMES if name in self.axes]

    def grid_size(self) -> int:
        n = 1
        for name in self.present_axes():
            n *= len(self.axes[name])
        return n

    def point(self, idx: int) -> dict:
        """Resolved parameter values at a lexicographic grid index."""
        if not 0 <= idx < self.grid_size():
            raise SweepSpecError(f"grid index {idx} out of range 0..{self.grid_size() - 1}")
        present = self.present_axes()
        rem = idx
        coords: dict = {}
        for name in reversed(present):
            vals = self.axes[name]
            rem, k = divmod(rem, len(vals))
            coords[name] = vals[k]
        resolved: dict = {}
        for name in AXIS_NAMES:
            if name in coords:
                resolved[name] = coords[name]
            else:
                resolved[name] = resolved[_MIRROR[name]]
        return resolved

    def canonical(self) -> dict:
        return {
            "version": 1,
            "axes": {name: list(self.axes[name]) for name in self.present_axes()},
            "period": self.period,
            "size": self.size,
            "sizes": list(self.sizes) if self.sizes is not None else None,
            "tolerances": asdict(self.tolerances),
        }

    def spec_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.canonical()).encode("ascii")).hexdigest()


def _axis_values(entry) -> list[float]:
    if isinstance(entry, dict):
        missing = {"start", "stop", "count"} - set(entry)
        if missing:
            raise SweepSpecError(f"range axis needs start/stop/count, missing {sorted(missing)}")
        start, stop, count = float(entry["start"]), float(entry["stop"]), int(entry["count"])
        if count < 1:
            raise SweepSpecError(f"range count must be >= 1, got {count}")
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    if isinstance(entry, (list, tuple)):
        return [float(v) for v in entry]
    return [float(entry)]


def sweep_spec_from_dict(d: dict) -> SweepSpec:
    """Build a SweepSpec from a parsed TOML/JSON document.

    Axes are explicit lists, single numbers, or {start, stop, count} linear
    ranges.  A missing p axis defaults to [2.0].  A top-level `seed` seeds
    the estimators unless the tolerances table sets its own.
    """
    if not isinstance(d, dict):
        raise SweepSpecError("sweep spec must be a table/object")
    unknown = set(d) - {"axes", "model", "tolerances", "seed"}
    if unknown:
        raise SweepSpecError(f"unknown top-level keys {sorted(unknown)}")
    axes_in = d.get("axes")
    if not isinstance(axes_in, dict):
        raise SweepSpecError("spec needs an `axes` table")
    axes = {name: _axis_values(entry) for name, entry in axes_in.items()}
    if "p" not in axes:
        axes["p"] = [2.0]
    model = d.get("model")
    if not isinstance(model, dict) or "period" not in model:
        raise SweepSpecError("spec needs a `model` table with a `period`")
    unknown = set(model) - {"period", "size", "sizes"}
    if unknown:
        raise SweepSpecError(f"unknown model keys {sorted(unknown)}")
    tol_in = dict(d.get("tolerances", {}))
    if "seed" in d and "seed" not in tol_in:
        tol_in["seed"] = int(d["seed"])
    valid = set(Tolerances.__dataclass_fields__)
    unknown = set(tol_in) - valid
    if unknown:
        raise SweepSpecError(f"unknown tolerance keys {sorted(unknown)}")
    try:
        tolerances = Tolerances(**tol_in)
    except TypeError as exc:
        raise SweepSpecError(f"bad tolerances: {exc}") from exc
    size = model.get("size")
    sizes = model.get("sizes")
    return SweepSpec(
        axes=axes,
        period=float(model["period"]),
        size=int(size) if size is not None else None,
        sizes=tuple(int(L) for L in sizes) if sizes is not None else None,
        tolerances=tolerances,
    )


def load_sweep_spec(path: str) -> SweepSpec:
    """Load a sweep spec from a TOML or JSON file (by extension)."""
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return sweep_spec_from_dict(tomllib.load(fh))
    with open(path, "r", encoding="utf-8") as fh:
        return sweep_spec_from_dict(json.load(fh))


@dataclass(frozen=True)
class ResultRow:
    idx: int
    a: float
    b: float
    c: float
    alpha: float
    beta: float
    rho: float
    p: float
    L: int
    status: str
    classification: str | None
    lower: float | None
    upper: float | None
    condition: float | None
    bessel_bound: float | None
    ms: int


@dataclass(frozen=True)
class ResultTable:
    spec_hash: str
    rows: tuple[ResultRow, ...]


def evaluate_cell(spec: SweepSpec, idx: int, timing: bool = False) -> ResultRow:
    """Evaluate one grid cell (verdict or scale study per the model policy)."""
    params = spec.point(idx)
    t0 = time.perf_counter()
    synth = GaborTriple(params["a"], params["b"], params["c"])
    anal = GaborTriple(params["alpha"], params["beta"], params["rho"])
    status = STATUS_OK
    classification = lower = upper = condition = bessel = None
    if spec.size is not None:
        L = spec.size
        try:
            model = build_cyclic_model(synth, anal, spec.period / L, spec.period)
            v = asf_verdict(indicator_pair(model, synth, anal), params["p"], spec.tolerances)
            classification, lower, upper = v.classification, v.lower, v.upper
            condition, bessel = v.condition, v.bessel_bound
        except IncommensurateParameters:
            status = STATUS_SKIPPED
    else:
        study = scale_study(
            synth, anal, params["p"], spec.period, list(spec.sizes), spec.tolerances
        )
        if study.rows:
            last = study.rows[-1]
            L = last.L
            status = study.trend
            classification, lower, upper, condition = (
                last.classification, last.lower, last.upper, last.condition,
            )
        else:
            L = spec.sizes[-1]
            status = STATUS_SKIPPED
    ms = int(round((time.perf_counter() - t0) * 1000.0)) if timing else 0
    return ResultRow(
        idx=idx,
        a=params["a"], b=params["b"], c=params["c"],
        alpha=params["alpha"], beta=params["beta"], rho=params["rho"], p=params["p"],
        L=L, status=status, classification=classification,
        lower=lower, upper=upper, condition=condition, bessel_bound=bessel, ms=ms,
    )


def run_sweep(spec: SweepSpec, workers: int = 1, timing: bool = False) -> ResultTable:
    """Evaluate every grid cell; row order is by grid index regardless of
    scheduling, so worker count never changes the output bytes."""
    if workers < 1:
        raise SweepSpecError(f"workers must be >= 1, got {workers}")
    indices = range(spec.grid_size())
    if workers == 1:
        rows = [evaluate_cell(spec, i, timing) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda i: evaluate_cell(spec, i, timing), indices))
    rows.sort(key=lambda r: r.idx)
    return ResultTable(spec_hash=spec.spec_hash(), rows=tuple(rows))


def resume_sweep(
    spec: SweepSpec, partial: ResultTable, workers: int = 1, timing: bool = False
) -> ResultTable:
    """Fill in the grid cells missing from a partial table.

    The merged result is identical to a fresh full run: each row depends only
    on the spec and its grid index.
    """
    if partial.spec_hash != spec.spec_hash():
        raise SpecHashMismatchError(
            f"partial results hash {partial.spec_hash} does not match spec "
            f"hash {spec.spec_hash()}"
        )
    total = spec.grid_size()
    have = {}
    for row in partial.rows:
        if not 0 <= row.idx < total:
            raise SweepSpecError(f"partial row index {row.idx} outside grid 0..{total - 1}")
        if row.idx in have:
            raise SweepSpecError(f"duplicate grid index {row.idx} in partial results")
        have[row.idx] = row
    missing = [i for i in range(total) if i not in have]
    if workers == 1 or not missing:
        fresh = [evaluate_cell(spec, i, timing) for i in missing]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fresh = list(pool.map(lambda i: evaluate_cell(spec, i, timing), missing))
    rows = list(have.values()) + fresh
    rows.sort(key=lambda r: r.idx)
    return ResultTable(spec_hash=spec.spec_hash(), rows=tuple(rows))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    f = float(value)
    if math.isinf(f):
        return "inf" if f > 0 else "-inf"
    return repr(f)


def table_to_csv(table: ResultTable) -> str:
    lines = [CSV_HEADER_PREFIX + table.spec_hash, ",".join(CSV_COLUMNS)]
    for row in sorted(table.rows, key=lambda r: r.idx):
        lines.append(",".join(_fmt(getattr(row, col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _parse_opt_float(text: str) -> float | None:
    if text == "":
        return None
    if text == "inf":
        return float("inf")
    return float(text)


def parse_result_table(text: str) -> ResultTable:
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if len(lines) < 2 or not lines[0].startswith(CSV_HEADER_PREFIX):
        raise SweepSpecError("not a sweep CSV: missing `# asf-lab v1 spec=` header")
    spec_hash = lines[0][len(CSV_HEADER_PREFIX):].strip()
    if lines[1] != ",".join(CSV_COLUMNS):
        raise SweepSpecError("unexpected CSV column header")
    rows = []
    for ln in lines[2:]:
        parts = ln.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise SweepSpecError(f"malformed CSV row: {ln!r}")
        rec = dict(zip(CSV_COLUMNS, parts))
        rows.append(
            ResultRow(
                idx=int(rec["idx"]),
                a=float(rec["a"]), b=float(rec["b"]), c=float(rec["c"]),
                alpha=float(rec["alpha"]), beta=float(rec["beta"]), rho=float(rec["rho"]),
                p=float(rec["p"]),
                L=int(rec["L"]),
                status=rec["status"],
                classification=rec["classification"] or None,
                lower=_parse_opt_float(rec["lower"]),
                upper=_parse_opt_float(rec["upper"]),
                condition=_parse_opt_float(rec["condition"]),
                bessel_bound=_parse_opt_float(rec["bessel_bound"]),
                ms=int(rec["ms"]),
            )
        )
    return ResultTable(spec_hash=spec_hash, rows=tuple(rows))


def write_bytes_atomic(path: str, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".asf-lab-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text_atomic(path: str, text: str) -> None:
    write_bytes_atomic(path, text.encode("utf-8"))


def _condition_pixel(cond: float | None) -> int:
    if cond is None or math.isinf(cond):
        return 255
    if cond <= 1.0:
        return 0
    level = math.log10(cond) / math.log10(CONDITION_PIXEL_CAP) * 255.0
    return max(0, min(255, int(round(level))))


def render_heatmap(
    table: ResultTable,
    x_axis: str,
    y_axis: str,
    metric: str,
    fixed: dict | None = None,
) -> tuple[bytes, int, int]:
    """Render a binary PGM (P5, maxval 255), one pixel per grid cell.

    x increases rightward and y increases downward, both in ascending
    parameter order.  metric `classification` maps ASF=255, UNDECIDED=128,
    NOT_ASF=0, skipped cells 64; metric `condition` uses the documented log
    scale.  Axes not shown must be pinned via `fixed` when they vary.
    """
    if x_axis not in AXIS_NAMES or y_axis not in AXIS_NAMES:
        raise SweepSpecError(f"axes must be among {AXIS_NAMES}")
    if x_axis == y_axis:
        raise SweepSpecError("x and y axes must differ")
    if metric not in ("classification", "condition"):
        raise SweepSpecError(f"metric must be classification or condition, got {metric!r}")
    fixed = dict(fixed or {})
    rows = table.rows
    for name, val in fixed.items():
        if name not in AXIS_NAMES:
            raise SweepSpecError(f"cannot fix unknown axis {name!r}")
        rows = tuple(r for r in rows if getattr(r, name) == float(val))
    if not rows:
        raise SweepSpecError("fixed-value slice is empty")
    xs = sorted({getattr(r, x_axis) for r in rows})
    ys = sorted({getattr(r, y_axis) for r in rows})
    cell: dict[tuple[float, float], ResultRow] = {}
    for r in rows:
        key = (getattr(r, x_axis), getattr(r, y_axis))
        if key in cell:
            raise SweepSpecError(
                f"slice is ambiguous at {x_axis}={key[0]}, {y_axis}={key[1]}; "
                "fix the remaining axes"
            )
        cell[key] = r
    pixels = bytearray()
    for yv in ys:
        for xv in xs:
            row = cell.get((xv, yv))
            if row is None:
                raise SweepSpecError(f"no grid cell at {x_axis}={xv}, {y_axis}={yv}")
            if row.status.startswith("SKIPPED"):
                pixels.append(SKIPPED_PIXEL if metric == "classification" else 255)
            elif metric == "classification":
                pixels.append(CLASS_PIXEL[row.classification])
            else:
                pixels.append(_condition_pixel(row.condition))
    header = f"P5\n{len(xs)} {len(ys)}\n255\n".encode("ascii")
    return header + bytes(pixels), len(xs), len(ys)


def emit_heatmap(
    table: ResultTable,
    x_axis: str,
    y_axis: str,
    metric: str,
    path: str,
    fixed: dict | None = None,
) -> tuple[int, int]:
    """Render and atomically write the PGM; returns (width, height)."""
    data, w, h = render_heatmap(table, x_axis, y_axis, metric, fixed)
    write_bytes_atomic(path, data)
    return w, h
