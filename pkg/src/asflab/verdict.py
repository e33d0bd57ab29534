"""ASF classification on a finite model, analytic oracles, scale studies.

A pair is classified by estimating the p->p norms of its series operator S
and of S^-1: ``upper`` is the norm estimate of S, ``lower`` is 1 over the
norm estimate of S^-1 (0 when S is numerically singular), and the condition
is their ratio.  NOT_ASF and ASF are separated by configurable thresholds;
UNDECIDED is a real outcome, reported whenever the heuristic p-norm
estimation did not converge or the conditioning exceeds the certification
cap.  Finite models cannot certify the limit problem, so trends across
increasing L are reported as labels, never theorems.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse.linalg import LinearOperator, lgmres

from .errors import IncommensurateParameters, PainlessConditionError
from .frameop import (
    DENSE_CAP,
    FramePair,
    _analysis_values,
    _analysis_values_plain,
    _synthesis_values,
    _synthesis_values_reversed,
    assemble_frame_matrix,
)
from .model import (
    INTEGRALITY_TOL,
    CyclicModel,
    FrameBounds,
    GaborTriple,
    GridVector,
    _as_positive_int,
    build_cyclic_model,
    conjugate_exponent,
    sample_indicator_window,
)
from .operators import gabor_family
from .pnorms import NormEstimate, OpnormOptions, inverse_opnorm_estimate, opnorm_estimate

ASF = "ASF"
NOT_ASF = "NOT_ASF"
UNDECIDED = "UNDECIDED"

STABLE = "STABLE"
DEGENERATING = "DEGENERATING"
INCONCLUSIVE = "INCONCLUSIVE"

BESSEL_NOTE = "analysis-map p->p operator norm on the finite model (diagnostic only)"


@dataclass(frozen=True)
class Tolerances:
    """Classification thresholds and estimator knobs.

    eps_singular separates exact rank deficiency from ill-conditioned but
    invertible at double precision; kappa_max caps the condition number an
    ASF verdict may carry.  Both are configurable on purpose.
    """

    eps_singular: float = 1e-8
    kappa_max: float = 1e8
    tol: float = 1e-10
    max_iter: int = 1000
    restarts: int = 5
    seed: int = 0
    dense_cap: int = DENSE_CAP
    stable_spread: float = 0.10
    decay_factor: float = 2.0

    def opnorm_options(self) -> OpnormOptions:
        return OpnormOptions(
            tol=self.tol, max_iter=self.max_iter, restarts=self.restarts, seed=self.seed
        )

    def as_dict(self) -> dict:
        return {
            "eps_singular": self.eps_singular,
            "kappa_max": self.kappa_max,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "restarts": self.restarts,
            "seed": self.seed,
            "dense_cap": self.dense_cap,
            "stable_spread": self.stable_spread,
            "decay_factor": self.decay_factor,
            "bessel_bound_convention": BESSEL_NOTE,
        }


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            raise ValueError("NaN is not representable in the output schema")
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    raise TypeError(f"cannot serialize {type(obj)!r}")


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, compact separators, inf -> \"inf\"."""
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Verdict:
    """Classification record for one frame pair at one exponent.

    `upper_converged` / `inverse_converged` are diagnostics and not part of
    the serialized schema.
    """

    classification: str
    lower: float
    upper: float
    condition: float
    bessel_bound: float
    model: dict
    tolerances: dict
    upper_converged: bool = True
    inverse_converged: bool = True

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "lower": self.lower,
            "upper": self.upper,
            "condition": self.condition,
            "bessel_bound": self.bessel_bound,
            "model": dict(self.model),
            "tolerances": dict(self.tolerances),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def _bessel_estimate(pair: FramePair, p: float, opts: OpnormOptions) -> NormEstimate:
    # Unweighted matrix of the analysis map from (grid, weighted p-norm) to
    # (coefficients, plain l^p) is h^(1/q) * [element values]; stream it.
    # Its bilinear transpose synthesizes over the same reversed elements.
    h = pair.model.h
    q = conjugate_exponent(p)
    scale = h ** (-1.0 / p)
    hq = h ** (1.0 / q)
    anal = pair.anal

    def apply_b(v):
        return scale * _analysis_values(anal, v)

    def apply_bh(c):
        return np.conj(hq * _synthesis_values_reversed(anal, np.conj(c)))

    return opnorm_estimate(apply_b, apply_bh, pair.model.L, p, opts)


def _dense_estimates(pair, p, opts, dense_cap):
    s = assemble_frame_matrix(pair, dense_cap)
    sh = s.conj().T
    upper_est = opnorm_estimate(lambda v: s @ v, lambda v: sh @ v, s.shape[0], p, opts)
    inv_est = inverse_opnorm_estimate(s, p, opts)
    return upper_est, inv_est, True


def _matrix_free_estimates(pair, p, opts):
    L = pair.model.L

    def apply_s(v):
        return _synthesis_values(pair.synth, _analysis_values(pair.anal, v))

    def apply_sh(v):
        return np.conj(
            _synthesis_values_reversed(
                pair.anal, _analysis_values_plain(pair.synth, np.conj(v))
            )
        )

    upper_est = opnorm_estimate(apply_s, apply_sh, L, p, opts)

    op = LinearOperator((L, L), matvec=apply_s, rmatvec=apply_sh, dtype=np.complex128)
    op_h = LinearOperator((L, L), matvec=apply_sh, rmatvec=apply_s, dtype=np.complex128)
    solves_ok = [True]

    def _solve(operator, v):
        # lgmres emits a spurious divide warning when the Krylov process
        # terminates exactly (e.g. diagonal operators)
        with np.errstate(invalid="ignore", divide="ignore"):
            x, info = lgmres(operator, v, rtol=1e-12, atol=0.0, maxiter=1000)
        if info != 0:
            solves_ok[0] = False
        return x

    inv_est = opnorm_estimate(
        lambda v: _solve(op, v), lambda v: _solve(op_h, v), L, p, opts
    )
    if not solves_ok[0]:
        inv_est = replace(inv_est, converged=False)
    # iterative solves carry no certificate comparable to the LU pivot check
    return upper_est, inv_est, solves_ok[0]


def asf_verdict(pair: FramePair, p: float, tol: Tolerances | None = None) -> Verdict:
    """Classify a frame pair as ASF / NOT_ASF / UNDECIDED at exponent p.

    NOT_ASF fires on the singularity sentinel or when lower <= eps_singular *
    upper; ASF requires condition <= kappa_max and converged estimates on
    both sides; everything else is UNDECIDED.
    """
    p = float(p)
    conjugate_exponent(p)  # validates 1 < p < inf
    tol = tol or Tolerances()
    opts = tol.opnorm_options()
    if pair.model.L <= tol.dense_cap:
        upper_est, inv_est, certified = _dense_estimates(pair, p, opts, tol.dense_cap)
    else:
        upper_est, inv_est, certified = _matrix_free_estimates(pair, p, opts)
    bessel_est = _bessel_estimate(pair, p, opts)

    upper = upper_est.value
    singular = math.isinf(inv_est.value)
    lower = 0.0 if singular else 1.0 / inv_est.value
    condition = upper / lower if lower > 0.0 else float("inf")

    if (singular and inv_est.converged) or (certified and lower <= tol.eps_singular * upper):
        classification = NOT_ASF
    elif upper_est.converged and inv_est.converged and condition <= tol.kappa_max:
        classification = ASF
    else:
        classification = UNDECIDED

    md = pair.model.descriptor()
    md["p"] = p
    return Verdict(
        classification=classification,
        lower=lower,
        upper=upper,
        condition=condition,
        bessel_bound=bessel_est.value,
        model=md,
        tolerances=tol.as_dict(),
        upper_converged=upper_est.converged,
        inverse_converged=inv_est.converged,
    )


def painless_oracle(
    a: float, b: float, c: float, model: CyclicModel
) -> tuple[GridVector, FrameBounds]:
    """Covering counts and exact bounds for a short indicator window.

    When the window [0, c) fits inside one modulation period (c <= 1/b), the
    series operator of the indicator pair is multiplication by G(x)/b where
    G(x) counts the lattice translates of [0, c) covering x.  Returns the
    counts sampled on the grid and FrameBounds(min G / b, max G / b); the
    assembled matrix of the corresponding pair equals diag(G)/b to 1e-12.
    """
    a, b, c = float(a), float(b), float(c)
    for name, v in (("a", a), ("b", b), ("c", c)):
        if not (np.isfinite(v) and v > 0.0):
            raise ValueError(f"{name} must be a positive real, got {v}")
    if c * b > 1.0 + INTEGRALITY_TOL:
        raise PainlessConditionError(
            f"window length {c} exceeds one modulation period 1/b = {1.0 / b}"
        )
    if c > model.period + INTEGRALITY_TOL:
        raise ValueError(f"window length {c} exceeds the period {model.period}")
    dt = _as_positive_int(a / model.h, "shift/grid_res")
    if model.L % dt != 0:
        raise IncommensurateParameters(
            f"translation step {a} does not divide the period {model.period}"
        )
    cells = _as_positive_int(c / model.h, "win_len/grid_res")
    w = np.zeros(model.L, dtype=np.int64)
    w[:cells] = 1
    counts = np.zeros(model.L, dtype=np.int64)
    for n in range(model.L // dt):
        counts += np.roll(w, n * dt)
    bounds = FrameBounds(lower=float(counts.min()) / b, upper=float(counts.max()) / b)
    return GridVector(counts.astype(np.complex128), model), bounds


@dataclass(frozen=True)
class ScaleRow:
    L: int
    lower: float
    upper: float
    condition: float
    classification: str

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "lower": self.lower,
            "upper": self.upper,
            "condition": self.condition,
            "classification": self.classification,
        }


@dataclass(frozen=True)
class ScaleStudy:
    """Verdict rows across increasing model sizes plus a trend label.

    The trend thresholds are heuristics and are recorded in the output:
    there is no principled universal constant for extrapolating to the
    infinite model.
    """

    rows: tuple[ScaleRow, ...]
    skipped: tuple[tuple[int, str], ...]
    trend: str
    stable_spread: float
    decay_factor: float

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "skipped": [{"L": L, "reason": reason} for L, reason in self.skipped],
            "trend": self.trend,
            "thresholds": {
                "stable_spread": self.stable_spread,
                "decay_factor": self.decay_factor,
            },
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def _classify_trend(rows: tuple[ScaleRow, ...], tol: Tolerances) -> str:
    if len(rows) < 2:
        return INCONCLUSIVE
    lowers = [r.lower for r in rows]
    tail = lowers[len(lowers) // 2 :]
    top = max(tail)
    spread = 0.0 if top == 0.0 else (top - min(tail)) / top
    agree = len({r.classification for r in rows}) == 1
    if spread < tol.stable_spread and agree:
        return STABLE
    if lowers[0] > 0.0 and lowers[-1] <= lowers[0] / tol.decay_factor:
        return DEGENERATING
    return INCONCLUSIVE


def scale_study(
    synth: GaborTriple,
    anal: GaborTriple,
    p: float,
    period: float,
    sizes: list[int],
    tol: Tolerances | None = None,
) -> ScaleStudy:
    """Run asf_verdict at each L in `sizes` (grid refined as h = period/L).

    Sizes must be strictly increasing.  Incommensurate sizes are recorded as
    gaps rather than aborting the study.
    """
    tol = tol or Tolerances()
    sizes = [int(L) for L in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])) or sizes[0] < 1:
        raise ValueError(f"sizes must be strictly increasing positive integers, got {sizes}")

    def run_one(L: int):
        try:
            model = build_cyclic_model(synth, anal, period / L, period)
            v = asf_verdict(indicator_pair(model, synth, anal), p, tol)
        except IncommensurateParameters as exc:
            return L, None, str(exc)
        return L, v, None

    # verdicts at different sizes are independent; merge back in L order
    if len(sizes) == 1:
        results = [run_one(sizes[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(4, len(sizes))) as pool:
            results = list(pool.map(run_one, sizes))
    rows: list[ScaleRow] = []
    skipped: list[tuple[int, str]] = []
    for L, v, reason in results:
        if v is None:
            skipped.append((L, reason))
            continue
        rows.append(
            ScaleRow(
                L=L,
                lower=v.lower,
                upper=v.upper,
                condition=v.condition,
                classification=v.classification,
            )
        )
    return ScaleStudy(
        rows=tuple(rows),
        skipped=tuple(skipped),
        trend=_classify_trend(tuple(rows), tol),
        stable_spread=tol.stable_spread,
        decay_factor=tol.decay_factor,
    )


def indicator_pair(model: CyclicModel, synth: GaborTriple, anal: GaborTriple) -> FramePair:
    """The canonical pair of indicator windows on the model's two lattices."""
    g = sample_indicator_window(synth.win_len, model)
    w = sample_indicator_window(anal.win_len, model)
    return FramePair(
        gabor_family(g, model.dt_synth, model.df_synth),
        gabor_family(w, model.dt_anal, model.df_anal),
    )
