"""Domain parameters and the exact finite cyclic model.

Continuous lattice parameters are mapped onto a periodic grid of ``L`` points
with spacing ``h`` and period ``period = L*h``.  Commensurability is required,
never approximated: a translation step must be an integer number of grid
cells and a modulation step must fit an integer number of times into the
period.  Decimal inputs are accepted with an integrality tolerance of 1e-9,
but nothing is silently rounded beyond that.

Irrational lattice ratios are out of reach of this discretization and are
rejected by the commensurability checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ExponentDomainError, IncommensurateParameters

#: Tolerance used when testing that a decimal input is an exact integer.
INTEGRALITY_TOL = 1e-9


def conjugate_exponent(p: float) -> float:
    """Return the conjugate exponent q = p/(p-1), with 1/p + 1/q = 1."""
    p = float(p)
    if not np.isfinite(p) or p <= 1.0:
        raise ExponentDomainError(f"exponent must satisfy 1 < p < inf, got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class LebesgueExponent:
    """An exponent p in (1, inf) together with its conjugate q."""

    p: float
    q: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", conjugate_exponent(self.p))


@dataclass(frozen=True)
class GaborTriple:
    """One side's lattice parameters: translation step, modulation step and
    window length (all strictly positive reals)."""

    shift: float
    mod_step: float
    win_len: float

    def __post_init__(self):
        for name in ("shift", "mod_step", "win_len"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be a positive real, got {v}")
            object.__setattr__(self, name, v)


def _as_positive_int(x: float, name: str) -> int:
    r = round(x)
    if abs(x - r) > INTEGRALITY_TOL * max(1.0, abs(x)) or r < 1:
        raise IncommensurateParameters(f"{name} = {x} is not a positive integer")
    return int(r)


@dataclass(frozen=True)
class CyclicModel:
    """The finite discretization: L grid points with spacing h, period L*h,
    plus the synthesis/analysis lattice steps in grid units."""

    L: int
    h: float
    period: float
    dt_synth: int
    df_synth: int
    dt_anal: int
    df_anal: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L}")
        if not (np.isfinite(self.h) and self.h > 0.0):
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if abs(self.L * self.h - self.period) > INTEGRALITY_TOL * max(1.0, abs(self.period)):
            raise ValueError(
                f"period mismatch: L*h = {self.L * self.h}, period = {self.period}"
            )
        for name in ("dt_synth", "df_synth", "dt_anal", "df_anal"):
            step = getattr(self, name)
            if step < 1:
                raise IncommensurateParameters(f"{name} = {step} is not a positive integer")
            if self.L % step != 0:
                raise IncommensurateParameters(f"{name} = {step} does not divide L = {self.L}")

    @property
    def m_count_synth(self) -> int:
        return self.L // self.df_synth

    @property
    def n_count_synth(self) -> int:
        return self.L // self.dt_synth

    @property
    def m_count_anal(self) -> int:
        return self.L // self.df_anal

    @property
    def n_count_anal(self) -> int:
        return self.L // self.dt_anal

    def descriptor(self) -> dict:
        """Plain-dict summary used in serialized outputs."""
        return {
            "L": self.L,
            "h": self.h,
            "period": self.period,
            "dt_synth": self.dt_synth,
            "df_synth": self.df_synth,
            "dt_anal": self.dt_anal,
            "df_anal": self.df_anal,
        }


def build_cyclic_model(
    synth: GaborTriple, anal: GaborTriple, h: float, period: float
) -> CyclicModel:
    """Map continuous lattice parameters onto an exact cyclic grid.

    Translation steps become ``dt = shift/h`` grid cells and modulation steps
    become ``df = mod_step*period`` frequency cells; all four must be positive
    integers dividing L = period/h.  The first violated condition is named in
    the raised :class:`IncommensurateParameters`.
    """
    h = float(h)
    period = float(period)
    if not (np.isfinite(h) and h > 0.0):
        raise ValueError(f"grid spacing must be positive, got {h}")
    if not (np.isfinite(period) and period > 0.0):
        raise ValueError(f"period must be positive, got {period}")
    L = _as_positive_int(period / h, "period/grid_res")
    dt_synth = _as_positive_int(synth.shift / h, "synth.shift/grid_res")
    dt_anal = _as_positive_int(anal.shift / h, "anal.shift/grid_res")
    df_synth = _as_positive_int(synth.mod_step * period, "synth.mod_step*period")
    df_anal = _as_positive_int(anal.mod_step * period, "anal.mod_step*period")
    return CyclicModel(
        L=L,
        h=h,
        period=period,
        dt_synth=dt_synth,
        df_synth=df_synth,
        dt_anal=dt_anal,
        df_anal=df_anal,
    )


@dataclass(frozen=True)
class GridVector:
    """A complex-valued function sampled on the model grid.

    The sample array is copied on construction and frozen; vectors are safe
    to share across threads.
    """

    values: np.ndarray
    model: CyclicModel

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.complex128, copy=True).reshape(-1)
        if arr.shape[0] != self.model.L:
            raise ValueError(
                f"vector length {arr.shape[0]} does not match model L = {self.model.L}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.model.L


@dataclass(frozen=True)
class FrameBounds:
    """A lower/upper operator-bound pair, 0 <= lower <= upper."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError(f"need 0 <= lower <= upper, got ({self.lower}, {self.upper})")


def sample_indicator_window(c: float, model: CyclicModel) -> GridVector:
    """Sample the indicator of [0, c) on the model grid.

    Half-open convention: grid index j is included iff j*h < c, so adjacent
    translates of the window tile the period exactly.
    """
    c = float(c)
    if not (np.isfinite(c) and c > 0.0):
        raise ValueError(f"window length must be positive, got {c}")
    if c > model.period + INTEGRALITY_TOL * max(1.0, model.period):
        raise ValueError(f"window length {c} exceeds the period {model.period}")
    cells = _as_positive_int(c / model.h, "win_len/grid_res")
    vals = np.zeros(model.L, dtype=np.complex128)
    vals[:cells] = 1.0
    return GridVector(vals, model)
