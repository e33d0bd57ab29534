"""Cyclic translation and modulation operators, and Gabor families.

Both operators are invertible isometries of every weighted p-norm: translation
permutes samples and modulation multiplies by unit-modulus phases.  Phases are
drawn from a cached table of L-th roots of unity with the frequency index
reduced mod L, so aliased modulation indices reproduce each other exactly.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import IncommensurateParameters
from .model import CyclicModel, GridVector


@lru_cache(maxsize=128)
def _roots_of_unity(L: int) -> np.ndarray:
    w = np.exp(2j * np.pi * np.arange(L) / L)
    w.setflags(write=False)
    return w


def _phase_vector(L: int, freq: int) -> np.ndarray:
    """exp(2*pi*i*freq*j/L) for j = 0..L-1, via the reduced root table."""
    idx = (int(freq) * np.arange(L)) % L
    return _roots_of_unity(L)[idx]


def translate(f: GridVector, n_steps: int) -> GridVector:
    """Cyclic shift: output[j] = f[(j - n_steps) mod L]."""
    return GridVector(np.roll(f.values, int(n_steps)), f.model)


def modulate(f: GridVector, m_index: int, df: int) -> GridVector:
    """Pointwise phase: output[j] = exp(2*pi*i*m_index*df*j/L) * f[j]."""
    L = f.model.L
    return GridVector(f.values * _phase_vector(L, int(m_index) * int(df)), f.model)


class GaborFamily:
    """The family of time-frequency shifts of a window over an integer lattice.

    Element (m, n) is ``exp(2*pi*i*m*df*j/L) * window[(j - n*dt) mod L]`` with
    m in [0, L/df) and n in [0, L/dt).  Modulation indices range over one full
    aliasing period only, so no element is double-counted.  The flat order is
    deterministic row-major with n outer and m inner: k = n*(L/df) + m.

    Families are immutable after construction; the dense element array is
    materialized lazily and cached.
    """

    def __init__(self, window: GridVector, dt: int, df: int):
        L = window.model.L
        dt = int(dt)
        df = int(df)
        if dt < 1 or L % dt != 0:
            raise IncommensurateParameters(f"dt = {dt} does not divide L = {L}")
        if df < 1 or L % df != 0:
            raise IncommensurateParameters(f"df = {df} does not divide L = {L}")
        self.window = window
        self.dt = dt
        self.df = df
        self._array: np.ndarray | None = None

    @property
    def model(self) -> CyclicModel:
        return self.window.model

    @property
    def m_count(self) -> int:
        return self.model.L // self.df

    @property
    def n_count(self) -> int:
        return self.model.L // self.dt

    @property
    def size(self) -> int:
        return self.m_count * self.n_count

    @property
    def redundancy(self) -> float:
        """Family size over space dimension, L/(dt*df)."""
        return self.size / self.model.L

    def __len__(self) -> int:
        return self.size

    def element(self, m: int, n: int) -> GridVector:
        return modulate(translate(self.window, n * self.dt), m, self.df)

    def element_at(self, k: int) -> GridVector:
        n, m = divmod(int(k), self.m_count)
        return self.element(m, n)

    def __iter__(self):
        for n in range(self.n_count):
            for m in range(self.m_count):
                yield self.element(m, n)

    def as_array(self) -> np.ndarray:
        """Dense (size, L) array of family elements in flat order."""
        if self._array is None:
            L = self.model.L
            w = self.window.values
            shifts = np.stack([np.roll(w, n * self.dt) for n in range(self.n_count)])
            phases = np.stack([_phase_vector(L, m * self.df) for m in range(self.m_count)])
            arr = (shifts[:, None, :] * phases[None, :, :]).reshape(self.size, L)
            arr.setflags(write=False)
            self._array = arr
        return self._array


def gabor_family(window: GridVector, dt: int, df: int) -> GaborFamily:
    """Build the Gabor family of `window` over the (dt, df) lattice."""
    return GaborFamily(window, dt, df)
