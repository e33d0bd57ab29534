"""Shared builders for the test suite."""

import numpy as np

from asflab import CyclicModel, FramePair, GridVector, gabor_family


def make_model(L, h=1.0, dt=1, df=None):
    """A cyclic model with the same lattice on both sides."""
    df = L if df is None else df
    return CyclicModel(
        L=L, h=h, period=L * h, dt_synth=dt, df_synth=df, dt_anal=dt, df_anal=df
    )


def delta(model, j=0):
    vals = np.zeros(model.L, dtype=complex)
    vals[j] = 1.0
    return GridVector(vals, model)


def random_vector(model, rng):
    return GridVector(
        rng.standard_normal(model.L) + 1j * rng.standard_normal(model.L), model
    )


def same_window_pair(window, dt, df):
    return FramePair(gabor_family(window, dt, df), gabor_family(window, dt, df))


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]
