"""The bilinear duality pairing and the series operator S of a frame pair.

S maps x to the sum over the family of (analysis coefficient k) times (the
k-th synthesis element).  The pairing is bilinear -- no complex conjugation
-- with Riemann weight h, so discrete quantities converge to their
continuous counterparts as the grid refines.

Index alignment: synthesis element (m, n) is paired with the analysis
element at modulation index (-m) mod (L/df).  Both enumerations run over the
same family (negating the modulation index permutes one aliasing period),
but the alignment matters term by term: under this one the bilinear
coefficient of a conjugated window equals the classical sesquilinear Gabor
coefficient, short indicator pairs diagonalize into covering counts, and
anal = conj(synth) reproduces the self-adjoint p = 2 frame operator.  The
naive (m, n)-with-(m, n) alignment would instead couple each grid point to
its reflection and none of those identities hold.

``frame_operator_apply`` is matrix-free: per translation index it folds the
windowed signal into one aliasing period and applies a length-(L/df) FFT,
never storing an L-by-L matrix.  Dense assembly exists separately as an
oracle for the estimators and the tests.

Analysis and synthesis families may live on different lattices but must have
index sets of equal cardinality, because the series pairs them term by term.
"""

from __future__ import annotations

import numpy as np

from .errors import DenseCapExceededError, ModelMismatchError
from .model import GridVector
from .operators import GaborFamily

#: Largest L for which dense assembly is allowed by default.
DENSE_CAP = 4096

#: CoefficientSeq: complex coefficients in family flat order (n outer, m inner).
CoefficientSeq = np.ndarray


class FramePair:
    """An analysis family and a synthesis family on the same model.

    Rejected at construction if the models differ or the index sets have
    different cardinality (no zero-padding).
    """

    def __init__(self, synth_family: GaborFamily, anal_family: GaborFamily):
        if synth_family.model != anal_family.model:
            raise ModelMismatchError("synthesis and analysis families live on different models")
        if synth_family.size != anal_family.size:
            raise ValueError(
                f"family sizes differ: synthesis {synth_family.size}, "
                f"analysis {anal_family.size}"
            )
        self.synth = synth_family
        self.anal = anal_family

    @property
    def model(self):
        return self.synth.model

    @property
    def size(self) -> int:
        return self.synth.size


def pairing(u: GridVector, omega: GridVector) -> complex:
    """Bilinear duality pairing h * sum_j u[j]*omega[j] (no conjugation)."""
    if u.model != omega.model:
        raise ModelMismatchError("pairing of vectors on different models")
    return complex(u.model.h * np.sum(u.values * omega.values))


def _folded(family: GaborFamily, x: np.ndarray, n: int) -> np.ndarray:
    """The windowed signal at translation n, folded into one aliasing period."""
    y = x * np.roll(family.window.values, n * family.dt)
    return y.reshape(family.df, family.m_count).sum(axis=0)


def _analysis_values(family: GaborFamily, x: np.ndarray) -> np.ndarray:
    """h * [x, element at (-m mod M, n)] in flat order: the S analysis map."""
    h = family.model.h
    M = family.m_count
    out = np.empty(family.size, dtype=np.complex128)
    for n in range(family.n_count):
        out[n * M : (n + 1) * M] = h * np.fft.fft(_folded(family, x, n))
    return out


def _analysis_values_plain(family: GaborFamily, x: np.ndarray) -> np.ndarray:
    """h * [x, element at (m, n)] in flat order (no modulation reversal)."""
    h = family.model.h
    M = family.m_count
    out = np.empty(family.size, dtype=np.complex128)
    for n in range(family.n_count):
        out[n * M : (n + 1) * M] = (h * M) * np.fft.ifft(_folded(family, x, n))
    return out


def _synthesis_values(family: GaborFamily, coeffs: np.ndarray) -> np.ndarray:
    """sum_k coeffs[k] * (element at (m, n)), streamed over translations."""
    M = family.m_count
    w = family.window.values
    out = np.zeros(family.model.L, dtype=np.complex128)
    for n in range(family.n_count):
        c = coeffs[n * M : (n + 1) * M]
        out += np.roll(w, n * family.dt) * np.tile(M * np.fft.ifft(c), family.df)
    return out


def _synthesis_values_reversed(family: GaborFamily, coeffs: np.ndarray) -> np.ndarray:
    """sum_k coeffs[k] * (element at (-m mod M, n))."""
    M = family.m_count
    w = family.window.values
    out = np.zeros(family.model.L, dtype=np.complex128)
    for n in range(family.n_count):
        c = coeffs[n * M : (n + 1) * M]
        out += np.roll(w, n * family.dt) * np.tile(np.fft.fft(c), family.df)
    return out


def _reversal_permutation(family: GaborFamily) -> np.ndarray:
    """Flat-index permutation sending (m, n) to ((-m) mod M, n)."""
    M = family.m_count
    rev = (M - np.arange(M)) % M
    return (np.arange(family.n_count)[:, None] * M + rev[None, :]).reshape(-1)


def analysis_apply(pair: FramePair, x: GridVector) -> CoefficientSeq:
    """Analysis coefficients of x in family order.

    Coefficient k = (n, m) is the bilinear pairing of x with the analysis
    element at modulation index (-m) mod M (see the module notes on index
    alignment); linear in x.
    """
    if x.model != pair.model:
        raise ModelMismatchError("input vector lives on a different model")
    return _analysis_values(pair.anal, x.values)


def synthesis_apply(pair: FramePair, coeffs: CoefficientSeq) -> GridVector:
    """Weighted sum of synthesis elements: one-hot coefficients reproduce
    the family elements themselves."""
    coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    if coeffs.shape[0] != pair.size:
        raise ValueError(
            f"coefficient length {coeffs.shape[0]} does not match family size {pair.size}"
        )
    return GridVector(_synthesis_values(pair.synth, coeffs), pair.model)


def frame_operator_apply(pair: FramePair, x: GridVector) -> GridVector:
    """S x = synthesis(analysis(x)), matrix-free."""
    if x.model != pair.model:
        raise ModelMismatchError("input vector lives on a different model")
    return GridVector(
        _synthesis_values(pair.synth, _analysis_values(pair.anal, x.values)), pair.model
    )


def adjoint_frame_operator_apply(pair: FramePair, x: GridVector) -> GridVector:
    """Adjoint of S for the unweighted sesquilinear dot product.

    The bilinear transpose of S analyzes with the synthesis family (plain
    modulation) and synthesizes over the modulation-reversed analysis
    family; conjugating in and out turns the transpose into the adjoint.
    """
    if x.model != pair.model:
        raise ModelMismatchError("input vector lives on a different model")
    vals = _synthesis_values_reversed(
        pair.anal, _analysis_values_plain(pair.synth, np.conj(x.values))
    )
    return GridVector(np.conj(vals), pair.model)


def analysis_matrix(pair: FramePair) -> np.ndarray:
    """Dense (K, L) analysis matrix: row k = h * (modulation-reversed
    analysis element k)."""
    return pair.model.h * pair.anal.as_array()[_reversal_permutation(pair.anal)]


def synthesis_matrix(pair: FramePair) -> np.ndarray:
    """Dense (L, K) synthesis matrix: column k = k-th synthesis element."""
    return pair.synth.as_array().T


def assemble_frame_matrix(pair: FramePair, dense_cap: int = DENSE_CAP) -> np.ndarray:
    """Dense L-by-L matrix of S (synthesis matrix times analysis matrix).

    Column j equals the matrix-free apply on the j-th unit vector up to
    summation-order rounding (tested at 1e-12).
    """
    L = pair.model.L
    if L > dense_cap:
        raise DenseCapExceededError(f"L = {L} exceeds dense cap {dense_cap}")
    return synthesis_matrix(pair) @ analysis_matrix(pair)
