import numpy as np
import pytest

from asflab import (
    DenseCapExceededError,
    ExponentDomainError,
    GridVector,
    OpnormOptions,
    ZeroVectorError,
    conjugate_exponent,
    dual_vector,
    exact_p2_extremes,
    inverse_opnorm_estimate,
    opnorm_estimate,
    opnorm_estimate_matrix,
    sample_indicator_window,
    vector_pnorm,
)
from asflab.frameop import assemble_frame_matrix
from helpers import delta, make_model, random_vector, same_window_pair


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestVectorPnorm:
    def test_euclidean(self):
        m = make_model(2)
        assert vector_pnorm(GridVector([3, 4], m), 2.0) == pytest.approx(5.0, abs=1e-14)

    def test_fourth_power(self):
        m = make_model(4)
        x = GridVector([1, 1, 1, 1], m)
        assert vector_pnorm(x, 4.0) == pytest.approx(4.0 ** 0.25, abs=1e-14)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_indicator_mass(self, p):
        # weighted norm of an indicator is (its length)^(1/p)
        m = make_model(16, h=0.25)
        for c in (0.25, 1.0, 2.5):
            w = sample_indicator_window(c, m)
            assert vector_pnorm(w, p) == pytest.approx(c ** (1.0 / p), rel=1e-13)

    def test_zero_iff_zero(self):
        m = make_model(4)
        assert vector_pnorm(GridVector(np.zeros(4), m), 2.5) == 0.0
        assert vector_pnorm(GridVector([0, 1e-100, 0, 0], m), 2.5) > 0.0

    @pytest.mark.parametrize("p", [1.0, 0.5, float("inf")])
    def test_exponent_domain(self, p):
        m = make_model(2)
        with pytest.raises(ExponentDomainError):
            vector_pnorm(GridVector([1, 0], m), p)


class TestDualVector:
    def test_unit_vector_self_dual(self):
        m = make_model(2)
        y = dual_vector(GridVector([1, 0], m), 2.0)
        assert np.allclose(y.values, [1, 0], atol=1e-15)

    def test_normalization(self):
        m = make_model(2)
        y = dual_vector(GridVector([1, 1], m), 2.0)
        assert np.allclose(y.values, [1 / np.sqrt(2)] * 2, atol=1e-15)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 8.0])
    def test_single_support_sign(self, p):
        m = make_model(3)
        y = dual_vector(GridVector([2, 0, 0], m), p)
        assert np.allclose(y.values, [1, 0, 0], atol=1e-15)

    def test_zero_rejected(self):
        m = make_model(2)
        with pytest.raises(ZeroVectorError):
            dual_vector(GridVector([0, 0], m), 2.0)

    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 8.0])
    def test_pairing_and_unit_dual_norm(self, p):
        rng = np.random.default_rng(20)
        q = conjugate_exponent(p)
        m = make_model(8)
        for _ in range(20):
            x = random_vector(m, rng)
            y = dual_vector(x, p)
            unweighted = float(np.sum(np.abs(x.values) ** p) ** (1.0 / p))
            assert complex(np.sum(y.values * x.values)) == pytest.approx(unweighted, rel=1e-12)
            assert float(np.sum(np.abs(y.values) ** q) ** (1.0 / q)) == pytest.approx(1.0, rel=1e-12)

    def test_p2_is_normalized_conjugate(self):
        rng = np.random.default_rng(21)
        m = make_model(6)
        x = random_vector(m, rng)
        y = dual_vector(x, 2.0)
        nrm = np.linalg.norm(x.values)
        assert np.allclose(y.values, np.conj(x.values) / nrm, atol=1e-14)


class TestOpnormEstimate:
    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 8.0])
    def test_diagonal(self, p):
        est = opnorm_estimate_matrix(np.diag([1.0, 3.0]), p)
        assert est.converged
        assert abs(est.value - 3.0) <= 1e-10

    @pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
    def test_identity(self, p):
        est = opnorm_estimate_matrix(np.eye(5), p)
        assert est.value == pytest.approx(1.0, abs=1e-12)

    def test_random_complex_p2_vs_svd(self):
        rng = np.random.default_rng(22)
        a = random_complex(rng, (5, 5))
        est = opnorm_estimate_matrix(a, 2.0)
        top = np.linalg.svd(a, compute_uv=False)[0]
        assert abs(est.value - top) <= 1e-8 * top

    def test_p2_exactness_many(self):
        rng = np.random.default_rng(23)
        done = 0
        while done < 50:
            a = random_complex(rng, (8, 8))
            s = np.linalg.svd(a, compute_uv=False)
            if s[0] - s[1] < 1e-3 * s[0]:
                continue  # the estimator's p=2 guarantee assumes a spectral gap
            est = opnorm_estimate_matrix(a, 2.0)
            assert abs(est.value - s[0]) <= 1e-8 * s[0]
            done += 1

    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 8.0])
    def test_diagonal_exactness_random(self, p):
        rng = np.random.default_rng(24)
        for _ in range(10):
            d = rng.uniform(0.2, 1.0, size=6)
            d[int(rng.integers(6))] = 2.0  # clear, distinct maximum
            phases = np.exp(2j * np.pi * rng.random(6))
            est = opnorm_estimate_matrix(np.diag(d * phases), p)
            assert abs(est.value - 2.0) <= 1e-10

    def test_witness_consistency(self):
        rng = np.random.default_rng(25)
        for p in (1.5, 2.0, 3.0):
            for _ in range(10):
                a = random_complex(rng, (7, 7))
                est = opnorm_estimate_matrix(a, p)
                wit = est.witness
                ratio = (
                    np.sum(np.abs(a @ wit) ** p) ** (1 / p)
                    / np.sum(np.abs(wit) ** p) ** (1 / p)
                )
                assert abs(ratio - est.value) <= 1e-10 * max(est.value, 1e-300)

    def test_duality(self):
        rng = np.random.default_rng(26)
        for p in (1.5, 3.0):
            q = conjugate_exponent(p)
            for _ in range(20):
                a = random_complex(rng, (6, 6))
                va = opnorm_estimate_matrix(a, p).value
                vh = opnorm_estimate_matrix(a.conj().T, q).value
                assert abs(va - vh) <= 0.01 * max(va, vh)

    def test_monotone_restarts(self):
        rng = np.random.default_rng(27)
        a = random_complex(rng, (6, 6))
        vals = [
            opnorm_estimate_matrix(a, 3.0, OpnormOptions(restarts=r, seed=5)).value
            for r in (1, 2, 5)
        ]
        assert vals[0] <= vals[1] <= vals[2]

    def test_rectangular_map(self):
        a = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
        est = opnorm_estimate(lambda v: a @ v, lambda v: a.conj().T @ v, 2, 2.0)
        assert est.value == pytest.approx(2.0, rel=1e-10)

    def test_zero_operator(self):
        est = opnorm_estimate_matrix(np.zeros((3, 3)), 2.0)
        assert est.value == 0.0
        assert est.converged


class TestInverseOpnorm:
    def test_scaled_identity(self):
        for p in (1.5, 2.0, 3.0):
            est = inverse_opnorm_estimate(2.0 * np.eye(4), p)
            assert est.value == pytest.approx(0.5, rel=1e-10)
            assert est.converged

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_diagonal(self, p):
        est = inverse_opnorm_estimate(np.diag([1.0, 2.0]), p)
        assert est.value == pytest.approx(1.0, rel=1e-10)

    def test_rank_deficient_family_sentinel(self):
        # two family elements cannot span dimension four
        m = make_model(4, h=1.0, dt=2, df=4)
        pair = same_window_pair(delta(m), 2, 4)
        s = assemble_frame_matrix(pair)
        est = inverse_opnorm_estimate(s, 2.0)
        assert np.isinf(est.value)
        assert est.converged
        assert est.witness is None

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            inverse_opnorm_estimate(np.zeros((2, 3)), 2.0)

    def test_zero_matrix_sentinel(self):
        est = inverse_opnorm_estimate(np.zeros((3, 3)), 2.0)
        assert np.isinf(est.value)


class TestExactP2Extremes:
    def test_identity(self):
        b = exact_p2_extremes(np.eye(4))
        assert (b.lower, b.upper) == (1.0, 1.0)

    def test_painless_diagonal(self):
        from asflab import GaborTriple, build_cyclic_model, indicator_pair

        synth = GaborTriple(0.5, 1.0, 0.75)
        model = build_cyclic_model(synth, synth, 0.25, 4.0)
        s = assemble_frame_matrix(indicator_pair(model, synth, synth))
        b = exact_p2_extremes(s)
        assert b.lower == pytest.approx(1.0, rel=1e-12)
        assert b.upper == pytest.approx(2.0, rel=1e-12)

    def test_doubled_identity(self):
        m = make_model(2, h=1.0, dt=1, df=1)
        s = assemble_frame_matrix(same_window_pair(GridVector([1, 0], m), 1, 1))
        b = exact_p2_extremes(s)
        assert b.lower == pytest.approx(2.0, rel=1e-12)
        assert b.upper == pytest.approx(2.0, rel=1e-12)

    def test_cap(self):
        with pytest.raises(DenseCapExceededError):
            exact_p2_extremes(np.eye(5), dense_cap=4)
