import numpy as np
import pytest

from asflab import (
    CyclicModel,
    ExponentDomainError,
    FrameBounds,
    GaborTriple,
    GridVector,
    IncommensurateParameters,
    LebesgueExponent,
    build_cyclic_model,
    conjugate_exponent,
    sample_indicator_window,
)
from helpers import make_model


class TestConjugateExponent:
    def test_self_conjugate_fixed_point(self):
        assert conjugate_exponent(2.0) == 2.0

    def test_closed_form(self):
        assert conjugate_exponent(1.5) == pytest.approx(3.0, abs=1e-15)
        assert conjugate_exponent(4.0) == pytest.approx(4.0 / 3.0, abs=1e-15)

    @pytest.mark.parametrize("bad", [1.0, 0.5, 0.0, -2.0, float("inf"), float("nan")])
    def test_domain_errors(self, bad):
        with pytest.raises(ExponentDomainError):
            conjugate_exponent(bad)

    @pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 3.0, 10.0])
    def test_involution(self, p):
        assert abs(conjugate_exponent(conjugate_exponent(p)) - p) <= 1e-13 * p

    def test_roundtrip_relative(self):
        for p in (1.01, 1.2, 2.7, 50.0):
            q = conjugate_exponent(p)
            assert abs(conjugate_exponent(q) - p) <= 1e-14 * p


class TestLebesgueExponent:
    @pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 3.0, 10.0, 1.000001])
    def test_conjugacy_identity(self, p):
        e = LebesgueExponent(p)
        assert abs(1.0 / e.p + 1.0 / e.q - 1.0) <= 1e-15

    def test_rejects_bad_exponent(self):
        with pytest.raises(ExponentDomainError):
            LebesgueExponent(1.0)


class TestGaborTriple:
    def test_accepts_positive(self):
        t = GaborTriple(0.5, 1.0, 0.75)
        assert (t.shift, t.mod_step, t.win_len) == (0.5, 1.0, 0.75)

    @pytest.mark.parametrize("args", [(0, 1, 1), (1, -1, 1), (1, 1, 0), (np.nan, 1, 1)])
    def test_rejects_nonpositive(self, args):
        with pytest.raises(ValueError):
            GaborTriple(*args)


class TestBuildCyclicModel:
    def test_quarter_grid(self):
        synth = GaborTriple(0.5, 1.0, 0.75)
        m = build_cyclic_model(synth, synth, 0.25, 4.0)
        assert (m.L, m.dt_synth, m.df_synth) == (16, 2, 4)
        assert (m.dt_anal, m.df_anal) == (2, 4)

    def test_unit_grid(self):
        t = GaborTriple(1.0, 1.0, 1.0)
        m = build_cyclic_model(t, t, 1.0, 4.0)
        assert (m.L, m.dt_synth, m.df_synth) == (4, 1, 4)

    def test_incommensurate_shift(self):
        synth = GaborTriple(1.0 / 3.0, 1.0, 1.0)
        anal = GaborTriple(1.0, 1.0, 1.0)
        with pytest.raises(IncommensurateParameters, match="shift"):
            build_cyclic_model(synth, anal, 0.25, 4.0)

    def test_modulation_count_matches_mod_step(self):
        # L/df grid cells of modulation period: (L/df)*h == 1/mod_step
        for shift, mod_step, h, period in [(0.5, 1.0, 0.25, 4.0), (1.0, 0.5, 0.5, 8.0)]:
            t = GaborTriple(shift, mod_step, 1.0)
            m = build_cyclic_model(t, t, h, period)
            assert m.m_count_synth * m.h == pytest.approx(1.0 / mod_step, rel=1e-12)

    def test_counts_are_exact_divisions(self):
        synth = GaborTriple(0.5, 1.0, 0.75)
        m = build_cyclic_model(synth, synth, 0.25, 4.0)
        assert m.m_count_synth * m.df_synth == m.L
        assert m.n_count_synth * m.dt_synth == m.L

    def test_success_iff_divisible_exhaustive(self):
        # small rational grid: shift = k*h succeeds exactly when k divides L
        h, period = 0.25, 2.0
        L = 8
        anal = GaborTriple(h, 1.0, 1.0)
        for k in range(1, 2 * L + 1):
            synth = GaborTriple(k * h, 1.0, 1.0)
            if L % k == 0:
                m = build_cyclic_model(synth, anal, h, period)
                assert m.dt_synth == k
            else:
                with pytest.raises(IncommensurateParameters):
                    build_cyclic_model(synth, anal, h, period)

    def test_mod_step_must_fit_period(self):
        t = GaborTriple(1.0, 0.3, 1.0)  # 0.3 * 4 = 1.2 not an integer
        with pytest.raises(IncommensurateParameters, match="mod_step"):
            build_cyclic_model(t, t, 1.0, 4.0)

    def test_decimal_tolerance(self):
        # decimals carrying 1e-10 noise still land on the grid
        synth = GaborTriple(0.5 + 2e-10, 1.0, 0.75)
        m = build_cyclic_model(synth, synth, 0.25, 4.0)
        assert m.dt_synth == 2


class TestCyclicModel:
    def test_step_must_divide(self):
        with pytest.raises(IncommensurateParameters):
            CyclicModel(L=8, h=1.0, period=8.0, dt_synth=3, df_synth=8, dt_anal=1, df_anal=8)

    def test_period_consistency(self):
        with pytest.raises(ValueError):
            CyclicModel(L=8, h=1.0, period=9.0, dt_synth=1, df_synth=8, dt_anal=1, df_anal=8)

    def test_descriptor_fields(self):
        m = make_model(4)
        d = m.descriptor()
        assert d == {
            "L": 4, "h": 1.0, "period": 4.0,
            "dt_synth": 1, "df_synth": 4, "dt_anal": 1, "df_anal": 4,
        }


class TestGridVector:
    def test_length_checked(self):
        m = make_model(4)
        with pytest.raises(ValueError):
            GridVector([1, 2, 3], m)

    def test_values_frozen_and_copied(self):
        m = make_model(3)
        src = np.array([1.0, 2.0, 3.0])
        v = GridVector(src, m)
        src[0] = 99.0
        assert v.values[0] == 1.0
        with pytest.raises(ValueError):
            v.values[0] = 5.0


class TestFrameBounds:
    def test_ordering_enforced(self):
        FrameBounds(0.0, 1.0)
        with pytest.raises(ValueError):
            FrameBounds(2.0, 1.0)
        with pytest.raises(ValueError):
            FrameBounds(-1.0, 1.0)


class TestIndicatorWindow:
    def test_three_cells(self):
        synth = GaborTriple(0.5, 1.0, 0.75)
        m = build_cyclic_model(synth, synth, 0.25, 4.0)
        w = sample_indicator_window(0.75, m)
        assert np.array_equal(w.values.real, [1, 1, 1] + [0] * 13)
        assert np.all(w.values.imag == 0)

    def test_full_period(self):
        m = make_model(8, h=0.5)
        w = sample_indicator_window(4.0, m)
        assert np.all(w.values == 1.0)

    def test_incommensurate_length(self):
        m = make_model(16, h=0.25)
        with pytest.raises(IncommensurateParameters):
            sample_indicator_window(0.3, m)

    def test_too_long(self):
        m = make_model(4)
        with pytest.raises(ValueError):
            sample_indicator_window(5.0, m)

    @pytest.mark.parametrize("cells", [1, 2, 5, 16])
    def test_support_size(self, cells):
        m = make_model(16, h=0.25)
        w = sample_indicator_window(cells * 0.25, m)
        nz = np.flatnonzero(w.values)
        assert len(nz) == cells
        assert np.all(w.values[nz] == 1.0)
