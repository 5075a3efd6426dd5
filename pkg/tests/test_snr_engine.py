import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2a_range.array_model import ArrayConfig, WeightNorm
from g2a_range.link_channel import LinkGeometry, RadioConfig, free_space_gain, wavelength_m
from g2a_range.snr_engine import (
    SnrQuery,
    beam_kernel,
    closed_form_snr_db,
    dirichlet_kernel,
    evaluate,
    matrix_snr_db,
)

RADIO = RadioConfig(tx_power_dbm=30.0, carrier_hz=2.0e9, noise_power_dbm=-95.0)


def direct_sum(a, n):
    """Brute-force N-term phasor sum."""
    return sum(complex(math.cos(k * a), math.sin(k * a)) for k in range(n))


def query(m=4, n=8, d=5000.0, h=1000.0, tilt=80.0, tracking=False, **array_kw):
    cfg = ArrayConfig(num_ports=m, num_elements=n, downtilt_deg=tilt, **array_kw)
    return SnrQuery(cfg, LinkGeometry(d, h), RADIO, tracking)


class TestKernel:
    @pytest.mark.parametrize("n", [1, 3, 8, 64])
    def test_aligned(self, n):
        assert beam_kernel(70.0, 70.0, n, 0.5) == n

    def test_half_turn_null(self):
        assert abs(dirichlet_kernel(math.pi, 2)) < 1e-15

    def test_random_phases_against_direct_sum(self):
        rng = np.random.default_rng(7)
        for a in rng.uniform(0.0, 2 * math.pi, 200):
            assert dirichlet_kernel(a, 8) == pytest.approx(direct_sum(a, 8), abs=1e-12)

    @pytest.mark.parametrize("k", [-2, -1, 1, 2])
    @pytest.mark.parametrize("n", [1, 2, 5, 8])
    def test_realigned_at_full_turns(self, k, n):
        value = dirichlet_kernel(2 * math.pi * k, n)
        assert value == pytest.approx(n, abs=1e-9)
        assert value == pytest.approx(direct_sum(2 * math.pi * k, n), abs=1e-9)

    def test_near_degenerate(self):
        for eps in (1e-13, 1e-10, 1e-7):
            assert dirichlet_kernel(eps, 16) == pytest.approx(direct_sum(eps, 16), abs=1e-10)
            assert dirichlet_kernel(2 * math.pi + eps, 16) == pytest.approx(direct_sum(2 * math.pi + eps, 16), abs=1e-9)

    def test_vectorized(self):
        a = np.array([0.0, 0.3, math.pi])
        out = dirichlet_kernel(a, 4)
        np.testing.assert_allclose(out, [direct_sum(x, 4) for x in a], atol=1e-12)

    @settings(max_examples=300)
    @given(st.integers(1, 64), st.floats(-4 * math.pi, 4 * math.pi))
    def test_bounded_by_n(self, n, a):
        assert abs(dirichlet_kernel(a, n)) <= n * (1 + 1e-12)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            dirichlet_kernel(0.1, 0)


class TestClosedForm:
    def test_pure_link_budget(self):
        # M = N = 1 on the horizon: P_t - FSPL + G_m - noise
        q = query(m=1, n=1, d=20_000.0, h=0.0, tilt=90.0)
        fspl = -10 * math.log10(free_space_gain(20_000.0, wavelength_m(RADIO)))
        expected = 30.0 - fspl + 8.0 + 95.0
        assert closed_form_snr_db(q) == pytest.approx(expected, abs=1e-12)
        assert matrix_snr_db(q) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("tracking", [True, False])
    def test_doubling_ports(self, tracking):
        a = closed_form_snr_db(query(m=3, tracking=tracking))
        b = closed_form_snr_db(query(m=6, tracking=tracking))
        assert b - a == pytest.approx(10 * math.log10(2), abs=1e-12)

    def test_tracking_equals_aligned_fixed_tilt(self):
        geom = LinkGeometry(4000.0, 1000.0)
        theta = geom.theta_deg
        tracked = SnrQuery(ArrayConfig(num_ports=5), geom, RADIO, True)
        fixed = SnrQuery(ArrayConfig(num_ports=5, downtilt_deg=theta), geom, RADIO, False)
        assert closed_form_snr_db(tracked) == pytest.approx(closed_form_snr_db(fixed), abs=1e-12)

    def test_tracking_expression(self):
        q = query(m=16, n=8, d=8000.0, tracking=True)
        theta = math.degrees(math.acos(1000.0 / 8000.0))
        g = 10 ** (-1.2 * ((theta - 90) / 65) ** 2)
        f = (wavelength_m(RADIO) / (4 * math.pi * 8000.0)) ** 2
        lin = 1.0 * f * 10 ** 0.8 * 16 * 8 * g / 10 ** (-12.5)
        assert closed_form_snr_db(q) == pytest.approx(10 * math.log10(lin), abs=1e-10)

    def test_null_marker(self):
        # N = 2, tilt 90, theta 0 (overhead): a = pi -> exact null
        q = query(m=2, n=2, d=1000.0, h=1000.0, tilt=90.0)
        assert closed_form_snr_db(q) is None
        assert matrix_snr_db(q) is None
        assert evaluate(q).is_null

    def test_fig3_shape(self):
        d = np.arange(3000.0, 20001.0, 50.0)
        snr = [closed_form_snr_db(query(m=8, d=x, tracking=True)) for x in d]
        assert np.all(np.diff(snr) < 0)

    def test_fig7_single_interior_maximum(self):
        d = np.arange(1100.0, 20001.0, 10.0)
        snr = np.array([closed_form_snr_db(query(m=1, d=x, tilt=70.0)) or -np.inf for x in d])
        peak = int(np.argmax(snr))
        assert 0 < peak < len(d) - 1
        assert np.sum(snr == snr[peak]) == 1

    def test_non_tracking_peak_approaches_alignment_with_n(self):
        # path loss pulls the peak below h / cos(tilt); a narrower beam pulls it back
        d = np.arange(1100.0, 20001.0, 10.0)
        peaks = {}
        for tilt in (70.0, 85.0):
            for n in (8, 16, 32, 64):
                snr = np.array([closed_form_snr_db(query(m=1, n=n, d=x, tilt=tilt)) or -np.inf for x in d])
                peaks[tilt, n] = d[int(np.argmax(snr))]
        for tilt in (70.0, 85.0):
            aligned = 1000.0 / math.cos(math.radians(tilt))
            gaps = [aligned - peaks[tilt, n] for n in (8, 16, 32, 64)]
            assert all(0 <= b < a for a, b in zip(gaps, gaps[1:]))
        assert 2700.0 <= peaks[70.0, 32] <= 3200.0
        assert 10000.0 <= peaks[85.0, 32] <= 12000.0


class TestMatrixForm:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 64), st.integers(1, 32), st.floats(200.0, 3000.0), st.floats(1.05, 100.0),
           st.floats(30.0, 150.0), st.booleans())
    def test_equals_closed_form(self, m, n, h, ratio, tilt, tracking):
        q = query(m=m, n=n, d=h * ratio, h=h, tilt=tilt, tracking=tracking)
        a, b = closed_form_snr_db(q), matrix_snr_db(q)
        if a is None or b is None:
            assert a is None and b is None
        else:
            assert a == pytest.approx(b, abs=1e-9)

    def test_full_array_offset(self):
        per_port = matrix_snr_db(query(m=16, n=4))
        full = matrix_snr_db(query(m=16, n=4, weight_norm=WeightNorm.FULL_ARRAY))
        assert per_port - full == pytest.approx(10 * math.log10(16), abs=1e-9)

    def test_azimuth_does_not_break_equivalence(self):
        cfg = ArrayConfig(num_ports=4, num_elements=8, downtilt_deg=80.0)
        q = SnrQuery(cfg, LinkGeometry(6000.0, 1000.0, azimuth_deg=25.0), RADIO, False)
        assert closed_form_snr_db(q) == pytest.approx(matrix_snr_db(q), abs=1e-9)

    def test_tracking_overhead(self):
        q = query(m=2, n=4, d=1000.0, h=1000.0, tracking=True)
        assert closed_form_snr_db(q) == pytest.approx(matrix_snr_db(q), abs=1e-9)


class TestSample:
    def test_echo(self):
        s = evaluate(query(m=4, n=8, d=5000.0, tilt=80.0))
        assert (s.num_ports, s.num_elements, s.range_m, s.height_m) == (4, 8, 5000.0, 1000.0)
        assert s.tilt_deg == 80.0 and not s.tracking
        assert 0.0 <= s.kernel_magnitude <= 8.0
        assert evaluate(query(tracking=True)).kernel_magnitude == 8.0

    def test_methods_agree(self):
        q = query()
        assert evaluate(q, "matrix").snr_db == pytest.approx(evaluate(q).snr_db, abs=1e-9)
        with pytest.raises(ValueError):
            evaluate(q, "other")
