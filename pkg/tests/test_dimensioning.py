import math

import numpy as np
import pytest

from g2a_range.array_model import ArrayConfig
from g2a_range.dimensioning import (
    DimensioningQuery,
    antennas_required,
    max_range,
    min_antennas_oracle,
    required_ports_exact,
)
from g2a_range.link_channel import LinkGeometry, RadioConfig
from g2a_range.snr_engine import SnrQuery, closed_form_snr_db

RADIO = RadioConfig(tx_power_dbm=30.0, carrier_hz=2.0e9, noise_power_dbm=-95.0)
ARRAY = ArrayConfig(num_elements=8)


def dq(target=5.0, d=300_000.0, h=1000.0, tracking=True, radio=RADIO, array=ARRAY):
    return DimensioningQuery(target, LinkGeometry(d, h), radio, array, tracking)


def snr_at(q, m):
    return closed_form_snr_db(q.snr_query(m))


def random_queries(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        h = rng.uniform(200.0, 5000.0)
        d = rng.uniform(2 * h, 500_000.0)
        radio = RADIO.with_(carrier_hz=float(rng.choice([0.7e9, 2.0e9, 3.5e9])))
        tracking = bool(rng.integers(2))
        array = ARRAY.with_(num_elements=int(rng.integers(1, 17)), downtilt_deg=float(rng.uniform(60.0, 95.0)))
        yield dq(float(rng.uniform(-5.0, 25.0)), d, h, tracking, radio, array)


class TestAntennasRequired:
    def test_reference_budget(self):
        # 125 - 148.0 + 8 + 9.03 + 10 log10 M >= 5  ->  M = 13
        res = antennas_required(dq())
        assert res.feasible and res.min_ports == 13
        assert min_antennas_oracle(dq()).min_ports == 13
        assert res.achieved_snr_db >= 5.0
        assert snr_at(dq(), 12) < 5.0

    def test_low_target_gives_one(self):
        q = dq(target=-100.0, d=5000.0)
        assert antennas_required(q).min_ports == 1
        assert min_antennas_oracle(q).min_ports == 1

    def test_doubling_target_doubles_pre_ceiling(self):
        base = required_ports_exact(dq())
        doubled = required_ports_exact(dq(target=5.0 + 10 * math.log10(2)))
        assert doubled == pytest.approx(2 * base, rel=1e-12)
        assert antennas_required(dq(target=5.0 + 10 * math.log10(2))).min_ports >= 2 * 13 - 1

    def test_integer_pre_ceiling(self):
        # choose the target so that the exact port count is an integer: SNR at M = 20
        q0 = dq()
        target = snr_at(q0, 20)
        q = dq(target=target)
        assert required_ports_exact(q) == pytest.approx(20.0, rel=1e-12)
        assert antennas_required(q).min_ports == min_antennas_oracle(q).min_ports == 20

    def test_non_tracking_matches_oracle(self):
        for tilt in (70.0, 80.0, 88.0):
            q = dq(d=20_000.0, tracking=False, array=ARRAY.with_(downtilt_deg=tilt))
            assert antennas_required(q).min_ports == min_antennas_oracle(q).min_ports

    def test_kernel_null_infeasible(self):
        # N = 2, tilt 90, UAV overhead: a = pi, sin(N a / 2) = 0
        q = dq(d=1000.0, h=1000.0, tracking=False, array=ArrayConfig(num_elements=2, downtilt_deg=90.0))
        res = antennas_required(q)
        assert not res.feasible and res.min_ports is None and "null" in res.note
        assert not min_antennas_oracle(q, m_cap=256).feasible

    def test_oracle_cap(self):
        res = min_antennas_oracle(dq(target=40.0), m_cap=100)
        assert not res.feasible and "100" in res.note
        with pytest.raises(ValueError):
            min_antennas_oracle(dq(), m_cap=0)

    def test_randomized_minimality_and_oracle(self):
        checked = 0
        for q in random_queries(250, seed=3):
            res = antennas_required(q)
            oracle = min_antennas_oracle(q)
            if res.min_ports is not None and res.min_ports > 2 ** 16:
                assert not oracle.feasible
                continue
            assert res.feasible == oracle.feasible
            if not res.feasible:
                continue
            checked += 1
            assert res.min_ports == oracle.min_ports
            assert snr_at(q, res.min_ports) >= q.target_snr_db
            if res.min_ports > 1:
                assert snr_at(q, res.min_ports - 1) < q.target_snr_db
        assert checked >= 200

    def test_monotone_in_target(self):
        ms = [antennas_required(dq(target=t, d=50_000.0)).min_ports for t in np.arange(-5.0, 25.1, 0.5)]
        assert all(b >= a for a, b in zip(ms, ms[1:]))

    def test_monotone_in_frequency(self):
        ms = [antennas_required(dq(radio=RADIO.with_(carrier_hz=f))).min_ports for f in (0.7e9, 2e9, 3.5e9, 6e9)]
        assert all(b >= a for a, b in zip(ms, ms[1:]))

    def test_monotone_in_height(self):
        ms = [antennas_required(dq(d=20_000.0, h=h)).min_ports for h in np.linspace(100.0, 5000.0, 50)]
        assert all(b >= a for a, b in zip(ms, ms[1:]))


class TestMaxRange:
    def test_reference(self):
        res = max_range(64, 5.0, 1000.0, RADIO, ARRAY, True, 100_000.0, 2_000_000.0)
        assert res.feasible
        assert res.range_m == pytest.approx(677_000.0, rel=5e-3)
        cfg = ARRAY.with_(num_ports=64)

        def snr(d):
            return closed_form_snr_db(SnrQuery(cfg, LinkGeometry(d, 1000.0), RADIO, True))

        assert snr(res.range_m - 1.0) > 5.0 > snr(res.range_m + 1.0)

    def test_lower_boundary(self):
        cfg = ARRAY.with_(num_ports=8)
        target = closed_form_snr_db(SnrQuery(cfg, LinkGeometry(5000.0, 1000.0), RADIO, True))
        res = max_range(8, target, 1000.0, RADIO, ARRAY, True, 5000.0, 50_000.0)
        assert res.range_m == pytest.approx(5000.0, abs=1e-6)

    def test_quadruple_ports_doubles_range(self):
        r16 = max_range(16, 5.0, 1000.0, RADIO, ARRAY, True, 100_000.0, 3_000_000.0).range_m
        r64 = max_range(64, 5.0, 1000.0, RADIO, ARRAY, True, 100_000.0, 3_000_000.0).range_m
        assert r64 / r16 == pytest.approx(2.0, rel=1e-4)

    def test_saturated_and_infeasible(self):
        sat = max_range(64, 5.0, 1000.0, RADIO, ARRAY, True, 3000.0, 50_000.0)
        assert sat.range_m == 50_000.0 and "saturated" in sat.note
        none = max_range(1, 80.0, 1000.0, RADIO, ARRAY, True, 3000.0, 50_000.0)
        assert not none.feasible and none.range_m is None

    def test_non_monotone_note(self):
        res = max_range(4, 10.0, 1000.0, RADIO, ARRAY.with_(downtilt_deg=70.0), False, 1100.0, 50_000.0)
        assert "non-monotonic" in res.note

    @pytest.mark.parametrize("args", [(1000.0, 500.0, 5000.0), (1000.0, 5000.0, 5000.0)])
    def test_invalid_bracket(self, args):
        h, lo, hi = args
        with pytest.raises(ValueError):
            max_range(4, 5.0, h, RADIO, ARRAY, True, lo, hi)

    def test_round_trip(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            h = rng.uniform(200.0, 3000.0)
            d = rng.uniform(3 * h, 300_000.0)
            target = rng.uniform(-5.0, 20.0)
            m = antennas_required(dq(target, d, h)).min_ports
            res = max_range(m, target, h, RADIO, ARRAY, True, 3 * h, 5_000_000.0, step_m=100.0)
            assert res.feasible and res.range_m >= d
