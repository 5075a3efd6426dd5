"""Inverse problems: minimum number of ports for a target SNR, and maximum range."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array_model import ArrayConfig
from .link_channel import LinkGeometry, RadioConfig, linear_gain, vertical_angle_deg, wavelength_m
from .snr_engine import (
    DEGENERATE_SIN,
    SnrQuery,
    _kernel_is_null,
    closed_form_snr_db,
    closed_form_snr_db_array,
    phase_increment,
)

DEFAULT_PORT_CAP = 2 ** 16
# pre-ceiling values this close to an integer are settled against the forward model
_INTEGER_SLACK = 1e-9


@dataclass(frozen=True)
class DimensioningQuery:
    """Target SNR at a given position; ``array.num_ports`` is the unknown and ignored."""

    target_snr_db: float
    geometry: LinkGeometry
    radio: RadioConfig
    array: ArrayConfig
    tracking: bool = True

    def snr_query(self, num_ports: int) -> SnrQuery:
        return SnrQuery(self.array.with_(num_ports=num_ports), self.geometry, self.radio, self.tracking)


@dataclass(frozen=True)
class DimensioningResult:
    min_ports: int | None
    achieved_snr_db: float | None
    feasible: bool
    note: str = ""


def _forward_snr(q: DimensioningQuery, ports: int) -> float | None:
    return closed_form_snr_db(q.snr_query(ports))


def required_ports_exact(q: DimensioningQuery) -> float:
    """Real-valued port count before the ceiling; ``inf`` at a kernel null.

    Tracking:      gamma sigma^2 (4 pi d)^2 / (N P_t lambda^2 G_m G)
    Non-tracking:  gamma sigma^2 (4 pi d)^2 N sin^2(a/2) / (P_t lambda^2 G_m G sin^2(N a/2))
    """
    cfg, geom, radio = q.array, q.geometry, q.radio
    n = cfg.num_elements
    theta = vertical_angle_deg(geom)
    lam = wavelength_m(radio)
    gamma = 10.0 ** (q.target_snr_db / 10.0)
    gain = linear_gain(theta, geom.azimuth_deg, cfg)
    budget = (gamma * radio.noise_w * (4.0 * math.pi * geom.range_m) ** 2
              / (radio.tx_power_w * lam ** 2 * 10.0 ** (cfg.max_element_gain_dbi / 10.0) * gain))
    if q.tracking or theta == cfg.downtilt_deg:
        return budget / n
    a = phase_increment(theta, cfg.downtilt_deg, cfg.dv_over_lambda)
    s = math.sin(0.5 * a)
    sn = math.sin(0.5 * n * a)
    if abs(s) < DEGENERATE_SIN:
        # beam realigned at a = 2 pi k: |A| = N
        return budget / n
    if _kernel_is_null(abs(sn / s), n):
        return math.inf
    return budget * n * s ** 2 / sn ** 2


def antennas_required(q: DimensioningQuery) -> DimensioningResult:
    """Minimum port count M meeting the target, from the inverted SNR expression."""
    x = required_ports_exact(q)
    if not math.isfinite(x):
        note = "array null at this geometry" if x == math.inf else "no finite port count"
        return DimensioningResult(None, None, False, note)
    m = max(1, math.ceil(x))
    if m > 1 and abs(x - round(x)) <= _INTEGER_SLACK * x:
        # x sits on an integer up to rounding; let the forward model decide the tie
        k = int(round(x))
        m = k if _meets(_forward_snr(q, k), q.target_snr_db) else k + 1
        if m > 1 and _meets(_forward_snr(q, m - 1), q.target_snr_db):
            m -= 1
    return DimensioningResult(m, _forward_snr(q, m), True)


def _meets(snr_db, target_db) -> bool:
    return snr_db is not None and snr_db >= target_db


def min_antennas_oracle(q: DimensioningQuery, m_cap: int = DEFAULT_PORT_CAP) -> DimensioningResult:
    """Brute-force scan M = 1..m_cap of the forward SNR; first M meeting the target wins."""
    if m_cap < 1:
        raise ValueError(f"m_cap must be >= 1, got {m_cap!r}")
    cfg, geom = q.array, q.geometry
    chunk = 4096
    any_value = False
    for start in range(1, m_cap + 1, chunk):
        ports = np.arange(start, min(start + chunk, m_cap + 1))
        snr = closed_form_snr_db_array(ports, cfg.num_elements, geom.range_m, geom.height_m,
                                       cfg.downtilt_deg, geom.azimuth_deg, cfg, q.radio, q.tracking)
        snr = np.broadcast_to(snr, ports.shape)
        any_value = any_value or not np.all(np.isnan(snr))
        hits = np.flatnonzero(snr >= q.target_snr_db)
        if hits.size:
            m = int(ports[hits[0]])
            return DimensioningResult(m, _forward_snr(q, m), True)
    if not any_value:
        return DimensioningResult(None, None, False, "array null at this geometry")
    return DimensioningResult(None, None, False, f"target not met within {m_cap} ports")


@dataclass(frozen=True)
class RangeResult:
    range_m: float | None
    feasible: bool
    note: str = ""


def max_range(m_ports: int, target_snr_db: float, height_m: float, radio: RadioConfig,
              array: ArrayConfig, tracking: bool, d_lo: float, d_hi: float,
              step_m: float = 10.0, azimuth_deg: float = 0.0) -> RangeResult:
    """Largest range in [d_lo, d_hi] where ``m_ports`` ports still meet the target.

    A grid scan with ``step_m`` locates the last satisfying grid point, then
    bisection narrows the crossing down to floating-point resolution (well
    below 0.1 m). Uniqueness of the crossing is only guaranteed in the
    monotone regime (tracking with d_lo >= 3h); elsewhere the note says so.
    """
    if d_lo < height_m:
        raise ValueError(f"d_lo ({d_lo}) must be at least the height ({height_m})")
    if not d_lo < d_hi:
        raise ValueError("d_lo must be smaller than d_hi")
    if step_m <= 0:
        raise ValueError("step_m must be positive")
    cfg = array.with_(num_ports=m_ports)

    def snr(d):
        return closed_form_snr_db_array(m_ports, cfg.num_elements, d, height_m, cfg.downtilt_deg,
                                        azimuth_deg, cfg, radio, tracking)

    def ok(d) -> bool:
        v = float(snr(d))
        return not math.isnan(v) and v >= target_snr_db

    grid = d_lo + step_m * np.arange(int(math.floor((d_hi - d_lo) / step_m)) + 1)
    grid = np.append(grid[grid < d_hi], d_hi)
    values = snr(grid)
    meets = ~np.isnan(values) & (values >= target_snr_db)
    note = "" if tracking and d_lo >= 3.0 * height_m else "SNR may be non-monotonic in range here"
    if not meets.any():
        return RangeResult(None, False, "target not met anywhere in the bracket")
    last = int(np.flatnonzero(meets)[-1])
    if last == grid.size - 1:
        return RangeResult(float(d_hi), True, "bracket-saturated: target still met at d_hi")
    lo, hi = float(grid[last]), float(grid[last + 1])
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return RangeResult(lo, True, note)
