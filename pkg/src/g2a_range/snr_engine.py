"""Downlink SNR of the ground-to-air link, by matrix evaluation and in closed form.

Both routes assume perfect CSI and conjugate (maximum-ratio) precoding, so
the SNR is P_t F 10^(G_m/10) ||h||^2 / sigma^2. The closed form replaces
||h||^2 with M G |A|^2 / N, where A is the N-term elevation beam kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import NULL_REL, ArrayConfig, _scalar, is_array_null, port_array_factors
from .link_channel import (
    LinkGeometry,
    RadioConfig,
    free_space_gain,
    linear_gain,
    vertical_angle_deg,
    wavelength_m,
)

# |sin(a/2)| below this is treated as a realigned beam (a = 2 pi k).
DEGENERATE_SIN = 1e-12
# |sin(N a/2)| below this, together with DEGENERATE_SIN, selects the analytic limit.
DEGENERATE_SIN_N = 1e-9
# SNR values under this are reported as null.
SNR_FLOOR_DB = -400.0


@dataclass(frozen=True)
class SnrQuery:
    array: ArrayConfig
    geometry: LinkGeometry
    radio: RadioConfig
    tracking: bool = False

    @property
    def tilt_deg(self) -> float:
        """Effective downtilt: the UAV's vertical angle when tracking."""
        if self.tracking:
            return vertical_angle_deg(self.geometry)
        return self.array.downtilt_deg


@dataclass(frozen=True)
class SnrSample:
    """One evaluated point; ``snr_db`` is None at an array null."""

    num_ports: int
    num_elements: int
    range_m: float
    height_m: float
    carrier_hz: float
    theta_deg: float
    tilt_deg: float
    tracking: bool
    snr_db: float | None
    kernel_magnitude: float

    @property
    def is_null(self) -> bool:
        return self.snr_db is None


def phase_increment(theta_deg, tilt_deg, dv_over_lambda):
    """Element-to-element phase a = 2 pi (d_v/lambda)(cos theta - cos tilt)."""
    return 2.0 * np.pi * dv_over_lambda * (np.cos(np.radians(theta_deg)) - np.cos(np.radians(tilt_deg)))


def kernel_ratio(a, n: int):
    """Real amplitude sin(N a/2) / sin(a/2) with its limits, so that A = ratio * exp(i a (N-1)/2).

    Vectorized over ``a``.
    """
    a = np.asarray(a, dtype=float)
    half = 0.5 * a
    s = np.sin(half)
    sn = np.sin(n * half)
    degenerate = np.abs(s) < DEGENERATE_SIN
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(degenerate, 0.0, sn / np.where(degenerate, 1.0, s))
    if np.any(degenerate):
        limit = n * np.cos(n * half) / np.cos(half)
        ratio = np.where(degenerate & (np.abs(sn) < DEGENERATE_SIN_N), limit, ratio)
        odd = degenerate & ~(np.abs(sn) < DEGENERATE_SIN_N)
        if np.any(odd):
            direct = np.abs(np.exp(1j * np.multiply.outer(a[odd], np.arange(n))).sum(axis=-1))
            ratio = ratio.copy()
            ratio[odd] = direct
        ratio = np.where(a == 0.0, float(n), ratio)
    return _scalar(ratio)


def dirichlet_kernel(a, n: int):
    """Sum_{k=1..N} exp(i (k-1) a) evaluated through the sine ratio."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    a = np.asarray(a, dtype=float)
    value = kernel_ratio(a, n) * np.exp(0.5j * a * (n - 1))
    value = np.where(a == 0.0, complex(n), value)
    return complex(value) if value.ndim == 0 else value


def beam_kernel(theta_deg: float, tilt_deg: float, n: int, dv_over_lambda: float) -> complex:
    """Elevation beam kernel A between the UAV direction and the beam tilt.

    Equals ``n`` when the two angles coincide (tracking).
    """
    if theta_deg == tilt_deg:
        return complex(n)
    return dirichlet_kernel(phase_increment(theta_deg, tilt_deg, dv_over_lambda), n)


def _kernel_is_null(kernel_abs, n):
    return kernel_abs < NULL_REL * n


def _to_db(linear):
    """10 log10 with the null floor; returns NaN for nulls (vectorized)."""
    linear = np.asarray(linear, dtype=float)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(linear)
    return np.where(db < SNR_FLOOR_DB, np.nan, db)


def link_scale(radio: RadioConfig, cfg: ArrayConfig, range_m):
    """P_t F 10^(G_m/10) / sigma^2 in linear scale."""
    return (radio.tx_power_w * free_space_gain(range_m, wavelength_m(radio))
            * 10.0 ** (cfg.max_element_gain_dbi / 10.0) / radio.noise_w)


def closed_form_snr_db_array(ports, n, range_m, height_m, tilt_deg, phi_deg,
                             cfg: ArrayConfig, radio: RadioConfig, tracking: bool):
    """Vectorized closed-form SNR in dB; NaN marks nulls.

    ``ports``, ``range_m``, ``height_m`` broadcast against each other. With
    ``tracking`` the tilt follows the UAV and ``tilt_deg`` is ignored.
    """
    theta = vertical_angle_deg(height_m=height_m, range_m=range_m)
    gain = linear_gain(theta, phi_deg, cfg)
    if tracking:
        kernel_abs = np.full(np.shape(theta), float(n))
    else:
        kernel_abs = np.abs(kernel_ratio(phase_increment(theta, tilt_deg, cfg.dv_over_lambda), n))
        kernel_abs = np.where(np.asarray(theta) == tilt_deg, float(n), kernel_abs)
    snr = link_scale(radio, cfg, range_m) * np.asarray(ports, dtype=float) * gain * kernel_abs ** 2 / n
    db = _to_db(snr)
    return np.where(_kernel_is_null(kernel_abs, n), np.nan, db)


def _none_if_nan(x) -> float | None:
    x = float(x)
    return None if np.isnan(x) else x


def closed_form_snr_db(q: SnrQuery) -> float | None:
    """SNR in dB from the closed-form kernel expression; None at a null."""
    cfg = q.array
    db = closed_form_snr_db_array(
        cfg.num_ports, cfg.num_elements, q.geometry.range_m, q.geometry.height_m,
        cfg.downtilt_deg, q.geometry.azimuth_deg, cfg, q.radio, q.tracking,
    )
    return _none_if_nan(db)


def matrix_snr_db(q: SnrQuery) -> float | None:
    """SNR in dB from the explicit channel vector built out of W and V."""
    theta = vertical_angle_deg(q.geometry)
    phi = q.geometry.azimuth_deg
    cfg = q.array
    if q.tracking:
        # overhead (theta = 0) is a valid tracking target but not a valid ArrayConfig tilt
        cfg = cfg.with_(downtilt_deg=theta) if theta > 0.0 else _TiltOverride(cfg, theta)
    af = port_array_factors(theta, phi, cfg)
    if all(is_array_null(abs(x), q.array) for x in af):
        return None
    norm2 = linear_gain(theta, phi, q.array) * float(np.sum(np.abs(af) ** 2))
    return _none_if_nan(_to_db(link_scale(q.radio, q.array, q.geometry.range_m) * norm2))


class _TiltOverride:
    """Read-only ArrayConfig view with the tilt replaced."""

    def __init__(self, cfg: ArrayConfig, tilt_deg: float):
        self._cfg = cfg
        self.downtilt_deg = tilt_deg

    def __getattr__(self, name):
        return getattr(self._cfg, name)


def evaluate(q: SnrQuery, method: str = "closed-form") -> SnrSample:
    """Evaluate one query and echo its inputs."""
    if method == "closed-form":
        snr = closed_form_snr_db(q)
    elif method == "matrix":
        snr = matrix_snr_db(q)
    else:
        raise ValueError(f"unknown method {method!r}")
    theta = vertical_angle_deg(q.geometry)
    tilt = q.tilt_deg
    kernel = abs(beam_kernel(theta, tilt, q.array.num_elements, q.array.dv_over_lambda))
    return SnrSample(
        num_ports=q.array.num_ports,
        num_elements=q.array.num_elements,
        range_m=q.geometry.range_m,
        height_m=q.geometry.height_m,
        carrier_hz=q.radio.carrier_hz,
        theta_deg=theta,
        tilt_deg=tilt,
        tracking=q.tracking,
        snr_db=snr,
        kernel_magnitude=min(kernel, float(q.array.num_elements)),
    )
