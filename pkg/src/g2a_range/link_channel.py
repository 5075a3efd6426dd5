"""Ground-to-air geometry, free-space path gain and per-port channel coefficients."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .array_model import (
    ArrayConfig,
    _check_index,
    _check_phi,
    _check_theta,
    _scalar,
    port_array_factor,
    port_array_factors,
)

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact SI value
THERMAL_NOISE_DBM_HZ = -174.0
DEFAULT_NOISE_DBM = -95.0  # 10 MHz bandwidth, 9 dB noise figure


@dataclass(frozen=True)
class LinkGeometry:
    """Position of the UAV relative to the array centre.

    ``range_m`` is the slant distance d, ``height_m`` the height h above the
    array; the vertical angle is acos(h/d).
    """

    range_m: float
    height_m: float
    azimuth_deg: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.range_m) or self.range_m <= 0:
            raise ValueError(f"range_m must be positive, got {self.range_m!r}")
        if not np.isfinite(self.height_m) or self.height_m < 0:
            raise ValueError(f"height_m must be non-negative, got {self.height_m!r}")
        if self.height_m > self.range_m:
            raise ValueError(
                f"height_m ({self.height_m}) exceeds range_m ({self.range_m}); the UAV is unreachable"
            )
        _check_phi(self.azimuth_deg)

    @property
    def theta_deg(self) -> float:
        return vertical_angle_deg(self)

    def with_(self, **changes) -> "LinkGeometry":
        return replace(self, **changes)


@dataclass(frozen=True)
class RadioConfig:
    """Transmit power, carrier and receiver noise.

    Noise is either given directly (``noise_power_dbm``) or derived from
    ``bandwidth_hz`` and ``noise_figure_db`` over the -174 dBm/Hz floor.
    With neither, -95 dBm is used.
    """

    tx_power_dbm: float = 30.0
    carrier_hz: float = 2.0e9
    noise_power_dbm: Optional[float] = None
    bandwidth_hz: Optional[float] = None
    noise_figure_db: Optional[float] = None

    def __post_init__(self):
        if not np.isfinite(self.tx_power_dbm):
            raise ValueError("tx_power_dbm must be finite")
        if not np.isfinite(self.carrier_hz) or self.carrier_hz <= 0:
            raise ValueError(f"carrier_hz must be positive, got {self.carrier_hz!r}")
        derived = (self.bandwidth_hz, self.noise_figure_db)
        if any(v is not None for v in derived):
            if self.noise_power_dbm is not None:
                raise ValueError("give either noise_power_dbm or bandwidth_hz + noise_figure_db, not both")
            if any(v is None for v in derived):
                raise ValueError("bandwidth_hz and noise_figure_db must be given together")
            if not np.isfinite(self.bandwidth_hz) or self.bandwidth_hz <= 0:
                raise ValueError(f"bandwidth_hz must be positive, got {self.bandwidth_hz!r}")
        elif self.noise_power_dbm is not None and not np.isfinite(self.noise_power_dbm):
            raise ValueError("noise_power_dbm must be finite")

    @property
    def noise_dbm(self) -> float:
        """Effective total noise power in dBm."""
        if self.noise_power_dbm is not None:
            return float(self.noise_power_dbm)
        if self.bandwidth_hz is not None:
            return THERMAL_NOISE_DBM_HZ + 10.0 * np.log10(self.bandwidth_hz) + self.noise_figure_db
        return DEFAULT_NOISE_DBM

    @property
    def tx_power_w(self) -> float:
        return 10.0 ** ((self.tx_power_dbm - 30.0) / 10.0)

    @property
    def noise_w(self) -> float:
        return 10.0 ** ((self.noise_dbm - 30.0) / 10.0)

    def with_(self, **changes) -> "RadioConfig":
        return replace(self, **changes)


def wavelength_m(radio: RadioConfig | float) -> float:
    """Carrier wavelength c/f; accepts a RadioConfig or a frequency in Hz."""
    f = radio.carrier_hz if isinstance(radio, RadioConfig) else float(radio)
    if not np.isfinite(f) or f <= 0:
        raise ValueError(f"carrier frequency must be positive, got {f!r}")
    return SPEED_OF_LIGHT / f


def vertical_angle_deg(geom: LinkGeometry | None = None, *, height_m=None, range_m=None):
    """Zenith-referenced angle acos(h/d) in degrees, in [0, 90].

    Either pass a LinkGeometry or ``height_m``/``range_m`` (arrays allowed).
    """
    if geom is not None:
        height_m, range_m = geom.height_m, geom.range_m
    h = np.asarray(height_m, dtype=float)
    d = np.asarray(range_m, dtype=float)
    if np.any(d <= 0) or np.any(h < 0) or np.any(h > d):
        raise ValueError("vertical angle needs 0 <= height <= range and range > 0")
    return _scalar(np.degrees(np.arccos(h / d)))


def linear_gain(theta_deg, phi_deg, cfg: ArrayConfig):
    """Uncapped angular attenuation in linear scale, in (0, 1]."""
    theta = _check_theta(theta_deg)
    phi = _check_phi(phi_deg)
    exponent = (phi / cfg.phi_3db_deg) ** 2 + ((theta - 90.0) / cfg.theta_3db_deg) ** 2
    return _scalar(10.0 ** (-1.2 * exponent))


def free_space_gain(range_m, lambda_m):
    """Free-space path gain (lambda / (4 pi d))^2."""
    d = np.asarray(range_m, dtype=float)
    lam = np.asarray(lambda_m, dtype=float)
    if np.any(~(d > 0)) or np.any(~(lam > 0)):
        raise ValueError("range and wavelength must be positive")
    return _scalar((lam / (4.0 * np.pi * d)) ** 2)


def channel_coefficient(c: int, theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> complex:
    """Channel gain of port ``c``: sqrt(G) times its array factor."""
    c = _check_index(c, cfg.num_ports, "port index c")
    return np.sqrt(linear_gain(theta_deg, phi_deg, cfg)) * port_array_factor(c, theta_deg, phi_deg, cfg)


def channel_vector(theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> np.ndarray:
    """Length-M complex channel vector [h_1 ... h_M]."""
    return np.sqrt(linear_gain(theta_deg, phi_deg, cfg)) * port_array_factors(theta_deg, phi_deg, cfg)
