"""Planar active-antenna-array model: element pattern, weights and port pattern.

The array has ``num_ports`` columns (ports) of ``num_elements`` vertically
stacked elements. All elements of one port carry the same signal, so the
user sees every port as a single antenna. Angles are in degrees everywhere
except inside the phase terms.

Angle convention: ``theta`` is zenith-referenced (90 deg = horizon),
``phi`` is the azimuth offset from array boresight.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

# |array factor| below NULL_REL * (peak |array factor|) is treated as an exact null.
NULL_REL = 1e-12


class WeightNorm(str, enum.Enum):
    """Normalization of the element weights."""

    PER_PORT = "per-port"  # 1/sqrt(N)
    FULL_ARRAY = "full-array"  # 1/sqrt(N*M)


@dataclass(frozen=True)
class ArrayConfig:
    """Geometry and pattern parameters of an M x N planar array.

    Defaults follow common 3GPP macro-cell values: half-wavelength spacing,
    8 dBi elements with 65 deg beamwidths and 30 dB attenuation caps.
    """

    num_ports: int = 1
    num_elements: int = 8
    dv_over_lambda: float = 0.5
    dh_over_lambda: float = 0.5
    max_element_gain_dbi: float = 8.0
    theta_3db_deg: float = 65.0
    phi_3db_deg: float = 65.0
    max_attenuation_db: float = 30.0
    sidelobe_attenuation_db: float = 30.0
    downtilt_deg: float = 90.0
    scan_deg: float = 0.0
    weight_norm: WeightNorm = WeightNorm.PER_PORT

    def __post_init__(self):
        if isinstance(self.num_ports, bool) or int(self.num_ports) != self.num_ports or self.num_ports < 1:
            raise ValueError(f"num_ports must be a positive integer, got {self.num_ports!r}")
        if isinstance(self.num_elements, bool) or int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ValueError(f"num_elements must be a positive integer, got {self.num_elements!r}")
        object.__setattr__(self, "num_ports", int(self.num_ports))
        object.__setattr__(self, "num_elements", int(self.num_elements))
        for name in ("dv_over_lambda", "dh_over_lambda", "theta_3db_deg", "phi_3db_deg",
                     "max_attenuation_db", "sidelobe_attenuation_db"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not np.isfinite(self.max_element_gain_dbi):
            raise ValueError("max_element_gain_dbi must be finite")
        if not 0.0 < self.downtilt_deg < 180.0:
            raise ValueError(f"downtilt_deg must lie in (0, 180), got {self.downtilt_deg!r}")
        if not -180.0 <= self.scan_deg <= 180.0:
            raise ValueError(f"scan_deg must lie in [-180, 180], got {self.scan_deg!r}")
        object.__setattr__(self, "weight_norm", WeightNorm(self.weight_norm))

    @property
    def weight_scale(self) -> float:
        """Magnitude shared by every weight entry."""
        if self.weight_norm is WeightNorm.PER_PORT:
            return 1.0 / np.sqrt(self.num_elements)
        return 1.0 / np.sqrt(self.num_elements * self.num_ports)

    def with_(self, **changes) -> "ArrayConfig":
        return replace(self, **changes)


def _check_theta(theta_deg):
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any((theta < 0.0) | (theta > 180.0)):
        raise ValueError(f"vertical angle must lie in [0, 180] deg, got {theta_deg!r}")
    return theta


def _check_phi(phi_deg):
    phi = np.asarray(phi_deg, dtype=float)
    if np.any(~np.isfinite(phi)) or np.any((phi < -180.0) | (phi > 180.0)):
        raise ValueError(f"azimuth must lie in [-180, 180] deg, got {phi_deg!r}")
    return phi


def _check_index(value, upper, name):
    if isinstance(value, bool) or int(value) != value or not 1 <= value <= upper:
        raise ValueError(f"{name} must be an integer in [1, {upper}], got {value!r}")
    return int(value)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def vertical_attenuation(theta_deg, cfg: ArrayConfig):
    """Vertical pattern cut in dB (<= 0), capped at the side-lobe level."""
    theta = _check_theta(theta_deg)
    att = 12.0 * ((theta - 90.0) / cfg.theta_3db_deg) ** 2
    return _scalar(-np.minimum(att, cfg.sidelobe_attenuation_db))


def horizontal_attenuation(phi_deg, cfg: ArrayConfig):
    """Horizontal pattern cut in dB (<= 0), capped at the maximum attenuation."""
    phi = _check_phi(phi_deg)
    att = 12.0 * (phi / cfg.phi_3db_deg) ** 2
    return _scalar(-np.minimum(att, cfg.max_attenuation_db))


def element_pattern_db(theta_deg, phi_deg, cfg: ArrayConfig):
    """Single-element gain in dBi; always within [G_m - A_m, G_m]."""
    combined = -(vertical_attenuation(theta_deg, cfg) + horizontal_attenuation(phi_deg, cfg))
    return _scalar(cfg.max_element_gain_dbi - np.minimum(combined, cfg.max_attenuation_db))


def _steering_phase(r, c, theta_deg, phi_deg, cfg):
    theta = np.radians(theta_deg)
    phi = np.radians(phi_deg)
    return 2.0 * np.pi * ((c - 1) * cfg.dh_over_lambda * np.sin(phi) * np.sin(theta)
                          + (r - 1) * cfg.dv_over_lambda * np.cos(theta))


def steering_entry(r: int, c: int, theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> complex:
    """Response of element ``r`` of port ``c`` (1-based) toward (theta, phi)."""
    r = _check_index(r, cfg.num_elements, "element index r")
    c = _check_index(c, cfg.num_ports, "port index c")
    _check_theta(theta_deg)
    _check_phi(phi_deg)
    return complex(np.exp(1j * _steering_phase(r, c, theta_deg, phi_deg, cfg)))


def weight_entry(r: int, c: int, cfg: ArrayConfig) -> complex:
    """Beamforming weight of element ``r`` of port ``c`` for the configured tilt and scan."""
    r = _check_index(r, cfg.num_elements, "element index r")
    c = _check_index(c, cfg.num_ports, "port index c")
    phase = _steering_phase(r, c, cfg.downtilt_deg, cfg.scan_deg, cfg)
    return complex(cfg.weight_scale * np.exp(-1j * phase))


def steering_matrix(theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> np.ndarray:
    """N x M matrix of element responses (rows: elements, columns: ports)."""
    _check_theta(theta_deg)
    _check_phi(phi_deg)
    r = np.arange(1, cfg.num_elements + 1)[:, None]
    c = np.arange(1, cfg.num_ports + 1)[None, :]
    return np.exp(1j * _steering_phase(r, c, theta_deg, phi_deg, cfg))


def weight_matrix(cfg: ArrayConfig) -> np.ndarray:
    """N x M matrix of weights."""
    r = np.arange(1, cfg.num_elements + 1)[:, None]
    c = np.arange(1, cfg.num_ports + 1)[None, :]
    return cfg.weight_scale * np.exp(-1j * _steering_phase(r, c, cfg.downtilt_deg, cfg.scan_deg, cfg))


def array_factor_matrix(theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> np.ndarray:
    """Element-wise product of the weight and steering matrices."""
    return weight_matrix(cfg) * steering_matrix(theta_deg, phi_deg, cfg)


def port_array_factors(theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> np.ndarray:
    """Column sums of the array-factor matrix, one complex value per port."""
    return array_factor_matrix(theta_deg, phi_deg, cfg).sum(axis=0)


def port_array_factor(c: int, theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> complex:
    """Array factor of port ``c``: sum over its N weighted element responses."""
    c = _check_index(c, cfg.num_ports, "port index c")
    _check_theta(theta_deg)
    _check_phi(phi_deg)
    r = np.arange(1, cfg.num_elements + 1)
    w = cfg.weight_scale * np.exp(-1j * _steering_phase(r, c, cfg.downtilt_deg, cfg.scan_deg, cfg))
    v = np.exp(1j * _steering_phase(r, c, theta_deg, phi_deg, cfg))
    return complex(np.sum(w * v))


def is_array_null(af_magnitude: float, cfg: ArrayConfig) -> bool:
    return af_magnitude < NULL_REL * cfg.weight_scale * cfg.num_elements


def port_pattern_db(theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> float | None:
    """Composite port pattern in dB: element pattern plus array-factor gain.

    All ports share one tilt, so port 1 is representative. Returns ``None`` at
    an exact array null instead of ``-inf``.
    """
    af = abs(port_array_factor(1, theta_deg, phi_deg, cfg))
    if is_array_null(af, cfg):
        return None
    return float(element_pattern_db(theta_deg, phi_deg, cfg) + 20.0 * np.log10(af))


def array_factor_db(theta_deg: float, phi_deg: float, cfg: ArrayConfig) -> float | None:
    """Array-factor-only gain 20*log10|AF| of port 1, ``None`` at a null."""
    af = abs(port_array_factor(1, theta_deg, phi_deg, cfg))
    if is_array_null(af, cfg):
        return None
    return float(20.0 * np.log10(af))
