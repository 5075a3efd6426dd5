"""Antenna-count dimensioning for line-of-sight ground-to-air links."""

from .array_model import (
    ArrayConfig,
    WeightNorm,
    array_factor_db,
    element_pattern_db,
    horizontal_attenuation,
    port_array_factor,
    port_pattern_db,
    steering_entry,
    vertical_attenuation,
    weight_entry,
)
from .dimensioning import (
    DimensioningQuery,
    DimensioningResult,
    RangeResult,
    antennas_required,
    max_range,
    min_antennas_oracle,
)
from .link_channel import (
    LinkGeometry,
    RadioConfig,
    channel_coefficient,
    channel_vector,
    free_space_gain,
    linear_gain,
    vertical_angle_deg,
    wavelength_m,
)
from .snr_engine import (
    SnrQuery,
    SnrSample,
    beam_kernel,
    closed_form_snr_db,
    dirichlet_kernel,
    evaluate,
    matrix_snr_db,
)

__version__ = "0.1.0"
