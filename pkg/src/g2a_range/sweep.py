"""Grid sweeps over the SNR / dimensioning model, figure presets and CSV/JSON emission."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np

from .array_model import ArrayConfig, WeightNorm, array_factor_db, port_pattern_db
from .dimensioning import DimensioningQuery, antennas_required
from .link_channel import LinkGeometry, RadioConfig, vertical_angle_deg, wavelength_m
from .snr_engine import SnrQuery, closed_form_snr_db

# Scalar parameters accepted in a sweep base record, keyed like the CLI flags.
DEFAULTS: dict[str, Any] = {
    "ports": 1,
    "elements": 8,
    "range": 1000.0,
    "height": 1000.0,
    "freq": 2.0e9,
    "tilt": 90.0,
    "track": False,
    "target": 5.0,
    "tx_dbm": 30.0,
    "noise_dbm": None,
    "bandwidth": None,
    "nf": None,
    "gm_dbi": 8.0,
    "theta3db": 65.0,
    "phi3db": 65.0,
    "am": 30.0,
    "sla": 30.0,
    "dv": 0.5,
    "dh": 0.5,
    "azimuth": 0.0,
    "norm": "per-port",
}

# sweep axis name -> base-record key
AXIS_PARAMS = {
    "m_ports": "ports",
    "n_elements": "elements",
    "range_m": "range",
    "height_m": "height",
    "carrier_hz": "freq",
    "target_snr_db": "target",
    "theta_deg": None,  # observation angle, pattern sweeps only
    "tilt_deg": "tilt",
}

METRIC_COLUMNS = {
    "pattern": ("pattern_db", "array_factor_db"),
    "snr": ("snr_db",),
    "dimension": ("min_ports", "theta_deg"),
}

PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in AXIS_PARAMS:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {sorted(AXIS_PARAMS)}")
        if len(self.values) < 1:
            raise ValueError(f"axis {self.name!r} has no values")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError(f"axis {self.name!r} values must be strictly increasing")


@dataclass
class SweepSpec:
    preset: str
    metric: str
    axes: list[Axis]
    base: dict[str, Any] = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in METRIC_COLUMNS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("axis names must be unique")
        if self.metric == "pattern" and "theta_deg" not in names:
            raise ValueError("pattern sweeps need a theta_deg axis")
        if self.metric != "pattern" and "theta_deg" in names:
            raise ValueError("theta_deg is only a sweep axis for pattern sweeps")
        unknown = set(self.base) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown base parameters: {sorted(unknown)}")
        self.base = {**DEFAULTS, **self.base}

    @property
    def columns(self) -> list[str]:
        return [a.name for a in self.axes] + list(METRIC_COLUMNS[self.metric]) + ["is_null"]


def build_array(p: dict) -> ArrayConfig:
    return ArrayConfig(
        num_ports=p["ports"], num_elements=p["elements"],
        dv_over_lambda=p["dv"], dh_over_lambda=p["dh"],
        max_element_gain_dbi=p["gm_dbi"], theta_3db_deg=p["theta3db"], phi_3db_deg=p["phi3db"],
        max_attenuation_db=p["am"], sidelobe_attenuation_db=p["sla"],
        downtilt_deg=p["tilt"], weight_norm=WeightNorm(p["norm"]),
    )


def build_radio(p: dict) -> RadioConfig:
    return RadioConfig(tx_power_dbm=p["tx_dbm"], carrier_hz=p["freq"], noise_power_dbm=p["noise_dbm"],
                       bandwidth_hz=p["bandwidth"], noise_figure_db=p["nf"])


def build_geometry(p: dict) -> LinkGeometry:
    return LinkGeometry(range_m=p["range"], height_m=p["height"], azimuth_deg=p["azimuth"])


def _evaluate_point(metric: str, p: dict, theta: float | None) -> dict[str, Any]:
    if metric == "pattern":
        cfg = build_array(p)
        pat = port_pattern_db(theta, p["azimuth"], cfg)
        return {"pattern_db": pat, "array_factor_db": array_factor_db(theta, p["azimuth"], cfg),
                "is_null": pat is None}
    if metric == "snr":
        snr = closed_form_snr_db(SnrQuery(build_array(p), build_geometry(p), build_radio(p), bool(p["track"])))
        return {"snr_db": snr, "is_null": snr is None}
    geom = build_geometry(p)
    res = antennas_required(DimensioningQuery(p["target"], geom, build_radio(p), build_array(p), bool(p["track"])))
    return {"min_ports": res.min_ports, "theta_deg": vertical_angle_deg(geom), "is_null": not res.feasible}


def run_sweep(spec: SweepSpec) -> Iterator[dict[str, Any]]:
    """Yield one row per grid point, first axis outermost."""
    metric_cols = METRIC_COLUMNS[spec.metric]
    for point in itertools.product(*(a.values for a in spec.axes)):
        p = dict(spec.base)
        theta = None
        for axis, value in zip(spec.axes, point):
            key = AXIS_PARAMS[axis.name]
            if key is None:
                theta = value
            else:
                p[key] = value
        row = {a.name: v for a, v in zip(spec.axes, point)}
        try:
            row.update(_evaluate_point(spec.metric, p, theta))
        except ValueError:
            # infeasible geometry or parameters at this point only
            row.update({c: None for c in metric_cols})
            row["is_null"] = True
        yield row


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return '"' + value.replace('"', '""') + '"' if any(ch in value for ch in ',"\n') else value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6g}"


def emit_csv(rows: Iterable[dict], columns: list[str], path: str | Path) -> int:
    """Write rows as CSV (LF line endings, 6 significant digits); returns the row count."""
    count = 0
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c)) for c in columns) + "\n")
            count += 1
    return count


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def emit_json(rows: Iterable[dict], columns: list[str], path: str | Path) -> int:
    records = [{c: _jsonable(row.get(c)) for c in columns} for row in rows]
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump({"columns": columns, "rows": records}, fh, indent=1)
        fh.write("\n")
    return len(records)


def metadata_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def spec_metadata(spec: SweepSpec, row_count: int) -> dict:
    from . import __version__

    base = {k: _jsonable(v) for k, v in spec.base.items()}
    derived = {}
    try:
        radio = build_radio(spec.base)
        derived = {"noise_dbm": radio.noise_dbm, "wavelength_m": wavelength_m(radio)}
    except ValueError:
        pass
    return {
        "generator": f"g2a_range {__version__}",
        "preset": spec.preset,
        "metric": spec.metric,
        "format": spec.format,
        "columns": spec.columns,
        "axes": [{"name": a.name, "values": [_jsonable(v) for v in a.values]} for a in spec.axes],
        "base": base,
        "effective": derived,
        "provenance": dict(spec.provenance),
        "row_count": row_count,
    }


def write_sweep(spec: SweepSpec, path: str | Path | None = None) -> Path:
    """Run a sweep and write the data file plus its ``.meta.json`` sidecar."""
    path = Path(path or spec.output_path)
    emit = emit_csv if spec.format == "csv" else emit_json
    count = emit(run_sweep(spec), spec.columns, path)
    with open(metadata_path(path), "w", newline="\n", encoding="utf-8") as fh:
        json.dump(spec_metadata(spec, count), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# presets

def _theta_grid():
    return tuple(i / 10 for i in range(1801))


def _snr_range_grid():
    return tuple(float(d) for d in range(1000, 20001, 50))


def _dyadic_ports():
    return tuple(2 ** k for k in range(9))


def _dimension_range_grid():
    return tuple(float(d) for d in np.geomspace(1000.0, 100_000.0, 41))


_REFERENCE = "reference scenario value"
_ARTIFACT = "artifact choice (not a published value)"


def preset_spec(name: str, overrides: dict | None = None, output_path: str | None = None,
                fmt: str = "csv") -> SweepSpec:
    """Build the SweepSpec of a figure preset; ``overrides`` patch the base record."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")
    snr_radio = {"tx_dbm": 30.0, "freq": 2.0e9, "height": 1000.0}
    snr_prov = {"tx_dbm": _REFERENCE, "freq": _REFERENCE, "height": _REFERENCE,
                "range_m grid 1000..20000 step 50": _ARTIFACT, "m_ports grid 1..256 dyadic": _ARTIFACT,
                "elements": _ARTIFACT, "noise_dbm": _ARTIFACT}
    dim_prov = {"range_m grid 1..100 km, 41 log-spaced": _ARTIFACT, "elements": _ARTIFACT,
                "noise_dbm": _ARTIFACT, "tx_dbm": _REFERENCE}
    if name == "fig2":
        spec = dict(metric="pattern",
                    axes=[Axis("n_elements", (2, 4, 8, 16, 32)), Axis("theta_deg", _theta_grid())],
                    base={"tilt": 70.0, "gm_dbi": 8.0, "theta3db": 65.0, "phi3db": 65.0, "azimuth": 0.0},
                    provenance={"tilt": _REFERENCE, "gm_dbi": _REFERENCE, "theta3db": _REFERENCE,
                                "phi3db": _REFERENCE, "n_elements set": _ARTIFACT,
                                "theta_deg grid 0..180 step 0.1": _ARTIFACT})
    elif name in ("fig3", "fig7", "fig8"):
        base = dict(snr_radio)
        if name == "fig3":
            base["track"] = True
        else:
            base.update(track=False, tilt=70.0 if name == "fig7" else 85.0)
        spec = dict(metric="snr",
                    axes=[Axis("m_ports", _dyadic_ports()), Axis("range_m", _snr_range_grid())],
                    base=base, provenance={**snr_prov, **({"tilt": _REFERENCE} if name != "fig3" else {})})
    elif name == "fig4":
        spec = dict(metric="dimension",
                    axes=[Axis("target_snr_db", (0.0, 5.0, 10.0, 15.0)),
                          Axis("range_m", _dimension_range_grid())],
                    base={"track": True, "freq": 2.0e9, "height": 1000.0},
                    provenance={**dim_prov, "freq": _REFERENCE, "height": _REFERENCE,
                                "target_snr_db set": _ARTIFACT})
    elif name == "fig5":
        spec = dict(metric="dimension",
                    axes=[Axis("carrier_hz", (0.7e9, 2.0e9, 3.5e9)), Axis("range_m", _dimension_range_grid())],
                    base={"track": True, "target": 5.0, "height": 1000.0},
                    provenance={**dim_prov, "target": _REFERENCE, "height": _REFERENCE,
                                "carrier_hz set": _ARTIFACT})
    else:
        spec = dict(metric="dimension",
                    axes=[Axis("height_m", (500.0, 1000.0, 2000.0)), Axis("range_m", _dimension_range_grid())],
                    base={"track": True, "target": 5.0, "freq": 2.0e9},
                    provenance={**dim_prov, "target": _REFERENCE, "freq": _REFERENCE,
                                "height_m set": _ARTIFACT})
    base = {**spec.pop("base"), **(overrides or {})}
    return SweepSpec(preset=name, base=base, output_path=output_path, format=fmt, **spec)


def _axis_from_json(obj: dict) -> Axis:
    allowed = {"name", "values", "start", "stop", "step", "num", "scale"}
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown axis keys: {sorted(unknown)}")
    if "name" not in obj:
        raise ValueError("axis needs a name")
    if "values" in obj:
        if set(obj) - {"name", "values"}:
            raise ValueError("give either 'values' or a start/stop range, not both")
        return Axis(obj["name"], tuple(obj["values"]))
    start, stop = obj.get("start"), obj.get("stop")
    if start is None or stop is None:
        raise ValueError(f"axis {obj['name']!r} needs 'values' or 'start' and 'stop'")
    if "step" in obj:
        step = obj["step"]
        if step <= 0:
            raise ValueError("axis step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = tuple(start + i * step for i in range(count))
    elif "num" in obj:
        scale = obj.get("scale", "linear")
        if scale == "linear":
            values = tuple(float(v) for v in np.linspace(start, stop, int(obj["num"])))
        elif scale == "log":
            values = tuple(float(v) for v in np.geomspace(start, stop, int(obj["num"])))
        else:
            raise ValueError(f"unknown axis scale {scale!r}")
    else:
        raise ValueError(f"axis {obj['name']!r} needs 'step' or 'num'")
    return Axis(obj["name"], values)


CONFIG_KEYS = {"preset", "metric", "axes", "out", "format"} | set(DEFAULTS)


def _normalize_key(key: str) -> str:
    return key.replace("-", "_")


def spec_from_config(cfg: dict) -> SweepSpec:
    """Build a SweepSpec from a JSON config whose keys mirror the CLI flags.

    ``preset`` selects a figure preset (the other keys then override its
    base record) or ``custom``, which requires ``metric`` and ``axes``.
    """
    if not isinstance(cfg, dict):
        raise ValueError("sweep config must be a JSON object")
    cfg = {_normalize_key(k): v for k, v in cfg.items()}
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    overrides = {k: v for k, v in cfg.items() if k in DEFAULTS}
    preset = cfg.get("preset", "custom")
    fmt = cfg.get("format") or _format_for(cfg.get("out"))
    if preset != "custom":
        if "axes" in cfg or "metric" in cfg:
            raise ValueError("axes/metric cannot be combined with a named preset")
        return preset_spec(preset, overrides, cfg.get("out"), fmt)
    if "axes" not in cfg:
        raise ValueError("custom sweeps need 'axes'")
    axes = [_axis_from_json(a) for a in cfg["axes"]]
    metric = cfg.get("metric") or _infer_metric(axes)
    return SweepSpec(preset="custom", metric=metric, axes=axes, base=overrides,
                     output_path=cfg.get("out"), format=fmt,
                     provenance={"grid": "user supplied"})


def _infer_metric(axes: list[Axis]) -> str:
    names = {a.name for a in axes}
    if "theta_deg" in names:
        return "pattern"
    if "target_snr_db" in names:
        return "dimension"
    return "snr"


def _format_for(path) -> str:
    return "json" if path and str(path).lower().endswith(".json") else "csv"
