"""Scenario files: JSON documents whose length keys carry their unit as a suffix.

``"pump_waist_um": 245`` is read as 245e-6 m.  Recognised suffixes are
``_m``, ``_mm``, ``_um``, ``_nm`` for lengths and ``_per_m``, ``_per_mm`` for
transverse wavevectors.  Everything is converted to SI on load; the resolved
scenario is written back with ``_m``/``_per_m`` keys so that run summaries
are self-describing.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError
from .spdc import DoubleGaussianParams, SpdcParams

__all__ = ["Scenario", "load_scenario", "default_scenario", "parse_units"]

LENGTH_UNITS = {"_nm": 1e-9, "_um": 1e-6, "_mm": 1e-3, "_m": 1.0}
WAVEVECTOR_UNITS = {"_per_mm": 1e3, "_per_m": 1.0}
MODELS = ("spdc", "double_gaussian")
SLIT_MODES = ("full", "window")


def parse_units(section: dict, where: str) -> dict:
    """Strip unit suffixes and convert values to SI."""
    out = {}
    for key, value in section.items():
        for table in (WAVEVECTOR_UNITS, LENGTH_UNITS):
            suffix = next((s for s in table if key.endswith(s)), None)
            if suffix is not None:
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ConfigurationError(f"{where}.{key} must be a number")
                out[key[: -len(suffix)]] = float(value) * table[suffix]
                break
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class GridConfig:
    n: int = 1024
    momentum_halfwidth_factor: float = 4.0


@dataclass(frozen=True)
class OpticsConfig:
    lens_focal: float = 0.5
    lens_position: float = 0.7381


@dataclass(frozen=True)
class DetectionConfig:
    slit_fedorov: float = 30e-6
    slit_schmidt: float = 200e-6
    # "full": the Schmidt slits run along x and integrate the whole transverse
    # coordinate; "window": a slit_schmidt-wide window at the marginal peaks
    schmidt_slit_mode: str = "full"


@dataclass(frozen=True)
class SweepConfig:
    z_start: float = 0.45
    z_stop: float = 1.6
    steps: int = 24


@dataclass(frozen=True)
class OutputConfig:
    csv_path: str = "results/scan.csv"
    summary_path: str = "results/summary.json"


@dataclass(frozen=True)
class Scenario:
    model: str = "spdc"
    spdc: SpdcParams = field(default_factory=SpdcParams)
    double_gaussian: DoubleGaussianParams | None = None
    grid: GridConfig = field(default_factory=GridConfig)
    optics: OpticsConfig = field(default_factory=OpticsConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigurationError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.model == "double_gaussian" and self.double_gaussian is None:
            raise ConfigurationError("double_gaussian model needs a 'double_gaussian' section")
        n = self.grid.n
        if n < 16 or n & (n - 1):
            raise ConfigurationError(f"grid.n must be a power of two >= 16, got {n}")
        if not self.grid.momentum_halfwidth_factor > 0:
            raise ConfigurationError("grid.momentum_halfwidth_factor must be positive")
        if self.optics.lens_focal == 0:
            raise ConfigurationError("optics.lens_focal must be nonzero")
        if self.optics.lens_position < 0:
            raise ConfigurationError("optics.lens_position must be >= 0")
        if self.detection.slit_fedorov < 0 or self.detection.slit_schmidt < 0:
            raise ConfigurationError("slit widths must be >= 0")
        if self.detection.schmidt_slit_mode not in SLIT_MODES:
            raise ConfigurationError(f"detection.schmidt_slit_mode must be one of {SLIT_MODES}")
        if self.sweep.steps < 1:
            raise ConfigurationError("sweep.steps must be >= 1")
        if self.sweep.z_stop < self.sweep.z_start:
            raise ConfigurationError("sweep.z_stop must be >= sweep.z_start")
        if self.sweep.z_start < 0:
            raise ConfigurationError("sweep.z_start must be >= 0")

    @property
    def image_distance(self) -> float:
        """Lens-to-image distance of the source plane (inf when the source sits at the focal plane)."""
        f, d = self.optics.lens_focal, self.optics.lens_position
        return float("inf") if d == f else f * d / (d - f)

    def resolved(self) -> dict:
        """Plain-JSON view with SI units made explicit in the keys."""
        dg = self.double_gaussian
        return {
            "model": self.model,
            "spdc": {
                "lambda_pump_m": self.spdc.lambda_pump,
                "crystal_length_m": self.spdc.crystal_length,
                "pump_waist_m": self.spdc.pump_waist,
            },
            "double_gaussian": None
            if dg is None
            else {"sigma_plus_per_m": dg.sigma_plus, "sigma_minus_per_m": dg.sigma_minus},
            "grid": asdict(self.grid),
            "optics": {"lens_focal_m": self.optics.lens_focal, "lens_position_m": self.optics.lens_position},
            "detection": {
                "slit_fedorov_m": self.detection.slit_fedorov,
                "slit_schmidt_m": self.detection.slit_schmidt,
                "schmidt_slit_mode": self.detection.schmidt_slit_mode,
            },
            "sweep": {"z_start_m": self.sweep.z_start, "z_stop_m": self.sweep.z_stop, "steps": self.sweep.steps},
            "outputs": asdict(self.outputs),
        }


def _section(doc: dict, name: str, cls, allowed: set[str]):
    raw = doc.get(name, {}) or {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"section {name!r} must be an object")
    values = parse_units(raw, name)
    unknown = set(values) - allowed
    if unknown:
        raise ConfigurationError(f"unknown keys in {name!r}: {sorted(unknown)}")
    try:
        return cls(**values)
    except TypeError as exc:
        raise ConfigurationError(f"section {name!r}: {exc}") from None


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigurationError("scenario must be a JSON object")
    unknown = set(doc) - {"model", "spdc", "double_gaussian", "grid", "optics", "detection", "sweep", "outputs"}
    if unknown:
        raise ConfigurationError(f"unknown top-level keys: {sorted(unknown)}")
    dg = None
    if doc.get("double_gaussian"):
        dg = _section(doc, "double_gaussian", DoubleGaussianParams, {"sigma_plus", "sigma_minus"})
    grid = _section(doc, "grid", GridConfig, {"n", "momentum_halfwidth_factor"})
    if not isinstance(grid.n, int) or isinstance(grid.n, bool):
        raise ConfigurationError("grid.n must be an integer")
    sweep = _section(doc, "sweep", SweepConfig, {"z_start", "z_stop", "steps"})
    if not isinstance(sweep.steps, int) or isinstance(sweep.steps, bool):
        raise ConfigurationError("sweep.steps must be an integer")
    return Scenario(
        model=doc.get("model", "spdc"),
        spdc=_section(doc, "spdc", SpdcParams, {"lambda_pump", "crystal_length", "pump_waist"}),
        double_gaussian=dg,
        grid=grid,
        optics=_section(doc, "optics", OpticsConfig, {"lens_focal", "lens_position"}),
        detection=_section(doc, "detection", DetectionConfig, {"slit_fedorov", "slit_schmidt", "schmidt_slit_mode"}),
        sweep=sweep,
        outputs=_section(doc, "outputs", OutputConfig, {"csv_path", "summary_path"}),
    )


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"scenario {path} is not valid JSON: {exc}") from None
    return scenario_from_dict(doc)


def default_scenario() -> Scenario:
    text = resources.files("biphoton").joinpath("data/default_scenario.json").read_text()
    return scenario_from_dict(json.loads(text))
