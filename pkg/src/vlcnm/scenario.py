"""Experiment descriptions and their JSON scenario-file schema.

A scenario file is a JSON object::

    {
      "modulation": {"order_M": 4, "frame_duration": 0.001,
                     "sample_rate": 1e6, "amplitude": 1.0},
      "channel": {"gain": 1.0, "delay_samples": 0, "impulse_response": null},
      "interference": {"type": "composite", "components": [
          {"type": "ar", "coefficients": [0.9], "driving_std": 0.05},
          {"type": "hum", "fundamental_hz": 100, "harmonic_amplitudes": [1.0, 0.3],
           "phases": null},
          {"type": "dc", "level": 2.0}]},
      "interference_scale": 1.0,
      "noise": {"awgn_std": 0.02},
      "acquisition_samples": 4000,
      "obstructed_samples": 10000,
      "predictor_order": 8,
      "n_frames": 10000,
      "filtering": "both",
      "seed": 0,
      "significance_z": 3.0,
      "reference_gain": 4.0,
      "lumen_to_amplitude": 3.0,
      "sweep": {"axis": "acquisition_samples", "values": [100, 1000], "repetitions": 11}
    }

Every key is optional; missing keys take the defaults of :class:`ScenarioConfig`.
``channel`` may give ``distance_m`` instead of ``gain``, in which case the gain
is ``reference_gain / distance_m**2``. Interference ``type`` is one of
``white``, ``ar``, ``hum``, ``dc``, ``composite``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .channel import (
    AutoRegressive,
    ChannelModel,
    Composite,
    DcAmbient,
    HarmonicHum,
    NoiseSpec,
    RngSeed,
    WhiteOnly,
    distance_gain,
)
from .ppm import PpmConfig

FILTERING_MODES = ("on", "off", "both")
AXES = (
    "interference_amplitude",
    "channel_gain",
    "acquisition_samples",
    "order_M",
    "interference_lumen",
    "distance_m",
)


class ConfigError(ValueError):
    pass


def default_interference():
    """Flicker plus coloured background: AR(1) and a 100 Hz mains hum with harmonics."""
    return Composite(
        (
            AutoRegressive((0.9,), 0.05),
            HarmonicHum(100.0, (1.0, 0.3, 0.1)),
        )
    )


@dataclass(frozen=True)
class ScenarioConfig:
    ppm: PpmConfig = field(default_factory=PpmConfig)
    channel: ChannelModel = field(default_factory=ChannelModel)
    interference: object = field(default_factory=default_interference)
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec(0.02))
    acquisition_samples: int = 4000
    predictor_order: int = 8
    n_frames: int = 10_000
    filtering: str = "both"
    seed: RngSeed = field(default_factory=RngSeed)
    interference_scale: float = 1.0
    obstructed_samples: int = 10_000
    significance_z: float = 3.0
    reference_gain: float = 4.0
    lumen_to_amplitude: float = 3.0

    def __post_init__(self):
        if self.filtering not in FILTERING_MODES:
            raise ConfigError(f"filtering must be one of {FILTERING_MODES}")
        if not 1 <= self.predictor_order <= 64:
            raise ConfigError("predictor_order must lie in 1..64")
        if self.acquisition_samples < self.predictor_order + 1:
            raise ConfigError("acquisition_samples must exceed predictor_order")
        if self.n_frames < 1:
            raise ConfigError("n_frames must be at least 1")
        if self.obstructed_samples < 1:
            raise ConfigError("obstructed_samples must be at least 1")
        if self.interference_scale < 0:
            raise ConfigError("interference_scale must be nonnegative")

    @property
    def effective_interference(self):
        if self.interference_scale == 1.0:
            return self.interference
        return self.interference.scaled(self.interference_scale)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_axis(self, axis: str, value) -> "ScenarioConfig":
        """Copy with one sweep parameter set to ``value``."""
        if axis == "interference_amplitude":
            return self.replace(interference_scale=float(value))
        if axis == "interference_lumen":
            return self.replace(interference_scale=self.lumen_to_amplitude * float(value))
        if axis == "channel_gain":
            return self.replace(channel=dataclasses.replace(self.channel, gain=float(value)))
        if axis == "distance_m":
            gain = distance_gain(float(value), self.reference_gain)
            return self.replace(channel=dataclasses.replace(self.channel, gain=gain))
        if axis == "acquisition_samples":
            return self.replace(acquisition_samples=int(value))
        if axis == "order_M":
            return self.replace(ppm=dataclasses.replace(self.ppm, order_M=int(value)))
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {AXES}")

    def to_dict(self) -> dict:
        return {
            "modulation": {
                "order_M": self.ppm.order_M,
                "frame_duration": self.ppm.frame_duration,
                "sample_rate": self.ppm.sample_rate,
                "amplitude": self.ppm.amplitude,
            },
            "channel": {
                "gain": self.channel.gain,
                "delay_samples": self.channel.delay_samples,
                "impulse_response": (
                    list(self.channel.impulse_response)
                    if self.channel.impulse_response is not None
                    else None
                ),
            },
            "interference": interference_to_dict(self.interference),
            "interference_scale": self.interference_scale,
            "noise": {"awgn_std": self.noise.awgn_std},
            "acquisition_samples": self.acquisition_samples,
            "obstructed_samples": self.obstructed_samples,
            "predictor_order": self.predictor_order,
            "n_frames": self.n_frames,
            "filtering": self.filtering,
            "seed": self.seed.seed,
            "stream_id": self.seed.stream_id,
            "significance_z": self.significance_z,
            "reference_gain": self.reference_gain,
            "lumen_to_amplitude": self.lumen_to_amplitude,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    axis: str
    values: tuple
    repetitions: int = 1

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; expected one of {AXES}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        for v in self.values:
            try:
                self.base.with_axis(self.axis, v)
            except ConfigError:
                raise
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"invalid {self.axis} value {v!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# (de)serialization


def interference_to_dict(spec) -> dict:
    if isinstance(spec, WhiteOnly):
        return {"type": "white"}
    if isinstance(spec, AutoRegressive):
        return {
            "type": "ar",
            "coefficients": list(spec.coefficients),
            "driving_std": spec.driving_std,
        }
    if isinstance(spec, HarmonicHum):
        return {
            "type": "hum",
            "fundamental_hz": spec.fundamental_hz,
            "harmonic_amplitudes": list(spec.harmonic_amplitudes),
            "phases": list(spec.phases) if spec.phases is not None else None,
        }
    if isinstance(spec, DcAmbient):
        return {"type": "dc", "level": spec.level}
    if isinstance(spec, Composite):
        return {"type": "composite", "components": [interference_to_dict(c) for c in spec.components]}
    raise ConfigError(f"cannot serialize interference {spec!r}")


def interference_from_dict(d: dict):
    kind = d.get("type")
    try:
        if kind == "white":
            return WhiteOnly()
        if kind == "ar":
            return AutoRegressive(tuple(d["coefficients"]), float(d.get("driving_std", 1.0)))
        if kind == "hum":
            phases = d.get("phases")
            return HarmonicHum(
                float(d["fundamental_hz"]),
                tuple(d["harmonic_amplitudes"]),
                tuple(phases) if phases is not None else None,
            )
        if kind == "dc":
            return DcAmbient(float(d["level"]))
        if kind == "composite":
            return Composite(tuple(interference_from_dict(c) for c in d["components"]))
    except KeyError as exc:
        raise ConfigError(f"interference of type {kind!r} is missing {exc}") from None
    raise ConfigError(f"unknown interference type {kind!r}")


def scenario_from_dict(d: dict) -> ScenarioConfig:
    known = {
        "modulation", "channel", "interference", "interference_scale", "noise",
        "acquisition_samples", "obstructed_samples", "predictor_order", "n_frames",
        "filtering", "seed", "stream_id", "significance_z", "reference_gain",
        "lumen_to_amplitude", "sweep",
    }
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    kwargs = {}
    try:
        if "modulation" in d:
            kwargs["ppm"] = PpmConfig(**d["modulation"])
        reference_gain = float(d.get("reference_gain", ScenarioConfig.reference_gain))
        if "channel" in d:
            ch = dict(d["channel"])
            if "distance_m" in ch:
                ch["gain"] = distance_gain(float(ch.pop("distance_m")), reference_gain)
            kwargs["channel"] = ChannelModel(**ch)
        if "interference" in d:
            kwargs["interference"] = interference_from_dict(d["interference"])
        if "noise" in d:
            kwargs["noise"] = NoiseSpec(**d["noise"])
        for key, conv in (
            ("interference_scale", float),
            ("acquisition_samples", int),
            ("obstructed_samples", int),
            ("predictor_order", int),
            ("n_frames", int),
            ("filtering", str),
            ("significance_z", float),
            ("reference_gain", float),
            ("lumen_to_amplitude", float),
        ):
            if key in d:
                kwargs[key] = conv(d[key])
        if "seed" in d or "stream_id" in d:
            kwargs["seed"] = RngSeed(int(d.get("seed", 0)), int(d.get("stream_id", 0)))
        return ScenarioConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def sweep_from_dict(d: dict, base: Optional[ScenarioConfig] = None) -> Optional[SweepSpec]:
    """The ``sweep`` block of a scenario file, or ``None`` if absent."""
    sweep = d.get("sweep")
    if sweep is None:
        return None
    base = base if base is not None else scenario_from_dict(d)
    try:
        return SweepSpec(base, sweep["axis"], tuple(sweep["values"]), int(sweep.get("repetitions", 1)))
    except KeyError as exc:
        raise ConfigError(f"sweep block is missing {exc}") from None


def load_scenario_file(path) -> dict:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    if not isinstance(d, dict):
        raise ConfigError("scenario file must hold a JSON object")
    return d


def load_preset(name: str) -> dict:
    from importlib import resources

    text = resources.files("vlcnm").joinpath("scenarios", f"{name}.json").read_text()
    return json.loads(text)
