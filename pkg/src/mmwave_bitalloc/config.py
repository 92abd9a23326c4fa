"""Experiment configuration: a versioned JSON schema with strict key
checking, plus the named presets used to reproduce the reference results."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .bitalloc import GaParams
from .channel import ArrayGeometry, ChannelConfig

SCHEMA_VERSION = 1

VALID_POLICIES = ("all-1-bit", "all-2-bit", "no-quantization", "fs", "ga", "crlb")
VALID_QUANTIZER_MODES = ("aqnm-linear", "lloyd-max")


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass(frozen=True)
class McConfig:
    num_symbols: int = 0
    seed: int = 0
    quantizer_mode: str = "aqnm-linear"

    def __post_init__(self):
        if self.num_symbols < 0:
            raise ConfigError("mc.num_symbols: must be >= 0")
        if self.quantizer_mode not in VALID_QUANTIZER_MODES:
            raise ConfigError(
                f"mc.quantizer_mode: {self.quantizer_mode!r} not in {VALID_QUANTIZER_MODES}"
            )


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    channel: ChannelConfig
    snr_grid_db: tuple
    policies: tuple
    num_rf_chains: int | None = None
    budget: float | str = "all-2-bit"
    b_min: int = 1
    b_max: int = 4
    mc: McConfig = field(default_factory=McConfig)
    ga: GaParams | None = None
    output_dir: str = "out"

    def __post_init__(self):
        if not self.policies:
            raise ConfigError("policies: at least one policy is required")
        for p in self.policies:
            if p not in VALID_POLICIES:
                raise ConfigError(f"policies: unknown policy {p!r}; valid: {VALID_POLICIES}")
        if not self.snr_grid_db:
            raise ConfigError("snr_grid_db: grid must be non-empty")
        if isinstance(self.budget, str) and self.budget != "all-2-bit":
            raise ConfigError(
                f"budget: expected a number or 'all-2-bit', got {self.budget!r}"
            )
        if self.num_rf_chains is not None and self.num_rf_chains < self.channel.num_streams:
            raise ConfigError("num_rf_chains: must be >= channel.num_streams")
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "policies", tuple(self.policies))

    def power_budget(self) -> float:
        if self.budget == "all-2-bit":
            return self.channel.num_streams * 4.0
        return float(self.budget)

    def ga_params(self, seed_override: int | None = None) -> GaParams:
        from .bitalloc import ga_preset

        params = self.ga if self.ga is not None else ga_preset(self.channel.num_streams)
        if seed_override is not None:
            params = GaParams(
                population=params.population,
                generations=params.generations,
                crossover_rate=params.crossover_rate,
                mutation_rate=params.mutation_rate,
                rng_seed=seed_override,
            )
        return params


def _require_keys(mapping: dict, allowed: set, context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{context}: unknown keys {sorted(unknown)}")


def config_to_dict(config: ExperimentConfig) -> dict:
    out = {
        "version": SCHEMA_VERSION,
        "name": config.name,
        "channel": asdict(config.channel),
        "snr_grid_db": list(config.snr_grid_db),
        "policies": list(config.policies),
        "budget": config.budget,
        "b_min": config.b_min,
        "b_max": config.b_max,
        "mc": asdict(config.mc),
        "output_dir": config.output_dir,
    }
    if config.num_rf_chains is not None:
        out["num_rf_chains"] = config.num_rf_chains
    if config.ga is not None:
        out["ga"] = asdict(config.ga)
    return out


def config_from_dict(data: dict) -> ExperimentConfig:
    _require_keys(
        data,
        {
            "version", "name", "channel", "snr_grid_db", "policies", "budget",
            "b_min", "b_max", "mc", "ga", "num_rf_chains", "output_dir",
        },
        "config",
    )
    version = data.get("version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"version: expected {SCHEMA_VERSION}, got {version!r}")
    if "channel" not in data:
        raise ConfigError("channel: section is required")

    chan = dict(data["channel"])
    _require_keys(
        chan,
        {
            "geometry", "num_streams", "num_clusters", "num_rays_per_cluster",
            "dominant_boost_factor", "rng_seed",
        },
        "channel",
    )
    geom = dict(chan.pop("geometry", {}))
    _require_keys(
        geom, {"num_tx_antennas", "num_rx_antennas", "element_spacing"}, "channel.geometry"
    )
    try:
        geometry = ArrayGeometry(**geom)
        channel = ChannelConfig(geometry=geometry, **chan)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"channel: {exc}") from exc

    mc_data = dict(data.get("mc", {}))
    _require_keys(mc_data, {"num_symbols", "seed", "quantizer_mode"}, "mc")
    ga_data = data.get("ga")
    ga = None
    if ga_data is not None:
        ga_data = dict(ga_data)
        _require_keys(
            ga_data,
            {"population", "generations", "crossover_rate", "mutation_rate", "rng_seed"},
            "ga",
        )
        ga = GaParams(**ga_data)

    return ExperimentConfig(
        name=str(data.get("name", "experiment")),
        channel=channel,
        snr_grid_db=tuple(data.get("snr_grid_db", ())),
        policies=tuple(data.get("policies", ())),
        num_rf_chains=data.get("num_rf_chains"),
        budget=data.get("budget", "all-2-bit"),
        b_min=int(data.get("b_min", 1)),
        b_max=int(data.get("b_max", 4)),
        mc=McConfig(**mc_data),
        ga=ga,
        output_dir=str(data.get("output_dir", "out")),
    )


def serialize_config(config: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True) + "\n"


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    return config_from_dict(data)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc


# Preset channels: enough clusters to populate every retained RF path with a
# healthy singular value, plus the boosted dominant scatterer.
_GEOMETRY_32x64 = ArrayGeometry(num_tx_antennas=32, num_rx_antennas=64)

PRESET_CHANNEL_8 = ChannelConfig(
    geometry=_GEOMETRY_32x64,
    num_streams=8,
    num_clusters=8,
    num_rays_per_cluster=10,
    dominant_boost_factor=3.0,
    rng_seed=2024,
)

PRESET_CHANNEL_12 = ChannelConfig(
    geometry=_GEOMETRY_32x64,
    num_streams=12,
    num_clusters=12,
    num_rays_per_cluster=10,
    dominant_boost_factor=3.0,
    rng_seed=2025,
)

_FULL_GRID = tuple(float(s) for s in range(-10, 31, 5))


def preset_config(name: str, output_dir: str = "out") -> ExperimentConfig:
    """Named experiment presets.

    ``fig2-shape`` / ``fig3-shape`` sweep all policies over [-10, 30] dB for
    the 8- and 12-path channels; ``table3`` runs the three allocators at a
    single operating point and is mainly about the summary's evaluation and
    operation counts.
    """
    if name == "fig2-shape":
        return ExperimentConfig(
            name=name,
            channel=PRESET_CHANNEL_8,
            snr_grid_db=_FULL_GRID,
            policies=("no-quantization", "crlb", "fs", "all-2-bit", "all-1-bit"),
            mc=McConfig(num_symbols=50000, seed=1234),
            output_dir=output_dir,
        )
    if name == "fig3-shape":
        return ExperimentConfig(
            name=name,
            channel=PRESET_CHANNEL_12,
            snr_grid_db=_FULL_GRID,
            policies=("no-quantization", "crlb", "fs", "all-2-bit", "all-1-bit"),
            mc=McConfig(num_symbols=50000, seed=1234),
            output_dir=output_dir,
        )
    if name == "table3":
        return ExperimentConfig(
            name=name,
            channel=PRESET_CHANNEL_8,
            snr_grid_db=(10.0,),
            policies=("fs", "ga", "crlb"),
            output_dir=output_dir,
        )
    raise ConfigError(f"preset: unknown preset {name!r}")


PRESET_NAMES = ("fig2-shape", "fig3-shape", "table3")
