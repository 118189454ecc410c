"""Run configuration (INI) parsing and the reproducibility manifest."""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, economics
from .calendars import read_holidays_file
from .deficit import SystemConfig, WindGenerationSeries, Winterization
from .load import TemperatureLoadModel, load_load_model
from .outage import load_outage_model
from .validation import InputDataError
from .weather import WeightedTemperatureSeries, read_series_csv


@dataclass
class BootstrapSettings:
    iterations: int = economics.DEFAULT_ITERATIONS
    horizon_years: int = economics.DEFAULT_HORIZON_YEARS
    discount_rate: float = economics.DEFAULT_DISCOUNT_RATE
    seed: int = economics.DEFAULT_SEED


@dataclass
class CostSettings:
    wells_count: int = economics.DEFAULT_GAS_WELLS
    cost_per_well_usd: float = economics.DEFAULT_COST_PER_WELL_USD
    failed_gas_gw: float = economics.DEFAULT_FAILED_GAS_GW
    plant_capex_usd_per_gw: dict = field(
        default_factory=lambda: dict(economics.DEFAULT_PLANT_CAPEX_USD_PER_GW)
    )
    winterization_share: dict = field(
        default_factory=lambda: dict(economics.DEFAULT_WINTERIZATION_SHARE)
    )


@dataclass
class RunConfig:
    """Everything a simulation run needs, loaded from one INI file."""

    system: SystemConfig
    temps: dict[str, WeightedTemperatureSeries]
    wind: WindGenerationSeries
    load_model: TemperatureLoadModel
    holidays: frozenset
    bootstrap: BootstrapSettings
    costs: CostSettings
    input_paths: list[Path]
    winterization: list[Winterization] = field(default_factory=list)


def _require(parser: configparser.ConfigParser, section: str, path) -> configparser.SectionProxy:
    if not parser.has_section(section):
        raise InputDataError(f"{path}: missing [{section}] section")
    return parser[section]


def load_run_config(path) -> RunConfig:
    """Parse a run config INI and load every referenced input.

    Relative paths resolve against the config file's directory. Required
    sections: [system], [outage_models], [temperatures], [wind],
    [load_model]; [bootstrap] and [costs] are optional with documented
    defaults.
    """
    path = Path(path)
    if not path.exists():
        raise InputDataError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise InputDataError(f"{path}: {exc}") from exc
    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    inputs: list[Path] = [path]

    system_sec = _require(parser, "system", path)
    models_sec = _require(parser, "outage_models", path)
    temps_sec = _require(parser, "temperatures", path)
    wind_sec = _require(parser, "wind", path)
    load_sec = _require(parser, "load_model", path)

    try:
        outage_models = {}
        for tech, model_path in models_sec.items():
            p = resolve(model_path)
            inputs.append(p)
            outage_models[tech] = load_outage_model(p)

        system = SystemConfig(
            c_thermal_gw=system_sec.getfloat("c_thermal_gw", 62.0),
            c_wind_gw=system_sec.getfloat("c_wind_gw"),
            voll_usd_per_mwh=system_sec.getfloat("voll_usd_per_mwh", 9000.0),
            outage_models=outage_models,
        )

        temps = {}
        for basis, csv_path in temps_sec.items():
            p = resolve(csv_path)
            inputs.append(p)
            temps[basis] = read_series_csv(p, basis=basis)

        reference = next(iter(temps.values()))
        if wind_sec.get("file"):
            p = resolve(wind_sec["file"])
            inputs.append(p)
            wind_series = read_series_csv(p, basis="wind-generation")
            wind = WindGenerationSeries(wind_series.values, wind_series.timestamps)
        elif wind_sec.get("capacity_factor") is not None:
            cf = wind_sec.getfloat("capacity_factor")
            if not 0.0 <= cf <= 1.0:
                raise InputDataError(f"{path}: wind capacity_factor must lie in [0, 1]")
            wind = WindGenerationSeries(
                np.full(len(reference.values), cf * system.c_wind_gw),
                reference.timestamps,
            )
        else:
            raise InputDataError(f"{path}: [wind] needs 'file' or 'capacity_factor'")

        model_path = resolve(load_sec["file"])
        inputs.append(model_path)
        load_model = load_load_model(model_path)

        holidays = frozenset()
        if load_sec.get("holidays"):
            p = resolve(load_sec["holidays"])
            inputs.append(p)
            holidays = read_holidays_file(p)

        bootstrap = BootstrapSettings()
        if parser.has_section("bootstrap"):
            sec = parser["bootstrap"]
            bootstrap = BootstrapSettings(
                iterations=sec.getint("iterations", bootstrap.iterations),
                horizon_years=sec.getint("horizon_years", bootstrap.horizon_years),
                discount_rate=sec.getfloat("discount_rate", bootstrap.discount_rate),
                seed=sec.getint("seed", bootstrap.seed),
            )

        winterization = []
        if parser.has_section("winterize"):
            for tech, gw in parser["winterize"].items():
                winterization.append(Winterization(tech, float(gw)))

        costs = CostSettings()
        if parser.has_section("costs"):
            sec = parser["costs"]
            costs = CostSettings(
                wells_count=sec.getint("wells_count", costs.wells_count),
                cost_per_well_usd=sec.getfloat("cost_per_well_usd", costs.cost_per_well_usd),
                failed_gas_gw=sec.getfloat("failed_gas_gw", costs.failed_gas_gw),
                plant_capex_usd_per_gw={
                    tech: sec.getfloat(f"capex_{tech}", default)
                    for tech, default in costs.plant_capex_usd_per_gw.items()
                },
                winterization_share={
                    tech: sec.getfloat(f"share_{tech}", default)
                    for tech, default in costs.winterization_share.items()
                },
            )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, InputDataError):
            raise
        raise InputDataError(f"{path}: {exc}") from exc
    except FileNotFoundError as exc:
        raise InputDataError(f"{path}: referenced file not found: {exc.filename}") from exc

    return RunConfig(
        system=system,
        temps=temps,
        wind=wind,
        load_model=load_model,
        holidays=holidays,
        bootstrap=bootstrap,
        costs=costs,
        input_paths=inputs,
        winterization=winterization,
    )


def write_manifest(out_dir, command: str, seed: int, config_path=None, input_paths=()) -> Path:
    """Record the run: command, seed, inputs with content hashes, version.

    Identical manifests imply identical outputs; the file itself is written
    deterministically (sorted hash lines) so re-runs overwrite with the
    same bytes.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [
        f"tool_version = {__version__}",
        f"command = {command}",
        f"seed = {seed}",
        f"config = {config_path if config_path is not None else ''}",
        f"output_dir = {out_dir}",
    ]
    hash_lines = []
    for p in input_paths:
        p = Path(p)
        digest = hashlib.sha256(p.read_bytes()).hexdigest()
        hash_lines.append(f"input {p} sha256={digest}")
    lines += sorted(hash_lines)
    target = out_dir / f"manifest_{command}.txt"
    target.write_text("\n".join(lines) + "\n")
    return target
