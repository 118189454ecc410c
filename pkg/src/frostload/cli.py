"""Batch command-line interface for the simulation pipeline.

Subcommands: synth-weather, fit-load, fit-outage, simulate, events,
bootstrap, sensitivity, report. Exit codes: 0 success, 2 input error,
3 numeric failure (rank deficiency, degenerate fits). All randomness flows
from a single --seed flag (default 20210215); every command records a
manifest with content hashes of its inputs, and re-running a command with
the same manifest overwrites its outputs with identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__, economics, events as events_mod
from .calendars import read_holidays_file, winter_mask
from .config import load_run_config, write_manifest
from .deficit import DeficitSeries, Winterization, run_years, sensitivity_sweep
from .economics import (
    DEFAULT_SEED,
    annuity_factor,
    avoided_loss,
    bootstrap_losses,
    marginal_curve,
    profitable_capacity,
    winterization_costs,
)
from .load import TemperatureLoadModel, build_design, read_load_csv, save_load_model
from .outage import fit_outage_model, read_episode_csv, save_outage_model
from .validation import FitError, InputDataError
from .weather import (
    ColdSpell,
    WeatherProfile,
    apply_trend,
    read_series_csv,
    site_maps_from_csv,
    synth_weather,
    weighted_index,
    write_field_csv,
    write_series_csv,
)

FROST_TREND_THRESHOLDS = tuple(float(t) for t in range(0, -11, -1))


def _parse_spell(text: str) -> ColdSpell:
    parts = text.split(",")
    if len(parts) != 4:
        raise InputDataError(
            f"--spell expects YEAR,START_HOUR,DEPTH_C,LENGTH_H, got '{text}'"
        )
    return ColdSpell(
        year=int(parts[0]),
        start_hour=int(parts[1]),
        depth_c=float(parts[2]),
        length_h=int(parts[3]),
    )


def _parse_winterize(text: str) -> Winterization:
    if "=" not in text:
        raise InputDataError(f"--winterize expects TECH=GW, got '{text}'")
    tech, _, gw = text.partition("=")
    return Winterization(tech.strip(), float(gw))


def _parse_trend(text: str) -> tuple[float, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputDataError(f"--trend expects SLOPE,Y_REF, got '{text}'")
    return float(parts[0]), int(parts[1])


def _parse_float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip() != ""]


def _exclude_years(annual: pd.DataFrame, years: list[int]) -> pd.DataFrame:
    return annual[~annual["year"].isin(years)].reset_index(drop=True)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_synth_weather(args) -> int:
    if not args.out_grid and not args.sites:
        raise InputDataError("synth-weather needs --out-grid and/or --sites with --out-dir")
    profile = WeatherProfile(
        mean_c=args.mean_c,
        seasonal_amplitude_c=args.seasonal_amp_c,
        diurnal_amplitude_c=args.diurnal_amp_c,
        noise_sigma_c=args.noise_sigma_c,
        noise_ar=args.noise_ar,
        floor_c=args.floor_c,
    )
    spells = [_parse_spell(s) for s in args.spell or []]
    field = synth_weather(
        seed=args.seed,
        years=args.years,
        profile=profile,
        cold_spells=spells,
        start_year=args.start_year,
    )
    if args.out_grid:
        Path(args.out_grid).parent.mkdir(parents=True, exist_ok=True)
        write_field_csv(field, args.out_grid)
        print(f"wrote {args.out_grid} ({len(field)} hours)")
    if args.sites:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        maps = site_maps_from_csv(args.sites, field.grid, wind_split_lat=args.wind_split_lat)
        for label in sorted(maps):
            series = weighted_index(field, maps[label])
            target = out_dir / f"temps_{label}.csv"
            write_series_csv(series, target)
            print(f"wrote {target}")
        write_manifest(out_dir, "synth-weather", args.seed, input_paths=[args.sites])
    return 0


def cmd_fit_load(args) -> int:
    stamps, load_gw = read_load_csv(args.load)
    temps = read_series_csv(args.temps, basis="population")
    holidays = read_holidays_file(args.holidays) if args.holidays else frozenset()

    pos = temps.timestamps.get_indexer(stamps)
    if np.any(pos < 0):
        raise InputDataError(
            f"{args.load}: load hours missing from the temperature series"
        )
    wm = winter_mask(stamps)
    if not wm.any():
        raise InputDataError("no winter hours (Dec-Feb) in the load data")

    X = build_design(stamps[wm], temps.values[pos][wm], holidays)
    model = TemperatureLoadModel(label=args.label).fit(X, load_gw[wm])

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_load_model(model, args.out)
    print(f"rmse_gw = {model.rmse_:.6f}")
    print(f"r_squared = {model.r2_:.6f}")
    print(f"n_obs = {model.n_obs_}")
    print(f"model = {args.out}")
    return 0


def cmd_fit_outage(args) -> int:
    temps = read_series_csv(args.temps, basis=args.tech)
    episode = read_episode_csv(args.episodes, temps, args.tech)
    model = fit_outage_model(episode, recovery_temp_c=args.recovery_temp)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_outage_model(model, args.out)
    print(f"onset_temp_c = {model.onset_temp_c:.4f}")
    print(f"plateau_gw = {model.plateau_gw:.4f}")
    print(f"recovery_slope_gw_per_h = {model.recovery_slope_gw_per_h:.4f}")
    print(f"model = {args.out}")
    return 0


def _simulate(cfg, winterize, trend, seed):
    temps = cfg.temps
    if trend is not None:
        slope, y_ref = trend
        temps = {label: apply_trend(s, slope, y_ref) for label, s in temps.items()}
    scenario = list(cfg.winterization) + list(winterize or [])
    return run_years(
        cfg.system,
        temps,
        cfg.load_model,
        cfg.wind,
        holidays=cfg.holidays,
        winterization=scenario or None,
    )


def cmd_simulate(args) -> int:
    cfg = load_run_config(args.config)
    seed = args.seed if args.seed is not None else cfg.bootstrap.seed
    winterize = [_parse_winterize(w) for w in args.winterize or []]
    trend = _parse_trend(args.trend) if args.trend else None

    series = _simulate(cfg, winterize, trend, seed)
    annual = _exclude_years(series.annual_summary(), args.exclude_year or [])

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hourly = pd.DataFrame({"timestamp": series.timestamps, "deficit_gw": series.deficit_gw})
    hourly.to_csv(out_dir / "deficit_hourly.csv", index=False,
                  date_format="%Y-%m-%dT%H:%M:%S")
    annual.to_csv(out_dir / "deficit_annual.csv", index=False)
    write_manifest(out_dir, "simulate", seed, config_path=args.config,
                   input_paths=cfg.input_paths)

    total = annual["total_deficit_gwh"].sum()
    print(f"years = {len(annual)}")
    print(f"total_lost_load_gwh = {total:.6f}")
    print(f"peak_deficit_gw = {annual['peak_deficit_gw'].max():.6f}")
    print(f"outputs = {out_dir}")
    return 0


def cmd_events(args) -> int:
    df = pd.read_csv(args.deficit_hourly)
    if "timestamp" not in df.columns or "deficit_gw" not in df.columns:
        raise InputDataError(f"{args.deficit_hourly}: needs columns timestamp, deficit_gw")
    stamps = pd.DatetimeIndex(pd.to_datetime(df["timestamp"], format="ISO8601"))
    deficits = df["deficit_gw"].to_numpy(dtype=float)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    power_events = events_mod.extract_events(
        deficits, stamps, threshold=0.0, mode="above", inter_event_h=args.inter_event_h
    )
    events_mod.events_to_frame(power_events).to_csv(out_dir / "events.csv", index=False)

    gev_rows = []
    annual = events_mod.annual_series(power_events)
    gev_rows += _gev_rows("deficit", annual, minima_intensity=False)

    inputs = [args.deficit_hourly]
    if args.temps:
        temps = read_series_csv(args.temps, basis="population")
        frost_events = events_mod.extract_events(
            temps.values, temps.timestamps, threshold=0.0, mode="below",
            inter_event_h=args.inter_event_h,
        )
        events_mod.events_to_frame(frost_events).to_csv(
            out_dir / "frost_events.csv", index=False
        )
        gev_rows += _gev_rows("frost", events_mod.annual_series(frost_events),
                              minima_intensity=True)

        mins = events_mod.annual_minima(temps.values, temps.timestamps)
        table = events_mod.threshold_trend_table(
            mins["min_c"], mins["year"], FROST_TREND_THRESHOLDS
        )
        table.to_csv(out_dir / "trend_table.csv", index=False)

        means = events_mod.annual_means(temps.values, temps.timestamps)
        slope = events_mod.mean_temp_trend(means["mean_c"], means["year"])
        print(f"mean_temp_trend_c_per_year = {slope:.6f}")
        inputs.append(args.temps)

    pd.DataFrame(
        gev_rows,
        columns=["series", "characteristic", "n", "loc", "scale", "shape",
                 "largest_value", "largest_year", "return_period_years"],
    ).to_csv(out_dir / "gev_return_periods.csv", index=False)

    write_manifest(out_dir, "events", DEFAULT_SEED, input_paths=inputs)
    print(f"events = {len(power_events)}")
    print(f"outputs = {out_dir}")
    return 0


def _gev_rows(series_name, annual, minima_intensity):
    """GEV fits per characteristic with the return period of the record value."""
    rows = []
    years = sorted(annual)
    for characteristic in ("duration_h", "severity", "intensity"):
        values = np.array([getattr(annual[y], characteristic) for y in years], dtype=float)
        minima = minima_intensity and characteristic == "intensity"
        row = {"series": series_name, "characteristic": characteristic, "n": len(values)}
        try:
            fit = events_mod.fit_gev(values, minima=minima)
            record_idx = int(np.argmin(values)) if minima else int(np.argmax(values))
            record = float(values[record_idx])
            row.update(
                loc=fit.loc, scale=fit.scale, shape=fit.shape,
                largest_value=record, largest_year=years[record_idx],
                return_period_years=events_mod.return_period(fit, record),
            )
        except (FitError, InputDataError):
            row.update(loc=np.nan, scale=np.nan, shape=np.nan,
                       largest_value=np.nan, largest_year=np.nan,
                       return_period_years=np.nan)
        rows.append(row)
    return rows


def cmd_bootstrap(args) -> int:
    cfg = load_run_config(args.config)
    seed = args.seed if args.seed is not None else cfg.bootstrap.seed
    iterations = args.iterations if args.iterations is not None else cfg.bootstrap.iterations
    settings = dict(
        b_iterations=iterations,
        horizon_years=cfg.bootstrap.horizon_years,
        discount_rate=args.discount_rate if args.discount_rate is not None
        else cfg.bootstrap.discount_rate,
        voll_usd_per_mwh=cfg.system.voll_usd_per_mwh,
        seed=seed,
    )

    annual = pd.read_csv(args.annual)
    if "year" not in annual.columns or "total_deficit_gwh" not in annual.columns:
        raise InputDataError(f"{args.annual}: needs columns year, total_deficit_gwh")
    annual = _exclude_years(annual, args.exclude_year or [])
    if annual.empty:
        raise InputDataError("annual deficit set is empty after exclusions")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    base = bootstrap_losses(annual["total_deficit_gwh"].to_numpy(), **settings)
    pd.DataFrame(
        {"iteration": np.arange(base.b_iterations), "loss_usd": base.losses_usd}
    ).to_csv(out_dir / "loss_distribution.csv", index=False)

    print(f"mean_loss_usd = {base.mean():.2f}")
    print(f"p16_loss_usd = {np.percentile(base.losses_usd, 16):.2f}")
    print(f"p84_loss_usd = {np.percentile(base.losses_usd, 84):.2f}")
    print(f"zero_loss_fraction = {base.zero_loss_fraction():.6f}")

    inputs = list(cfg.input_paths) + [args.annual]
    if args.tech:
        costs = winterization_costs(
            wells_count=cfg.costs.wells_count,
            cost_per_well_usd=cfg.costs.cost_per_well_usd,
            failed_gas_gw=cfg.costs.failed_gas_gw,
            plant_capex_usd_per_gw=cfg.costs.plant_capex_usd_per_gw,
            winterization_share=cfg.costs.winterization_share,
        )
        cost_key = "wind" if args.tech.startswith("wind") else args.tech
        if cost_key not in costs.cost_usd_per_gw:
            raise InputDataError(f"no winterization cost defined for '{args.tech}'")
        cost_per_gw = costs.cost_usd_per_gw[cost_key]

        exclude = args.exclude_year or []
        w_grid = np.arange(0, args.max_w + 1, dtype=float)
        means, p16s, p84s = [0.0], [0.0], [0.0]
        for w in w_grid[1:]:
            run = _simulate(cfg, [Winterization(args.tech, float(w))], None, seed)
            totals = _exclude_years(run.annual_summary(), exclude)["total_deficit_gwh"]
            dist = bootstrap_losses(totals.to_numpy(), **settings)
            av = avoided_loss(base, dist)
            means.append(av.mean)
            p16s.append(av.p16)
            p84s.append(av.p84)

        curve = marginal_curve(w_grid, means, p16s, p84s)
        profitable_gw = profitable_capacity(curve["marginal_mean"], cost_per_gw)
        table = pd.DataFrame(
            {
                "w_gw": w_grid[1:].astype(int),
                "tech": args.tech,
                "mean_avoided": means[1:],
                "p16": p16s[1:],
                "p84": p84s[1:],
                "marginal_mean": curve["marginal_mean"],
                "cost_per_gw": cost_per_gw,
                "profitable": curve["marginal_mean"] >= cost_per_gw,
            }
        )
        table.to_csv(out_dir / "avoided_loss.csv", index=False)
        print(f"cost_per_gw_usd = {cost_per_gw:.2f}")
        print(f"profitable_capacity_gw = {profitable_gw}")

    write_manifest(out_dir, "bootstrap", seed, config_path=args.config,
                   input_paths=inputs)
    print(f"outputs = {out_dir}")
    return 0


def cmd_sensitivity(args) -> int:
    cfg = load_run_config(args.config)
    table = sensitivity_sweep(
        cfg.system,
        cfg.temps,
        cfg.load_model,
        cfg.wind,
        deltas_onset=_parse_float_list(args.deltas_onset),
        deltas_recovery=_parse_float_list(args.deltas_recovery),
        scope=args.scope,
        holidays=cfg.holidays,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table.to_csv(out_dir / "sensitivity.csv", index=False)
    write_manifest(out_dir, "sensitivity", DEFAULT_SEED, config_path=args.config,
                   input_paths=cfg.input_paths)
    print(f"grid_points = {len(table)}")
    print(f"outputs = {out_dir}")
    return 0


def cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    annual_path = run_dir / "deficit_annual.csv"
    if not annual_path.exists():
        raise InputDataError(f"missing upstream output: {annual_path}")
    annual = pd.read_csv(annual_path)

    lines = [f"frostload {__version__} run report", ""]
    total = annual["total_deficit_gwh"].sum()
    nonzero = annual[annual["total_deficit_gwh"] > 0]
    lines.append(f"years_simulated = {len(annual)}")
    lines.append(f"total_lost_load_gwh = {total:.6f}")
    lines.append(f"total_lost_load_twh = {total / 1000.0:.3g}")
    lines.append(f"deficit_event_years = {len(nonzero)}")
    if not nonzero.empty:
        ranked = nonzero.sort_values("total_deficit_gwh", ascending=False)
        top = ranked.iloc[0]
        lines.append(f"largest_event_year = {int(top['year'])}")
        lines.append(f"largest_event_gwh = {top['total_deficit_gwh']:.6f}")
        lines.append("largest_event_rank = 1")

    events_path = run_dir / "events.csv"
    if events_path.exists():
        events_df = pd.read_csv(events_path)
        lines.append(f"pooled_events = {len(events_df)}")
        if events_df.empty:
            lines.append("summary = 0 events")

    dist_path = run_dir / "loss_distribution.csv"
    if dist_path.exists():
        losses = pd.read_csv(dist_path)["loss_usd"].to_numpy()
        cfg_rate = args.discount_rate
        horizon = args.horizon_years
        factor = annuity_factor(cfg_rate, horizon)
        mean_annual = annual["total_deficit_gwh"].mean()
        expected = args.voll * 1000.0 * mean_annual * factor
        lines.append(f"bootstrap_mean_loss_usd = {losses.mean():.2f}")
        lines.append(f"annuity_factor = {factor:.6f}")
        lines.append(f"annuity_expected_loss_usd = {expected:.2f}")

    avoided_path = run_dir / "avoided_loss.csv"
    if avoided_path.exists():
        av = pd.read_csv(avoided_path)
        profitable_rows = av[av["profitable"]]
        last = int(profitable_rows["w_gw"].max()) if not profitable_rows.empty else 0
        lines.append(f"profitable_capacity_gw = {last}")

    out_path = Path(args.out) if args.out else run_dir / "summary.txt"
    out_path.write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frostload",
        description="Cold-spell loss-of-load simulation and winterization economics",
    )
    parser.add_argument("--version", action="version", version=f"frostload {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-weather", help="generate a synthetic temperature field")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--years", type=int, required=True)
    p.add_argument("--start-year", type=int, default=1950)
    p.add_argument("--spell", action="append", metavar="YEAR,START_HOUR,DEPTH_C,LENGTH_H")
    p.add_argument("--mean-c", type=float, default=18.0)
    p.add_argument("--seasonal-amp-c", type=float, default=10.0)
    p.add_argument("--diurnal-amp-c", type=float, default=4.0)
    p.add_argument("--noise-sigma-c", type=float, default=2.5)
    p.add_argument("--noise-ar", type=float, default=0.9)
    p.add_argument("--floor-c", type=float, default=None)
    p.add_argument("--out-grid", help="write the gridded field CSV here")
    p.add_argument("--sites", help="site CSV: weighted series are written per label")
    p.add_argument("--out-dir", default=".", help="directory for weighted series CSVs")
    p.add_argument("--wind-split-lat", type=float, default=30.0)
    p.set_defaults(func=cmd_synth_weather)

    p = sub.add_parser("fit-load", help="fit the winter demand regression")
    p.add_argument("--load", required=True, help="CSV: timestamp, load_gw")
    p.add_argument("--temps", required=True, help="population-weighted series CSV")
    p.add_argument("--holidays", help="holiday calendar, one ISO date per line")
    p.add_argument("--label", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_load)

    p = sub.add_parser("fit-outage", help="fit a 4-segment outage model")
    p.add_argument("--episodes", required=True, help="CSV: timestamp, tech, outage_gw")
    p.add_argument("--temps", required=True, help="plant-weighted series CSV")
    p.add_argument("--tech", required=True)
    p.add_argument("--recovery-temp", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_outage)

    p = sub.add_parser("simulate", help="run the deficit chain over the config span")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--winterize", action="append", metavar="TECH=GW")
    p.add_argument("--trend", metavar="SLOPE,Y_REF")
    p.add_argument("--exclude-year", action="append", type=int)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("events", help="extract pooled events and extreme statistics")
    p.add_argument("--deficit-hourly", required=True)
    p.add_argument("--temps", help="population-weighted series CSV for frost statistics")
    p.add_argument("--inter-event-h", type=int, default=24)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("bootstrap", help="bootstrap discounted losses and avoided loss")
    p.add_argument("--config", required=True)
    p.add_argument("--annual", required=True, help="deficit_annual.csv from simulate")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--tech", help="winterization sweep technology")
    p.add_argument("--max-w", type=int, default=15)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--discount-rate", type=float, default=None)
    p.add_argument("--exclude-year", action="append", type=int)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("sensitivity", help="sweep outage threshold shifts")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--deltas-onset", required=True, metavar="D1,D2,...")
    p.add_argument("--deltas-recovery", default="0", metavar="D1,D2,...")
    p.add_argument("--scope", choices=("gas", "all"), default="all")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("report", help="summarize run outputs")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out", help="summary path (default RUN_DIR/summary.txt)")
    p.add_argument("--discount-rate", type=float, default=0.05)
    p.add_argument("--horizon-years", type=int, default=30)
    p.add_argument("--voll", type=float, default=9000.0)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 2
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
