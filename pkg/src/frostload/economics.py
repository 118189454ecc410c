"""Bootstrapped discounted losses and winterization cost-benefit.

Each bootstrap iteration draws an investment horizon of annual lost-load
totals (with replacement) from the simulated weather years, discounts them
at the configured rate, and prices them at the value of lost load. Paired
substream sampling (iteration b is a pure function of (seed, b)) makes the
avoided loss between winterization levels per-iteration monotone and the
whole distribution bit-reproducible, independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .validation import InputDataError, as_float_array

DEFAULT_ITERATIONS = 10_000
DEFAULT_HORIZON_YEARS = 30
DEFAULT_DISCOUNT_RATE = 0.05
DEFAULT_VOLL_USD_PER_MWH = 9_000.0
DEFAULT_SEED = 20210215

MWH_PER_GWH = 1_000.0

# Reported winterization cost inputs: well retrofits spread over the failed
# gas capacity, plus a share of plant capex per technology.
DEFAULT_GAS_WELLS = 123_000
DEFAULT_COST_PER_WELL_USD = 50_000.0
DEFAULT_FAILED_GAS_GW = 18.0
DEFAULT_PLANT_CAPEX_USD_PER_GW = {"gas": 1.12e9, "coal": 2.24e9, "wind": 1.3e9}
DEFAULT_WINTERIZATION_SHARE = {"gas": 0.10, "coal": 0.10, "wind": 0.05}


@dataclass
class LossDistribution:
    """Discounted losses over the horizon, one value per bootstrap iteration."""

    losses_usd: np.ndarray
    b_iterations: int
    horizon_years: int
    discount_rate: float
    voll_usd_per_mwh: float
    seed: int

    def zero_loss_fraction(self) -> float:
        return float(np.mean(self.losses_usd == 0.0))

    def mean(self) -> float:
        return float(self.losses_usd.mean())


@dataclass
class AvoidedLoss:
    """Per-iteration avoided loss and its 68% interval summary."""

    differences_usd: np.ndarray
    mean: float
    p16: float
    p84: float


def annuity_factor(rate: float, horizon_years: int) -> float:
    """Sum of (1+r)^-i for i = 1..horizon."""
    if rate == 0.0:
        return float(horizon_years)
    return (1.0 - (1.0 + rate) ** -horizon_years) / rate


def bootstrap_losses(
    annual_deficits_gwh,
    b_iterations: int = DEFAULT_ITERATIONS,
    horizon_years: int = DEFAULT_HORIZON_YEARS,
    discount_rate: float = DEFAULT_DISCOUNT_RATE,
    voll_usd_per_mwh: float = DEFAULT_VOLL_USD_PER_MWH,
    seed: int = DEFAULT_SEED,
) -> LossDistribution:
    """Bootstrap the discounted loss distribution from annual deficit totals.

    Iteration b draws ``horizon_years`` annual totals uniformly with
    replacement using the substream ``default_rng([seed, b])``, so results
    do not depend on evaluation order and iterations can be distributed.
    The i-th drawn year is discounted by (1 + r)^-i, i = 1..horizon, and
    deficits are converted GWh -> MWh before pricing.
    """
    d = as_float_array(annual_deficits_gwh, "annual deficits")
    if np.any(d < 0):
        raise InputDataError("annual deficits must be non-negative")
    if discount_rate <= -1.0:
        raise InputDataError("discount rate must exceed -1")
    if b_iterations < 1 or horizon_years < 1:
        raise InputDataError("iterations and horizon must be positive")

    n = len(d)
    discounts = (1.0 + discount_rate) ** -np.arange(1, horizon_years + 1, dtype=float)
    losses = np.empty(b_iterations)
    for b in range(b_iterations):
        rng = np.random.default_rng([seed, b])
        idx = rng.integers(0, n, size=horizon_years)
        losses[b] = voll_usd_per_mwh * MWH_PER_GWH * float(d[idx] @ discounts)
    return LossDistribution(
        losses_usd=losses,
        b_iterations=b_iterations,
        horizon_years=horizon_years,
        discount_rate=discount_rate,
        voll_usd_per_mwh=voll_usd_per_mwh,
        seed=seed,
    )


def avoided_loss(base: LossDistribution, winterized: LossDistribution) -> AvoidedLoss:
    """Per-iteration loss reduction between paired distributions."""
    paired = (
        base.b_iterations == winterized.b_iterations
        and base.seed == winterized.seed
        and base.horizon_years == winterized.horizon_years
        and base.discount_rate == winterized.discount_rate
    )
    if not paired:
        raise InputDataError(
            "distributions are not paired (seed, iterations, horizon, and "
            "discount rate must match)"
        )
    diff = base.losses_usd - winterized.losses_usd
    return AvoidedLoss(
        differences_usd=diff,
        mean=float(diff.mean()),
        p16=float(np.percentile(diff, 16)),
        p84=float(np.percentile(diff, 84)),
    )


def marginal_curve(w_gw, means_usd, p16_usd=None, p84_usd=None) -> dict[str, np.ndarray]:
    """First differences of the avoided-loss curve on a 1-GW grid.

    Returns arrays keyed ``w_gw`` (the 1-based GW step), ``marginal_mean``
    and, when percentile curves are supplied, ``marginal_p16``/
    ``marginal_p84``; all in $ per GW step.
    """
    w = as_float_array(w_gw, "winterization grid")
    means = as_float_array(means_usd, "avoided-loss means")
    if len(w) != len(means) or len(w) < 2:
        raise InputDataError("need matching grids with at least two points")
    steps = np.diff(w)
    if np.any(np.abs(steps - 1.0) > 1e-9):
        raise InputDataError("winterization grid must ascend in uniform 1 GW steps")
    out = {"w_gw": w[1:], "marginal_mean": np.diff(means)}
    if p16_usd is not None:
        out["marginal_p16"] = np.diff(as_float_array(p16_usd, "p16 curve"))
    if p84_usd is not None:
        out["marginal_p84"] = np.diff(as_float_array(p84_usd, "p84 curve"))
    return out


@dataclass
class CostModel:
    """Per-technology winterization cost with its component breakdown, $/GW."""

    cost_usd_per_gw: dict[str, float]
    fuel_usd_per_gw: dict[str, float]
    plant_usd_per_gw: dict[str, float]


def winterization_costs(
    wells_count: int = DEFAULT_GAS_WELLS,
    cost_per_well_usd: float = DEFAULT_COST_PER_WELL_USD,
    failed_gas_gw: float = DEFAULT_FAILED_GAS_GW,
    plant_capex_usd_per_gw: Mapping[str, float] = None,
    winterization_share: Mapping[str, float] = None,
) -> CostModel:
    """Per-technology winterization cost in $/GW.

    Gas carries the fuel-infrastructure component (well retrofit total
    spread over the failed gas capacity) on top of its plant share; coal
    and wind winterize plants only.
    """
    capex = dict(DEFAULT_PLANT_CAPEX_USD_PER_GW if plant_capex_usd_per_gw is None
                 else plant_capex_usd_per_gw)
    share = dict(DEFAULT_WINTERIZATION_SHARE if winterization_share is None
                 else winterization_share)
    if wells_count <= 0 or cost_per_well_usd <= 0:
        raise InputDataError("well count and cost must be positive")
    if failed_gas_gw <= 0:
        raise InputDataError("failed gas capacity must be positive")
    if any(v < 0 for v in capex.values()) or any(v < 0 for v in share.values()):
        raise InputDataError("capex and winterization shares must be non-negative")

    fuel = {tech: 0.0 for tech in capex}
    fuel["gas"] = wells_count * cost_per_well_usd / failed_gas_gw
    plant = {tech: share[tech] * capex[tech] for tech in capex}
    total = {tech: fuel.get(tech, 0.0) + plant[tech] for tech in capex}
    return CostModel(cost_usd_per_gw=total, fuel_usd_per_gw=fuel, plant_usd_per_gw=plant)


def profitable_capacity(marginal_means_usd, cost_usd_per_gw: float) -> int:
    """Largest GW step whose marginal avoided loss covers the cost.

    The curve is indexed from the first winterized GW; returns 0 when even
    the first GW is unprofitable.
    """
    marginal = as_float_array(marginal_means_usd, "marginal curve")
    profitable = np.flatnonzero(marginal >= cost_usd_per_gw)
    if profitable.size == 0:
        return 0
    return int(profitable[-1]) + 1
