"""Round-driven simulation engine and experiment sweeps.

A run deploys (or loads) a field, then executes protocol rounds until
every node is dead or the round cap is reached. Round 0 is the initial
state. Per-round metrics are cumulative for packet counters and
instantaneous for node/energy state, so each row is a self-contained
snapshot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .baselines import LeachParams, cluster_round, elect_heads, retain_or_elect
from .config import (
    DEPLOYMENT_STREAM,
    ELECTION_STREAM,
    FORWARDING_STREAM,
    PROTOCOLS,
    SimConfig,
    substream,
)
from .protocol import AggregationPolicy, relay_round
from .radio import EnergyLedger
from .topology import Field, deploy_nodes, field_from_nodes, setup_topology


@dataclass(frozen=True)
class RoundMetrics:
    protocol: str
    seed: int
    round: int
    dead: int
    alive: int
    remaining_energy_j: float
    packets_to_bs: int
    direct_to_bs_hop0: int
    direct_to_bs_fallback: int


@dataclass(frozen=True)
class LifetimeSummary:
    first_death_round: int | None
    half_death_round: int | None
    last_death_round: int | None


@dataclass
class SimulationResult:
    config: SimConfig
    rounds: list[RoundMetrics]
    lifetime: LifetimeSummary


RoundHook = Callable[[int, Field, EnergyLedger], None]


def _build_field(config: SimConfig) -> Field:
    if config.nodes is not None:
        return field_from_nodes(
            config.nodes, config.field_width, config.field_height, config.bs_x, config.bs_y
        )
    rng = substream(config.seed, DEPLOYMENT_STREAM)
    return deploy_nodes(
        config.node_count, config.field_width, config.field_height, config.bs_x, config.bs_y, rng
    )


def run_simulation(config: SimConfig, on_round: RoundHook | None = None) -> SimulationResult:
    """Execute one run and collect per-round metrics.

    ``on_round`` (round index, field, ledger) is invoked after every
    emitted round, including round 0; it exists for instrumentation such
    as invariant checks and is never required for normal operation.
    """
    config.validate()
    radio = config.radio_params()
    t_e = config.energy_threshold()
    field = _build_field(config)
    n = len(field.nodes)
    ledger = EnergyLedger({i: config.initial_energy for i in field.node_ids()})
    policy = AggregationPolicy(gamma=config.gamma, base_bits=config.packet_bits)

    if config.protocol == "RFDMRP":
        tables = setup_topology(field, ledger, config.transmission_range, radio, config.control_packet_bits)
        forward_rng = substream(config.seed, FORWARDING_STREAM)
    else:
        election_rng = substream(config.seed, ELECTION_STREAM)
        leach_params = LeachParams(
            p=config.leach_p,
            head_retain=config.modleach_head_retain,
            intra_power=config.modleach_intra_power,
        )
        intra_radio = radio.scaled_amplifiers(config.modleach_intra_power)
        history: dict[int, int] = {}
        state = None

    packets_cum = 0
    designated_cum = 0
    fallback_cum = 0
    first_death = half_death = last_death = None

    def snapshot(round_idx: int) -> RoundMetrics:
        alive = len(ledger.alive_ids(t_e))
        return RoundMetrics(
            protocol=config.protocol,
            seed=config.seed,
            round=round_idx,
            dead=n - alive,
            alive=alive,
            remaining_energy_j=ledger.total_residual(),
            packets_to_bs=packets_cum,
            direct_to_bs_hop0=designated_cum,
            direct_to_bs_fallback=fallback_cum,
        )

    rounds = [snapshot(0)]
    if on_round is not None:
        on_round(0, field, ledger)

    for round_idx in range(1, config.max_rounds + 1):
        if not ledger.alive_ids(t_e):
            break
        if config.protocol == "RFDMRP":
            outcome = relay_round(
                field, tables, ledger, radio, policy, t_e, forward_rng, config.control_packet_bits
            )
        elif config.protocol == "LEACH":
            state = elect_heads(field, ledger, leach_params, round_idx, t_e, election_rng, history)
            outcome = cluster_round(field, state, ledger, radio, policy, t_e)
        else:
            state = retain_or_elect(
                field, ledger, leach_params, state, round_idx, t_e, election_rng, history
            )
            outcome = cluster_round(field, state, ledger, radio, policy, t_e, intra_radio=intra_radio)
        packets_cum += outcome.packets_to_bs
        designated_cum += outcome.direct_designated
        fallback_cum += outcome.direct_fallback
        metrics = snapshot(round_idx)
        rounds.append(metrics)
        if on_round is not None:
            on_round(round_idx, field, ledger)
        if first_death is None and metrics.dead >= 1:
            first_death = round_idx
        if half_death is None and 2 * metrics.dead >= n:
            half_death = round_idx
        if metrics.dead == n:
            last_death = round_idx
            break

    return SimulationResult(
        config=config,
        rounds=rounds,
        lifetime=LifetimeSummary(
            first_death_round=first_death,
            half_death_round=half_death,
            last_death_round=last_death,
        ),
    )


def compare_protocols(
    config: SimConfig,
    seeds: Sequence[int],
    protocols: Sequence[str] = PROTOCOLS,
) -> list[SimulationResult]:
    """Run every protocol on every seed; equal seeds share the deployment."""
    if not seeds:
        raise ValueError("at least one seed is required")
    results = []
    for protocol in protocols:
        for seed in seeds:
            results.append(run_simulation(replace(config, protocol=protocol, seed=seed)))
    return results


@dataclass(frozen=True)
class LifetimeRow:
    protocol: str
    param_name: str
    param_value: float | int | str
    seed: int
    first_death: int | None
    half_death: int | None
    last_death: int | None


@dataclass(frozen=True)
class MedianRow:
    protocol: str
    param_name: str
    param_value: float | int | str
    n_seeds: int
    first_death_median: float
    half_death_median: float
    last_death_median: float


def _lifetime_row(result: SimulationResult, param_name: str, param_value) -> LifetimeRow:
    lt = result.lifetime
    return LifetimeRow(
        protocol=result.config.protocol,
        param_name=param_name,
        param_value=param_value,
        seed=result.config.seed,
        first_death=lt.first_death_round,
        half_death=lt.half_death_round,
        last_death=lt.last_death_round,
    )


def median_rows(rows: list[LifetimeRow], max_rounds: int) -> list[MedianRow]:
    # Runs that hit the round cap before a death milestone are censored
    # there; the cap stands in for the unseen round so medians stay defined.
    def as_value(v: int | None) -> float:
        return float(max_rounds if v is None else v)

    cells: dict[tuple[str, object], list[LifetimeRow]] = {}
    for row in rows:
        cells.setdefault((row.protocol, row.param_value), []).append(row)
    out = []
    for (protocol, value), cell in cells.items():
        out.append(
            MedianRow(
                protocol=protocol,
                param_name=cell[0].param_name,
                param_value=value,
                n_seeds=len(cell),
                first_death_median=float(np.median([as_value(r.first_death) for r in cell])),
                half_death_median=float(np.median([as_value(r.half_death) for r in cell])),
                last_death_median=float(np.median([as_value(r.last_death) for r in cell])),
            )
        )
    return out


def lifetime_rows(
    results: Sequence[SimulationResult], param_name: str = "none", param_value: object = ""
) -> list[LifetimeRow]:
    return [_lifetime_row(r, param_name, param_value) for r in results]


def sweep_density(
    config: SimConfig,
    node_counts: Sequence[int],
    seeds: Sequence[int],
    protocols: Sequence[str] = PROTOCOLS,
) -> tuple[list[LifetimeRow], list[MedianRow]]:
    """Lifetime summaries across deployment sizes."""
    if not node_counts:
        raise ValueError("at least one node count is required")
    if not seeds:
        raise ValueError("at least one seed is required")
    if config.nodes is not None:
        raise ValueError("a density sweep redeploys nodes; it cannot use an explicit node list")
    for count in node_counts:
        if count < 1:
            raise ValueError(f"node counts must be at least 1, got {count}")
    rows = []
    for protocol in protocols:
        for count in node_counts:
            for seed in seeds:
                cfg = replace(config, protocol=protocol, node_count=count, seed=seed)
                rows.append(_lifetime_row(run_simulation(cfg), "node_count", count))
    return rows, median_rows(rows, config.max_rounds)


def sweep_gamma(
    config: SimConfig,
    gammas: Sequence[float],
    seeds: Sequence[int],
    protocols: Sequence[str] = ("RFDMRP",),
) -> tuple[list[LifetimeRow], list[MedianRow]]:
    """Lifetime summaries across aggregation settings.

    All gamma values are validated up front so an invalid sweep produces
    no partial results.
    """
    if not gammas:
        raise ValueError("at least one gamma value is required")
    if not seeds:
        raise ValueError("at least one seed is required")
    for gamma in gammas:
        if not 0.0 <= gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    rows = []
    for protocol in protocols:
        for gamma in gammas:
            for seed in seeds:
                cfg = replace(config, protocol=protocol, gamma=gamma, seed=seed)
                rows.append(_lifetime_row(run_simulation(cfg), "gamma", gamma))
    return rows, median_rows(rows, config.max_rounds)
