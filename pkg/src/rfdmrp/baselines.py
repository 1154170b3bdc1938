"""Cluster-based baselines: LEACH and its head-retention variant.

LEACH re-elects cluster heads every round with the rotating-threshold
rule; members send to their nearest head, which fuses and forwards to
the base station. The variant keeps a head in place while its residual
energy stays above a fraction of what it had when elected, and lets
members use reduced amplifier power for the short intra-cluster link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .protocol import AggregationPolicy, DataPacket, RoundOutcome, aggregate
from .radio import EnergyLedger, RadioParams, fusion_energy, rx_energy, tx_energy
from .topology import Field


@dataclass(frozen=True)
class LeachParams:
    p: float = 0.05
    head_retain: float = 0.5
    intra_power: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError("desired head fraction p must lie in (0, 1]")
        if not 0.0 < self.head_retain <= 1.0:
            raise ValueError("head_retain must lie in (0, 1]")
        if not 0.0 < self.intra_power <= 1.0:
            raise ValueError("intra_power must lie in (0, 1]")


@dataclass
class ClusterState:
    heads: list[int] = dataclass_field(default_factory=list)
    members: dict[int, int] = dataclass_field(default_factory=dict)
    election_energy: dict[int, float] = dataclass_field(default_factory=dict)


def election_threshold(p: float, round_idx: int) -> float:
    """Rotating self-election probability for an eligible node."""
    window = math.ceil(1.0 / p)
    return p / (1.0 - p * (round_idx % window))


def _assign_members(field: Field, ledger: EnergyLedger, heads: list[int], energy_threshold: float) -> dict[int, int]:
    members: dict[int, int] = {}
    for i in ledger.alive_ids(energy_threshold):
        if i in heads:
            continue
        members[i] = min(heads, key=lambda h: (field.distance(i, h), h))
    return members


def elect_heads(
    field: Field,
    ledger: EnergyLedger,
    params: LeachParams,
    round_idx: int,
    energy_threshold: float,
    rng: np.random.Generator,
    history: dict[int, int],
) -> ClusterState:
    """Fresh head election among alive nodes.

    A node that served as head within the last ceil(1/p) rounds sits the
    election out. Members attach to their nearest head; with no heads
    elected the round degenerates to direct transmission for everyone.
    """
    window = math.ceil(1.0 / params.p)
    threshold = election_threshold(params.p, round_idx)
    heads: list[int] = []
    for i in ledger.alive_ids(energy_threshold):
        last = history.get(i)
        if last is not None and round_idx - last < window:
            continue
        if rng.random() < threshold:
            heads.append(i)
            history[i] = round_idx
    state = ClusterState(heads=heads, election_energy={h: ledger.residual[h] for h in heads})
    if heads:
        state.members = _assign_members(field, ledger, heads, energy_threshold)
    return state


def retain_or_elect(
    field: Field,
    ledger: EnergyLedger,
    params: LeachParams,
    state: ClusterState | None,
    round_idx: int,
    energy_threshold: float,
    rng: np.random.Generator,
    history: dict[int, int],
) -> ClusterState:
    """Keep the current heads if every one still holds enough energy.

    Retention requires each head to be alive with residual energy at or
    above ``head_retain`` times its energy at election; otherwise (or
    with no standing heads) a fresh election runs. Membership is
    recomputed either way, since members die between rounds.
    """
    if state is not None and state.heads:
        retained = all(
            ledger.alive(h, energy_threshold)
            and ledger.residual[h] >= params.head_retain * state.election_energy[h]
            for h in state.heads
        )
        if retained:
            state.members = _assign_members(field, ledger, state.heads, energy_threshold)
            return state
    return elect_heads(field, ledger, params, round_idx, energy_threshold, rng, history)


def cluster_round(
    field: Field,
    state: ClusterState,
    ledger: EnergyLedger,
    radio: RadioParams,
    policy: AggregationPolicy,
    energy_threshold: float,
    intra_radio: RadioParams | None = None,
) -> RoundOutcome:
    """One cluster-based collection round.

    Members transmit to their head (with ``intra_radio`` amplifier
    settings when given), heads fuse and forward to the BS. A round with
    no heads has every alive node transmit directly to the BS, counted in
    the fallback column. Packets addressed to a head that died are lost.
    """
    outcome = RoundOutcome()
    intra = intra_radio if intra_radio is not None else radio
    alive = ledger.alive_ids(energy_threshold)
    if not state.heads:
        for i in alive:
            ledger.charge(i, tx=tx_energy(radio, policy.base_bits, field.distance_to_bs(i)))
            outcome.packets_to_bs += 1
            outcome.direct_fallback += 1
        return outcome
    received: dict[int, list[DataPacket]] = {h: [] for h in state.heads}
    for member in sorted(state.members):
        if not ledger.alive(member, energy_threshold):
            continue
        head = state.members[member]
        packet = DataPacket(origin_ids=frozenset((member,)), bits=policy.base_bits, holder=member)
        ledger.charge(member, tx=tx_energy(intra, policy.base_bits, field.distance(member, head)))
        if ledger.alive(head, energy_threshold):
            ledger.charge(head, rx=rx_energy(radio, policy.base_bits))
            received[head].append(packet)
        else:
            outcome.dropped_packets += 1
    for head in sorted(state.heads):
        if not ledger.alive(head, energy_threshold):
            outcome.dropped_packets += len(received[head])
            continue
        inputs = received[head] + [DataPacket(origin_ids=frozenset((head,)), bits=policy.base_bits, holder=head)]
        if received[head]:
            ledger.charge(head, fusion=fusion_energy(radio, sum(p.bits for p in inputs)))
        packet = aggregate(policy, inputs, head)
        ledger.charge(head, tx=tx_energy(radio, packet.bits, field.distance_to_bs(head)))
        outcome.packets_to_bs += 1
        outcome.direct_designated += 1
    return outcome
