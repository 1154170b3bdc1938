"""Multi-hop data collection: gradient forwarding and in-network aggregation.

Round structure follows the river analogy on the deployed field itself:
packets flow from the outermost hop-count region inward, each hop drawn
at random with probability proportional to a gradient that combines hop
descent and the candidate's residual energy. Hop-0 nodes deliver to the
base station directly; nodes with no usable downhill neighbor fall back
to a direct transmission as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .radio import EnergyLedger, RadioParams, fusion_energy, rx_energy, tx_energy
from .topology import BS_ID, Field, NNTableEntry, Node, refresh_energy_entries


@dataclass(frozen=True)
class AggregationPolicy:
    """Linear payload-scaling rule for fused packets.

    ``gamma`` interpolates between full aggregation (0: any number of
    inputs fuse into one base-size packet) and none (1: payload grows by
    one base packet per distinct origin).
    """

    gamma: float
    base_bits: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.base_bits < 1:
            raise ValueError("base_bits must be at least 1")


@dataclass(frozen=True)
class DataPacket:
    origin_ids: frozenset[int]
    bits: float
    holder: int


@dataclass(frozen=True)
class ForwardChoice:
    source: int
    target: int
    probabilities: dict[int, float]
    fallback: bool


def hop_energy_gradient(hop_count: int, entry: NNTableEntry) -> float:
    """Forwarding gradient from a node toward one neighbor-table entry.

    Hop-count drop per meter, weighted by the neighbor's residual energy.
    Positive only for neighbors strictly closer (in hops) to the BS.
    """
    if entry.distance == 0.0:
        raise ValueError(f"zero distance to neighbor {entry.next_node}; gradient undefined")
    return (hop_count - entry.hop_count) / entry.distance * entry.residual_energy


def select_forward_node(
    node: Node,
    entries: list[NNTableEntry],
    energy_threshold: float,
    rng: np.random.Generator,
) -> ForwardChoice:
    """Pick the next hop for a node's packet this round.

    Hop-0 nodes go straight to the BS. Otherwise the support set is the
    table entries with positive gradient and residual energy at or above
    the threshold; one is drawn with probability proportional to its
    gradient. An empty support set falls back to a direct BS
    transmission, flagged as such.
    """
    if node.hop_count == 0:
        return ForwardChoice(source=node.id, target=BS_ID, probabilities={}, fallback=False)
    support: list[tuple[NNTableEntry, float]] = []
    for entry in entries:
        if entry.residual_energy < energy_threshold:
            continue
        h = hop_energy_gradient(node.hop_count, entry)
        if h > 0.0:
            support.append((entry, h))
    if not support:
        return ForwardChoice(source=node.id, target=BS_ID, probabilities={}, fallback=True)
    total = sum(h for _, h in support)
    probabilities = {entry.next_node: h / total for entry, h in support}
    r = rng.random()
    cumulative = 0.0
    target = support[-1][0].next_node
    for entry, h in support:
        cumulative += h / total
        if r < cumulative:
            target = entry.next_node
            break
    return ForwardChoice(source=node.id, target=target, probabilities=probabilities, fallback=False)


def aggregate(policy: AggregationPolicy, packets: list[DataPacket], holder: int) -> DataPacket:
    """Fuse packets held by one node into a single outgoing packet.

    The payload is one base packet plus ``gamma`` of a base packet per
    additional distinct origin, so gamma=0 collapses everything into one
    packet and gamma=1 concatenates.
    """
    if not packets:
        raise ValueError("nothing to aggregate")
    origins = frozenset().union(*(p.origin_ids for p in packets))
    k = len(origins)
    bits = policy.base_bits * (1.0 + policy.gamma * (k - 1))
    return DataPacket(origin_ids=origins, bits=bits, holder=holder)


@dataclass
class RoundOutcome:
    packets_to_bs: int = 0
    direct_designated: int = 0
    direct_fallback: int = 0
    dropped_packets: int = 0


def relay_round(
    field: Field,
    tables: dict[int, list[NNTableEntry]],
    ledger: EnergyLedger,
    radio: RadioParams,
    policy: AggregationPolicy,
    energy_threshold: float,
    rng: np.random.Generator,
    control_bits: int = 0,
) -> RoundOutcome:
    """One data-collection round, outermost region first.

    Every alive node senses one base packet, fuses it with whatever it
    received from farther regions, and forwards the result. Receivers pay
    reception only if still alive when the packet arrives; packets held
    by or sent to nodes below the energy threshold are dropped. Ends with
    the energy-level table refresh.
    """
    outcome = RoundOutcome()
    inbox: dict[int, list[DataPacket]] = {}
    by_region: dict[int, list[int]] = {}
    for i in field.node_ids():
        by_region.setdefault(field.nodes[i].hop_count, []).append(i)
    for region in sorted(by_region, reverse=True):
        for i in by_region[region]:
            pending = inbox.pop(i, [])
            if not ledger.alive(i, energy_threshold):
                outcome.dropped_packets += len(pending)
                continue
            inputs = pending + [DataPacket(origin_ids=frozenset((i,)), bits=policy.base_bits, holder=i)]
            if pending:
                ledger.charge(i, fusion=fusion_energy(radio, sum(p.bits for p in inputs)))
            packet = aggregate(policy, inputs, i)
            choice = select_forward_node(field.nodes[i], tables[i], energy_threshold, rng)
            if choice.target == BS_ID:
                ledger.charge(i, tx=tx_energy(radio, packet.bits, field.distance_to_bs(i)))
                outcome.packets_to_bs += 1
                if choice.fallback:
                    outcome.direct_fallback += 1
                else:
                    outcome.direct_designated += 1
            else:
                j = choice.target
                ledger.charge(i, tx=tx_energy(radio, packet.bits, field.distance(i, j)))
                if ledger.alive(j, energy_threshold):
                    ledger.charge(j, rx=rx_energy(radio, packet.bits))
                    inbox.setdefault(j, []).append(
                        DataPacket(origin_ids=packet.origin_ids, bits=packet.bits, holder=j)
                    )
                else:
                    outcome.dropped_packets += 1
    refresh_energy_entries(field, tables, ledger, energy_threshold, radio, control_bits)
    return outcome
