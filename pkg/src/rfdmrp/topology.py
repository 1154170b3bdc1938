"""Sensor field, node deployment, hop-count regions and neighbor tables.

The base station is a distinguished, energy-unconstrained point with id
``BS_ID``. Sensor nodes get ids starting at 1. The field is divided into
concentric rings of width half the transmission range; a node's ring
index doubles as its hop count toward the base station.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from enum import Enum

import numpy as np

from .radio import EnergyLedger, RadioParams, rx_energy, tx_energy

BS_ID = 0


class PacketKind(Enum):
    REQUEST = "REQUEST"
    REPLY = "REPLY"
    ENERGY_LEVEL = "ENERGY_LEVEL"
    BEACON = "BEACON"


# Exact payload fields each control-packet kind carries.
PAYLOAD_FIELDS: dict[PacketKind, tuple[str, ...]] = {
    PacketKind.REQUEST: (),
    PacketKind.REPLY: ("hop_count", "residual_energy", "x", "y"),
    PacketKind.ENERGY_LEVEL: ("residual_energy",),
    PacketKind.BEACON: (),
}


@dataclass(frozen=True)
class ControlPacket:
    kind: PacketKind
    src: int
    dst: int
    payload: dict = dataclass_field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = set(PAYLOAD_FIELDS[self.kind])
        actual = set(self.payload)
        if actual != expected:
            raise ValueError(
                f"{self.kind.value} payload must have fields {sorted(expected)}, got {sorted(actual)}"
            )


@dataclass
class Node:
    id: int
    x: float
    y: float
    hop_count: int | None = None
    region: int | None = None
    isolated: bool = False


@dataclass
class Field:
    width: float
    height: float
    bs_x: float
    bs_y: float
    nodes: dict[int, Node]

    def node_ids(self) -> list[int]:
        return sorted(self.nodes)

    def distance(self, i: int, j: int) -> float:
        a, b = self.nodes[i], self.nodes[j]
        return math.hypot(a.x - b.x, a.y - b.y)

    def distance_to_bs(self, i: int) -> float:
        n = self.nodes[i]
        return math.hypot(n.x - self.bs_x, n.y - self.bs_y)


def deploy_nodes(
    count: int,
    width: float,
    height: float,
    bs_x: float,
    bs_y: float,
    rng: np.random.Generator,
) -> Field:
    """Scatter ``count`` nodes uniformly at random over the field."""
    if count < 1:
        raise ValueError("node count must be at least 1")
    if width <= 0 or height <= 0:
        raise ValueError("field dimensions must be positive")
    nodes = {}
    for node_id in range(1, count + 1):
        x = rng.uniform(0.0, width)
        y = rng.uniform(0.0, height)
        nodes[node_id] = Node(id=node_id, x=x, y=y)
    return Field(width=width, height=height, bs_x=bs_x, bs_y=bs_y, nodes=nodes)


def parse_node_lines(lines: list[str]) -> list[tuple[int, float, float]]:
    """Parse ``id, x, y`` node-list lines; '#' comments and blanks skipped."""
    specs: list[tuple[int, float, float]] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'id, x, y', got {raw.strip()!r}")
        try:
            node_id = int(parts[0])
            x = float(parts[1])
            y = float(parts[2])
        except ValueError:
            raise ValueError(f"line {lineno}: could not parse 'id, x, y' from {raw.strip()!r}") from None
        if node_id in seen:
            raise ValueError(f"line {lineno}: duplicate node id {node_id}")
        if node_id <= 0:
            raise ValueError(f"line {lineno}: node ids must be positive (got {node_id})")
        seen.add(node_id)
        specs.append((node_id, x, y))
    if not specs:
        raise ValueError("node list is empty")
    return specs


def field_from_nodes(
    specs: list[tuple[int, float, float]],
    width: float,
    height: float,
    bs_x: float,
    bs_y: float,
) -> Field:
    """Build a field from explicit (id, x, y) node placements."""
    nodes = {}
    for node_id, x, y in specs:
        if not (0.0 <= x <= width and 0.0 <= y <= height):
            raise ValueError(f"node {node_id} at ({x}, {y}) lies outside the {width}x{height} field")
        if node_id in nodes:
            raise ValueError(f"duplicate node id {node_id}")
        nodes[node_id] = Node(id=node_id, x=x, y=y)
    if not nodes:
        raise ValueError("node list is empty")
    return Field(width=width, height=height, bs_x=bs_x, bs_y=bs_y, nodes=nodes)


def region_count(field: Field, transmission_range: float) -> int:
    """Number of concentric rings needed to cover the farthest node.

    Ring width is half the transmission range, so a forwarder one ring
    closer to the base station is always within reach.
    """
    if transmission_range <= 0:
        raise ValueError("transmission range must be positive")
    farthest = max(field.distance_to_bs(i) for i in field.node_ids())
    return math.ceil(farthest / (transmission_range / 2.0))


def assign_hop_counts(field: Field, transmission_range: float) -> None:
    """Set each node's hop count (= ring index) from its distance to the BS."""
    if transmission_range <= 0:
        raise ValueError("transmission range must be positive")
    half = transmission_range / 2.0
    for i in field.node_ids():
        hc = math.floor(field.distance_to_bs(i) / half)
        field.nodes[i].hop_count = hc
        field.nodes[i].region = hc


@dataclass
class NNTableEntry:
    """One row of a node's neighbor table."""

    next_node: int
    hop_count: int
    residual_energy: float
    distance: float
    distance_to_bs: float


def _charge_pair(
    ledger: EnergyLedger,
    radio: RadioParams,
    bits: int,
    sender: int,
    receiver: int,
    distance: float,
) -> None:
    ledger.charge(sender, tx=tx_energy(radio, bits, distance))
    ledger.charge(receiver, rx=rx_energy(radio, bits))


def broadcast_beacon(field: Field, ledger: EnergyLedger, radio: RadioParams, control_bits: int) -> list[ControlPacket]:
    """BS beacon to every node; nodes pay reception when control traffic is metered."""
    packets = []
    for i in field.node_ids():
        packets.append(ControlPacket(PacketKind.BEACON, src=BS_ID, dst=i))
        if control_bits > 0:
            ledger.charge(i, rx=rx_energy(radio, control_bits))
    return packets


def build_nn_tables(
    field: Field,
    ledger: EnergyLedger,
    transmission_range: float,
    radio: RadioParams,
    control_bits: int = 0,
) -> dict[int, list[NNTableEntry]]:
    """Request/reply neighbor discovery within the transmission range.

    Every node asks each in-range neighbor for its hop count, residual
    energy and coordinates, and records one table entry per reply. Nodes
    with no in-range neighbor are flagged isolated. When ``control_bits``
    is positive the exchange is charged to both parties.
    """
    tables: dict[int, list[NNTableEntry]] = {}
    ids = field.node_ids()
    for i in ids:
        entries: list[NNTableEntry] = []
        for j in ids:
            if j == i:
                continue
            d = field.distance(i, j)
            if d > transmission_range:
                continue
            ControlPacket(PacketKind.REQUEST, src=i, dst=j)
            neighbor = field.nodes[j]
            reply = ControlPacket(
                PacketKind.REPLY,
                src=j,
                dst=i,
                payload={
                    "hop_count": neighbor.hop_count,
                    "residual_energy": ledger.residual[j],
                    "x": neighbor.x,
                    "y": neighbor.y,
                },
            )
            if control_bits > 0:
                _charge_pair(ledger, radio, control_bits, i, j, d)
                _charge_pair(ledger, radio, control_bits, j, i, d)
            entries.append(
                NNTableEntry(
                    next_node=j,
                    hop_count=reply.payload["hop_count"],
                    residual_energy=reply.payload["residual_energy"],
                    distance=d,
                    distance_to_bs=field.distance_to_bs(j),
                )
            )
        field.nodes[i].isolated = not entries
        tables[i] = entries
    return tables


def refresh_energy_entries(
    field: Field,
    tables: dict[int, list[NNTableEntry]],
    ledger: EnergyLedger,
    energy_threshold: float,
    radio: RadioParams,
    control_bits: int = 0,
) -> None:
    """End-of-round energy-level exchange.

    Each table entry is updated with the neighbor's current residual
    energy; entries for nodes that died (fell below the threshold) are
    removed. Updates are in place.
    """
    for i in field.node_ids():
        kept: list[NNTableEntry] = []
        for entry in tables[i]:
            j = entry.next_node
            reported = ledger.residual[j]
            if reported < energy_threshold:
                continue
            ControlPacket(PacketKind.ENERGY_LEVEL, src=j, dst=i, payload={"residual_energy": reported})
            if control_bits > 0 and ledger.residual[i] >= energy_threshold:
                _charge_pair(ledger, radio, control_bits, j, i, entry.distance)
            entry.residual_energy = reported
            kept.append(entry)
        tables[i] = kept


def setup_topology(
    field: Field,
    ledger: EnergyLedger,
    transmission_range: float,
    radio: RadioParams,
    control_bits: int = 0,
) -> dict[int, list[NNTableEntry]]:
    """Beacon, hop-count assignment and neighbor discovery, in that order."""
    broadcast_beacon(field, ledger, radio, control_bits)
    assign_hop_counts(field, transmission_range)
    return build_nn_tables(field, ledger, transmission_range, radio, control_bits)
