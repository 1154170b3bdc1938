"""First-order radio energy model and per-node energy accounting.

All energies are in joules, distances in meters, payloads in bits.
Transmission cost switches between free-space (d^2) and multipath (d^4)
amplification at the crossover distance d0 = sqrt(eps_fs / eps_mp).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadioParams:
    """Electronics and amplifier coefficients of the radio.

    Attributes:
        e_tx_elec: transmitter electronics cost, J/bit.
        e_rx_elec: receiver electronics cost, J/bit.
        eps_fs: free-space amplifier coefficient, J/bit/m^2.
        eps_mp: multipath amplifier coefficient, J/bit/m^4.
        e_da: data-fusion cost, J/bit.
    """

    e_tx_elec: float = 50e-9
    e_rx_elec: float = 50e-9
    eps_fs: float = 10e-12
    eps_mp: float = 0.0013e-12
    e_da: float = 5e-9

    def __post_init__(self) -> None:
        for name in ("e_tx_elec", "e_rx_elec", "eps_fs", "eps_mp", "e_da"):
            if getattr(self, name) <= 0:
                raise ValueError(f"radio parameter {name} must be positive")

    @property
    def d0(self) -> float:
        """Crossover distance between the two amplifier regimes, meters."""
        return math.sqrt(self.eps_fs / self.eps_mp)

    def scaled_amplifiers(self, factor: float) -> "RadioParams":
        """Copy with both amplifier coefficients scaled by ``factor``.

        Electronics and fusion costs are unchanged, and so is d0 (it is a
        ratio of the two coefficients). Used for reduced-power intra-cluster
        transmission.
        """
        if factor <= 0:
            raise ValueError("amplifier scale factor must be positive")
        return RadioParams(
            e_tx_elec=self.e_tx_elec,
            e_rx_elec=self.e_rx_elec,
            eps_fs=self.eps_fs * factor,
            eps_mp=self.eps_mp * factor,
            e_da=self.e_da,
        )


def crossover_distance(params: RadioParams) -> float:
    return params.d0


def tx_energy(params: RadioParams, bits: float, distance: float) -> float:
    """Energy to transmit ``bits`` over ``distance`` meters.

    Free-space amplification up to and including d0, multipath beyond it.
    """
    if bits < 0:
        raise ValueError("bit count must be nonnegative")
    if distance < 0:
        raise ValueError("distance must be nonnegative")
    if distance <= params.d0:
        return bits * (params.e_tx_elec + params.eps_fs * distance * distance)
    return bits * (params.e_tx_elec + params.eps_mp * distance**4)


def rx_energy(params: RadioParams, bits: float) -> float:
    """Energy to receive ``bits``; electronics only, no distance term."""
    if bits < 0:
        raise ValueError("bit count must be nonnegative")
    return bits * params.e_rx_elec


def fusion_energy(params: RadioParams, bits: float) -> float:
    """Energy to fuse ``bits`` of input data into one outgoing packet."""
    if bits < 0:
        raise ValueError("bit count must be nonnegative")
    return bits * params.e_da


class EnergyLedger:
    """Tracks residual and consumed energy per node.

    The ledger is the single source of truth for residual energy. Charges
    clamp at zero: a node can never go negative, and the consumed totals
    only ever include energy that was actually deducted. Charging a node
    that is already at zero is a no-op recorded in ``dead_charge_attempts``.
    """

    def __init__(self, initial: dict[int, float]):
        for node_id, e0 in initial.items():
            if e0 < 0:
                raise ValueError(f"initial energy for node {node_id} is negative")
        self.residual: dict[int, float] = dict(initial)
        self.consumed: dict[int, float] = {node_id: 0.0 for node_id in initial}
        self.tx_total = 0.0
        self.rx_total = 0.0
        self.fusion_total = 0.0
        self.dead_charge_attempts = 0

    def charge(self, node_id: int, tx: float = 0.0, rx: float = 0.0, fusion: float = 0.0) -> float:
        """Deduct energy from a node, clamping at zero.

        Returns the amount actually deducted. If the request exceeds the
        node's residual energy, the deduction is capped and split across
        the tx/rx/fusion totals proportionally.
        """
        if tx < 0 or rx < 0 or fusion < 0:
            raise ValueError("energy charges must be nonnegative")
        residual = self.residual[node_id]
        requested = tx + rx + fusion
        if residual <= 0.0:
            if requested > 0.0:
                self.dead_charge_attempts += 1
                log.debug("charge of %.3e J attempted on depleted node %d", requested, node_id)
            return 0.0
        if requested <= 0.0:
            return 0.0
        spent = min(residual, requested)
        if spent < requested:
            scale = spent / requested
            tx, rx, fusion = tx * scale, rx * scale, fusion * scale
        self.residual[node_id] = residual - spent
        self.consumed[node_id] += spent
        self.tx_total += tx
        self.rx_total += rx
        self.fusion_total += fusion
        return spent

    def alive(self, node_id: int, threshold: float) -> bool:
        """A node participates only while its residual energy meets the threshold."""
        return self.residual[node_id] >= threshold

    def alive_ids(self, threshold: float) -> list[int]:
        return sorted(i for i, e in self.residual.items() if e >= threshold)

    def total_residual(self) -> float:
        return math.fsum(self.residual.values())

    def total_consumed(self) -> float:
        return math.fsum(self.consumed.values())
