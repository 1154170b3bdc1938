"""Simulation configuration and seeded random-stream derivation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .radio import RadioParams

PROTOCOLS = ("RFDMRP", "LEACH", "MODLEACH")

# Nodes participate while residual energy >= this fraction of the initial
# energy; below it a node counts as dead.
ENERGY_THRESHOLD_FRACTION = 0.2

# Purpose ids for independent random substreams of one master seed.
# Deployment is protocol-independent, so equal seeds give equal fields.
DEPLOYMENT_STREAM = 0
ELECTION_STREAM = 1
FORWARDING_STREAM = 2


def substream(seed: int, purpose: int) -> np.random.Generator:
    """Generator for one purpose, decorrelated from the other purposes."""
    return np.random.default_rng(np.random.SeedSequence((seed, purpose)))


@dataclass
class SimConfig:
    """Full description of one simulation run.

    Defaults are the reference scenario: 100 nodes on a 100 m x 100 m
    field, base station centered, 0.5 J per node, 4096-byte packets and a
    20 m transmission range.
    """

    protocol: str = "RFDMRP"
    node_count: int = 100
    field_width: float = 100.0
    field_height: float = 100.0
    bs_x: float = 50.0
    bs_y: float = 50.0
    initial_energy: float = 0.5
    packet_bits: int = 32768
    transmission_range: float = 20.0
    gamma: float = 0.0
    seed: int = 1
    max_rounds: int = 10000
    control_packet_bits: int = 0
    e_elec: float = 50e-9
    eps_fs: float = 10e-12
    eps_mp: float = 0.0013e-12
    e_da: float = 5e-9
    leach_p: float = 0.05
    modleach_head_retain: float = 0.5
    modleach_intra_power: float = 0.5
    nodes: list[tuple[int, float, float]] | None = None

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}; choose one of {', '.join(PROTOCOLS)}")
        if self.node_count < 1:
            raise ValueError("node_count must be at least 1")
        if self.field_width <= 0 or self.field_height <= 0:
            raise ValueError("field dimensions must be positive")
        if self.initial_energy <= 0:
            raise ValueError("initial_energy must be positive")
        if self.packet_bits < 1:
            raise ValueError("packet_bits must be at least 1")
        if self.transmission_range <= 0:
            raise ValueError("transmission_range must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if self.control_packet_bits < 0:
            raise ValueError("control_packet_bits must be nonnegative")
        for name in ("e_elec", "eps_fs", "eps_mp", "e_da"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.leach_p <= 1.0:
            raise ValueError("leach_p must lie in (0, 1]")
        if not 0.0 < self.modleach_head_retain <= 1.0:
            raise ValueError("modleach_head_retain must lie in (0, 1]")
        if not 0.0 < self.modleach_intra_power <= 1.0:
            raise ValueError("modleach_intra_power must lie in (0, 1]")

    def radio_params(self) -> RadioParams:
        return RadioParams(
            e_tx_elec=self.e_elec,
            e_rx_elec=self.e_elec,
            eps_fs=self.eps_fs,
            eps_mp=self.eps_mp,
            e_da=self.e_da,
        )

    def energy_threshold(self) -> float:
        return ENERGY_THRESHOLD_FRACTION * self.initial_energy
