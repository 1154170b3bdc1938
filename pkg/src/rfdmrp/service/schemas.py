"""Request and response models for the simulation service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..config import SimConfig

ProtocolName = Literal["RFDMRP", "LEACH", "MODLEACH"]

ALL_PROTOCOLS: list[ProtocolName] = ["RFDMRP", "LEACH", "MODLEACH"]


class NodeSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: int = Field(gt=0)
    x: float
    y: float


class SimSettings(BaseModel):
    """Flat simulation settings; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    protocol: ProtocolName = "RFDMRP"
    node_count: int = Field(default=100, ge=1)
    field_width: float = Field(default=100.0, gt=0)
    field_height: float = Field(default=100.0, gt=0)
    bs_x: float = 50.0
    bs_y: float = 50.0
    initial_energy: float = Field(default=0.5, gt=0)
    packet_bits: int = Field(default=32768, ge=1)
    transmission_range: float = Field(default=20.0, gt=0)
    gamma: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = Field(default=1, ge=0)
    max_rounds: int = Field(default=10000, ge=1)
    control_packet_bits: int = Field(default=0, ge=0)
    e_elec: float = Field(default=50e-9, gt=0)
    eps_fs: float = Field(default=10e-12, gt=0)
    eps_mp: float = Field(default=0.0013e-12, gt=0)
    e_da: float = Field(default=5e-9, gt=0)
    leach_p: float = Field(default=0.05, gt=0.0, le=1.0)
    modleach_head_retain: float = Field(default=0.5, gt=0.0, le=1.0)
    modleach_intra_power: float = Field(default=0.5, gt=0.0, le=1.0)
    nodes: list[NodeSpec] | None = None

    def to_config(self) -> SimConfig:
        data = self.model_dump()
        specs = data.pop("nodes")
        if specs is not None:
            data["nodes"] = [(s["id"], s["x"], s["y"]) for s in specs]
        return SimConfig(**data)


class RoundRow(BaseModel):
    protocol: str
    seed: int
    round: int
    dead: int
    alive: int
    remaining_energy_j: float
    packets_to_bs: int
    direct_to_bs_hop0: int
    direct_to_bs_fallback: int


class Lifetime(BaseModel):
    first_death_round: int | None
    half_death_round: int | None
    last_death_round: int | None


class RunResult(BaseModel):
    protocol: str
    seed: int
    rounds: list[RoundRow]
    lifetime: Lifetime


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    settings: SimSettings = SimSettings()
    seeds: list[int] = Field(default=[1], min_length=1)
    protocols: list[ProtocolName] = Field(default_factory=lambda: list(ALL_PROTOCOLS), min_length=1)


class LifetimeCell(BaseModel):
    protocol: str
    param_name: str
    param_value: float | int | str
    seed: int
    first_death: int | None
    half_death: int | None
    last_death: int | None


class MedianCell(BaseModel):
    protocol: str
    param_name: str
    param_value: float | int | str
    n_seeds: int
    first_death_median: float
    half_death_median: float
    last_death_median: float


class CompareResult(BaseModel):
    runs: list[RunResult]
    rows: list[LifetimeCell]
    medians: list[MedianCell]


class DensitySweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    settings: SimSettings = SimSettings()
    node_counts: list[int] = Field(default=[25, 50, 100, 150, 200], min_length=1)
    seeds: list[int] = Field(default=[1], min_length=1)
    protocols: list[ProtocolName] = Field(default_factory=lambda: list(ALL_PROTOCOLS), min_length=1)


class GammaSweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    settings: SimSettings = SimSettings()
    gammas: list[float] = Field(default=[0.0, 0.25, 0.5, 0.75, 1.0], min_length=1)
    seeds: list[int] = Field(default=[1], min_length=1)
    protocols: list[ProtocolName] = Field(default_factory=lambda: ["RFDMRP"], min_length=1)


class SweepResult(BaseModel):
    param_name: str
    rows: list[LifetimeCell]
    medians: list[MedianCell]


class RfdVertex(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: int
    x: float
    y: float


class RfdRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertices: list[RfdVertex] = Field(min_length=1)
    edges: list[tuple[int, int]]
    sources: list[int] = Field(min_length=1)
    destination: int
    erosion_rate: float = Field(default=0.1, gt=0)
    sediment_fraction: float = Field(default=1.0, ge=0)
    max_iterations: int = Field(default=1000, ge=1)
    convergence_window: int = Field(default=10, ge=1)
    seed: int = Field(default=1, ge=0)


class RfdPathReport(BaseModel):
    source: int
    reached: bool
    path: list[int] | None
    cost: float | None
    shortest_path: list[int] | None
    shortest_cost: float | None
    ratio: float | None


class RfdResult(BaseModel):
    iterations: int
    converged: bool
    reports: list[RfdPathReport]


class Health(BaseModel):
    status: str
    version: str
