"""River-formation dynamics path search on geometric graphs.

Water drops start at source vertices and walk downhill to a destination
whose altitude is pinned at zero. Each hop is drawn with probability
proportional to the decreasing gradient toward the neighbor; traversed
slopes erode and the removed soil is deposited on the vertex ahead, so
frequently used routes deepen and attract later drops. After the walks
converge (or an iteration cap), the most-traversed trail per source is
reported.

A plain Dijkstra solver over the same edge distances is included as an
independent reference for path quality.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np


class StrandedDrop(Exception):
    """Raised when a drop has no neighbor with a positive gradient."""


@dataclass(frozen=True)
class RfdParams:
    erosion_rate: float = 0.1
    sediment_fraction: float = 1.0
    max_iterations: int = 1000
    convergence_window: int = 10

    def __post_init__(self) -> None:
        if not 0 < self.erosion_rate:
            raise ValueError("erosion_rate must be positive")
        if self.sediment_fraction < 0:
            raise ValueError("sediment_fraction must be nonnegative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.convergence_window < 1:
            raise ValueError("convergence_window must be at least 1")


class TerrainGraph:
    """Undirected geometric graph with a mutable altitude per vertex.

    Vertices are integer ids with 2-D coordinates; edge lengths are the
    Euclidean distances between endpoints. Unless given explicitly, each
    vertex starts at an altitude equal to its straight-line distance to
    the destination, which seeds a downhill trend toward it. The
    destination's altitude is always zero.
    """

    def __init__(
        self,
        positions: dict[int, tuple[float, float]],
        edges: list[tuple[int, int]],
        sources: list[int],
        destination: int,
        altitudes: dict[int, float] | None = None,
    ):
        if destination not in positions:
            raise ValueError(f"destination {destination} has no position")
        for s in sources:
            if s not in positions:
                raise ValueError(f"source {s} has no position")
        self.positions = dict(positions)
        self.sources = list(sources)
        self.destination = destination
        self.neighbors: dict[int, dict[int, float]] = {v: {} for v in positions}
        for a, b in edges:
            if a not in positions or b not in positions:
                raise ValueError(f"edge ({a}, {b}) references an unknown vertex")
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            d = math.dist(positions[a], positions[b])
            self.neighbors[a][b] = d
            self.neighbors[b][a] = d
        if altitudes is None:
            dest_pos = positions[destination]
            self.altitude = {v: math.dist(pos, dest_pos) for v, pos in positions.items()}
        else:
            missing = set(positions) - set(altitudes)
            if missing:
                raise ValueError(f"altitudes missing for vertices {sorted(missing)}")
            if any(a < 0 for a in altitudes.values()):
                raise ValueError("altitudes must be nonnegative")
            self.altitude = {v: float(altitudes[v]) for v in positions}
        self.altitude[destination] = 0.0

    def vertex_ids(self) -> list[int]:
        return sorted(self.positions)

    def copy(self) -> "TerrainGraph":
        g = TerrainGraph.__new__(TerrainGraph)
        g.positions = dict(self.positions)
        g.sources = list(self.sources)
        g.destination = self.destination
        g.neighbors = {v: dict(n) for v, n in self.neighbors.items()}
        g.altitude = dict(self.altitude)
        return g


def decreasing_gradient(graph: TerrainGraph, i: int, j: int) -> float:
    """Altitude drop from i to j per meter of edge length.

    Positive when j lies downhill of i. Raises on a zero-length edge,
    where the slope is undefined.
    """
    distance = graph.neighbors[i][j]
    if distance == 0.0:
        raise ValueError(f"zero-distance edge ({i}, {j}) has no defined gradient")
    return (graph.altitude[i] - graph.altitude[j]) / distance


def forward_probabilities(graph: TerrainGraph, i: int) -> dict[int, float]:
    """Transition probabilities from i over its positive-gradient neighbors.

    Empty when no neighbor lies downhill.
    """
    gradients = {}
    for j in sorted(graph.neighbors[i]):
        dg = decreasing_gradient(graph, i, j)
        if dg > 0.0:
            gradients[j] = dg
    total = sum(gradients.values())
    return {j: dg / total for j, dg in gradients.items()}


def select_forward_position(graph: TerrainGraph, i: int, rng: np.random.Generator) -> int:
    """Sample the next vertex for a drop at i.

    Raises StrandedDrop when i has no positive-gradient neighbor.
    """
    probs = forward_probabilities(graph, i)
    if not probs:
        raise StrandedDrop(f"drop stranded at vertex {i}")
    r = rng.random()
    cumulative = 0.0
    choice = None
    for j, p in probs.items():
        cumulative += p
        choice = j
        if r < cumulative:
            break
    return choice


def erode_and_deposit(graph: TerrainGraph, i: int, j: int, params: RfdParams) -> None:
    """Apply erosion at i and sedimentation at j for a drop that moved i->j.

    The eroded amount is proportional to the traversed gradient. Altitudes
    clamp at zero and the destination is never raised.
    """
    delta = params.erosion_rate * decreasing_gradient(graph, i, j)
    if i != graph.destination:
        graph.altitude[i] = max(0.0, graph.altitude[i] - delta)
    if j != graph.destination:
        graph.altitude[j] = graph.altitude[j] + params.sediment_fraction * delta


@dataclass
class RfdResult:
    paths: dict[int, list[int] | None]
    iterations: int
    converged: bool


def _walk(graph: TerrainGraph, source: int, params: RfdParams, rng: np.random.Generator, max_steps: int) -> tuple[list[int], bool]:
    trail = [source]
    current = source
    while current != graph.destination:
        try:
            nxt = select_forward_position(graph, current, rng)
        except StrandedDrop:
            return trail, False
        erode_and_deposit(graph, current, nxt, params)
        trail.append(nxt)
        current = nxt
        if len(trail) > max_steps:
            return trail, False
    return trail, True


def run_rfd(graph: TerrainGraph, params: RfdParams, rng: np.random.Generator) -> RfdResult:
    """Run drop iterations until all sources converge or the cap is hit.

    Each iteration sends one drop per source (in ascending source order)
    on a complete walk, eroding as it goes. Walks that strand or exceed a
    step cap are discarded. A source has converged when its last
    ``convergence_window`` walks all succeeded along an identical trail.

    Returns the most-traversed successful trail per source, breaking
    count ties toward the lexicographically smallest vertex sequence;
    ``None`` for a source no drop ever carried to the destination. The
    caller's graph is not modified.
    """
    g = graph.copy()
    max_steps = max(16, 4 * len(g.positions))
    counts: dict[int, Counter] = {s: Counter() for s in g.sources}
    recent: dict[int, deque] = {s: deque(maxlen=params.convergence_window) for s in g.sources}
    iterations = 0
    converged = False
    for iterations in range(1, params.max_iterations + 1):
        for source in sorted(g.sources):
            trail, reached = _walk(g, source, params, rng, max_steps)
            if reached:
                counts[source][tuple(trail)] += 1
                recent[source].append(tuple(trail))
            else:
                recent[source].append(None)
        converged = all(
            len(window) == params.convergence_window
            and window[0] is not None
            and all(t == window[0] for t in window)
            for window in recent.values()
        )
        if converged:
            break
    paths: dict[int, list[int] | None] = {}
    for source in g.sources:
        if not counts[source]:
            paths[source] = None
            continue
        top = max(counts[source].values())
        paths[source] = list(min(t for t, c in counts[source].items() if c == top))
    return RfdResult(paths=paths, iterations=iterations, converged=converged)


def path_cost(graph: TerrainGraph, path: list[int]) -> float:
    """Total edge length along a vertex sequence."""
    return math.fsum(graph.neighbors[a][b] for a, b in zip(path, path[1:]))


def dijkstra_path(graph: TerrainGraph, source: int) -> tuple[list[int] | None, float]:
    """Shortest path from source to the graph's destination.

    Returns (path, cost), or (None, inf) when the destination is
    unreachable. Ties break toward the smaller predecessor id, making the
    result deterministic.
    """
    dist = {source: 0.0}
    prev: dict[int, int] = {}
    heap: list[tuple[float, int]] = [(0.0, source)]
    done: set[int] = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == graph.destination:
            break
        for w, length in sorted(graph.neighbors[v].items()):
            nd = d + length
            if w not in dist or nd < dist[w] or (nd == dist[w] and v < prev.get(w, v + 1)):
                dist[w] = nd
                prev[w] = v
                heapq.heappush(heap, (nd, w))
    if graph.destination not in done:
        return None, math.inf
    path = [graph.destination]
    while path[-1] != source:
        path.append(prev[path[-1]])
    path.reverse()
    return path, dist[graph.destination]
