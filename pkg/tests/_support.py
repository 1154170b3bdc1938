"""Shared builders for the test suite."""

from __future__ import annotations

import math

import numpy as np

from rfdmrp.rfd import TerrainGraph


def random_geometric_graph(seed: int) -> tuple[TerrainGraph, int]:
    """Connected random graph (6..12 vertices) with one seeded source.

    Vertices land uniformly on a 100x100 field, edges connect pairs within
    45 m, and components are stitched with their shortest separating link
    so the destination (vertex 0) is always reachable.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 13))
    pos = {i: (float(rng.uniform(0, 100)), float(rng.uniform(0, 100))) for i in range(n)}
    edges: set[tuple[int, int]] = set()
    for i in range(n):
        for j in range(i + 1, n):
            if math.dist(pos[i], pos[j]) <= 45.0:
                edges.add((i, j))

    def components() -> list[set[int]]:
        adj: dict[int, set[int]] = {i: set() for i in range(n)}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        seen: set[int] = set()
        out = []
        for i in range(n):
            if i in seen:
                continue
            stack, comp = [i], set()
            while stack:
                v = stack.pop()
                if v in comp:
                    continue
                comp.add(v)
                stack.extend(adj[v] - comp)
            seen |= comp
            out.append(comp)
        return out

    comps = components()
    while len(comps) > 1:
        best = None
        for a in comps[0]:
            for comp in comps[1:]:
                for b in comp:
                    d = math.dist(pos[a], pos[b])
                    if best is None or d < best[0]:
                        best = (d, a, b)
        edges.add((min(best[1], best[2]), max(best[1], best[2])))
        comps = components()
    source = int(rng.integers(1, n))
    return TerrainGraph(pos, sorted(edges), [source], 0), source


def all_simple_path_costs(graph: TerrainGraph, source: int) -> list[float]:
    """Costs of every simple source->destination path (exhaustive)."""
    costs: list[float] = []

    def extend(v: int, seen: set[int], cost: float) -> None:
        if v == graph.destination:
            costs.append(cost)
            return
        for w, d in graph.neighbors[v].items():
            if w not in seen:
                extend(w, seen | {w}, cost + d)

    extend(source, {source}, 0.0)
    return costs
