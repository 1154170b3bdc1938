"""HTTP service exposing simulation runs, comparisons and sweeps."""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..rfd import RfdParams, TerrainGraph, dijkstra_path, path_cost, run_rfd
from ..simulator import (
    SimulationResult,
    compare_protocols,
    lifetime_rows,
    median_rows,
    run_simulation,
    sweep_density,
    sweep_gamma,
)
from . import schemas


def _run_result(result: SimulationResult) -> schemas.RunResult:
    return schemas.RunResult(
        protocol=result.config.protocol,
        seed=result.config.seed,
        rounds=[schemas.RoundRow(**vars(m)) for m in result.rounds],
        lifetime=schemas.Lifetime(
            first_death_round=result.lifetime.first_death_round,
            half_death_round=result.lifetime.half_death_round,
            last_death_round=result.lifetime.last_death_round,
        ),
    )


def _sweep_result(param_name: str, rows, medians) -> schemas.SweepResult:
    return schemas.SweepResult(
        param_name=param_name,
        rows=[schemas.LifetimeCell(**vars(r)) for r in rows],
        medians=[schemas.MedianCell(**vars(m)) for m in medians],
    )


def create_app() -> FastAPI:
    app = FastAPI(title="rfdmrp", version=__version__)

    @app.get("/health", response_model=schemas.Health)
    def health() -> schemas.Health:
        return schemas.Health(status="ok", version=__version__)

    @app.post("/run", response_model=schemas.RunResult)
    def run(settings: schemas.SimSettings) -> schemas.RunResult:
        try:
            result = run_simulation(settings.to_config())
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return _run_result(result)

    @app.post("/compare", response_model=schemas.CompareResult)
    def compare(request: schemas.CompareRequest) -> schemas.CompareResult:
        try:
            results = compare_protocols(
                request.settings.to_config(), request.seeds, request.protocols
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        rows = lifetime_rows(results)
        medians = median_rows(rows, request.settings.max_rounds)
        return schemas.CompareResult(
            runs=[_run_result(r) for r in results],
            rows=[schemas.LifetimeCell(**vars(r)) for r in rows],
            medians=[schemas.MedianCell(**vars(m)) for m in medians],
        )

    @app.post("/sweep/density", response_model=schemas.SweepResult)
    def density(request: schemas.DensitySweepRequest) -> schemas.SweepResult:
        try:
            rows, medians = sweep_density(
                request.settings.to_config(), request.node_counts, request.seeds, request.protocols
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return _sweep_result("node_count", rows, medians)

    @app.post("/sweep/gamma", response_model=schemas.SweepResult)
    def gamma(request: schemas.GammaSweepRequest) -> schemas.SweepResult:
        try:
            rows, medians = sweep_gamma(
                request.settings.to_config(), request.gammas, request.seeds, request.protocols
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return _sweep_result("gamma", rows, medians)

    @app.post("/rfd/paths", response_model=schemas.RfdResult)
    def rfd_paths(request: schemas.RfdRequest) -> schemas.RfdResult:
        if len({v.id for v in request.vertices}) != len(request.vertices):
            raise HTTPException(status_code=422, detail="duplicate vertex ids")
        try:
            graph = TerrainGraph(
                positions={v.id: (v.x, v.y) for v in request.vertices},
                edges=[tuple(e) for e in request.edges],
                sources=request.sources,
                destination=request.destination,
            )
            params = RfdParams(
                erosion_rate=request.erosion_rate,
                sediment_fraction=request.sediment_fraction,
                max_iterations=request.max_iterations,
                convergence_window=request.convergence_window,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        rng = np.random.default_rng(request.seed)
        result = run_rfd(graph, params, rng)
        reports = []
        for source in request.sources:
            found = result.paths[source]
            shortest, shortest_cost = dijkstra_path(graph, source)
            cost = path_cost(graph, found) if found is not None else None
            ratio = None
            if cost is not None and shortest is not None and shortest_cost > 0:
                ratio = cost / shortest_cost
            reports.append(
                schemas.RfdPathReport(
                    source=source,
                    reached=found is not None,
                    path=found,
                    cost=cost,
                    shortest_path=shortest,
                    shortest_cost=None if shortest is None else shortest_cost,
                    ratio=ratio,
                )
            )
        return schemas.RfdResult(
            iterations=result.iterations, converged=result.converged, reports=reports
        )

    return app


app = create_app()
