"""Command-line client for the simulation service.

All computation happens behind the HTTP API: by default an in-process
instance of the service is used, and --server points the same commands
at a remote one. The client parses local files (config, node lists,
graph specs), sends requests, and renders the responses as CSV files,
gnuplot scripts and console summaries.

Exit codes: 0 success, 1 I/O or server failure, 2 invalid configuration
or arguments, 3 demo graph with an unreachable source.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import httpx

from .topology import parse_node_lines

ROUNDS_HEADER = [
    "protocol",
    "seed",
    "round",
    "dead",
    "alive",
    "remaining_energy_j",
    "packets_to_bs",
    "direct_to_bs_hop0",
    "direct_to_bs_fallback",
]
SUMMARY_HEADER = ["protocol", "param_name", "param_value", "seed", "first_death", "half_death", "last_death"]
MEDIANS_HEADER = [
    "protocol",
    "param_name",
    "param_value",
    "n_seeds",
    "first_death_median",
    "half_death_median",
    "last_death_median",
]

ALL_PROTOCOLS = ("RFDMRP", "LEACH", "MODLEACH")


class CliError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


class ServiceClient:
    """POSTs to a remote server, or to an in-process service instance."""

    def __init__(self, server: str | None = None):
        if server is None:
            import warnings

            with warnings.catch_warnings():
                warnings.filterwarnings("ignore", message="Using `httpx` with `starlette.testclient`")
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)
        else:
            self._client = httpx.Client(base_url=server, timeout=600.0)

    def post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliError(f"could not reach server: {exc}", 1) from exc
        if response.status_code == 422:
            raise CliError(f"invalid configuration: {_format_detail(response)}", 2)
        if response.status_code != 200:
            raise CliError(f"server error {response.status_code}: {response.text}", 1)
        return response.json()


def _format_detail(response) -> str:
    try:
        detail = response.json().get("detail")
    except ValueError:
        return response.text
    if isinstance(detail, str):
        return detail
    if isinstance(detail, list):
        parts = []
        for item in detail:
            loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
            parts.append(f"{loc}: {item.get('msg')}" if loc else str(item.get("msg")))
        return "; ".join(parts)
    return response.text


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key=value settings; '#' starts a comment, later keys win."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}", 2) from exc
    settings: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path} line {lineno}: expected key=value, got {raw.strip()!r}", 2)
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise CliError(f"{path} line {lineno}: empty key or value", 2)
        settings[key] = value
    return settings


def parse_assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise CliError(f"--set expects key=value, got {text!r}", 2)
    key, value = text.split("=", 1)
    key, value = key.strip(), value.strip()
    if not key or not value:
        raise CliError(f"--set expects key=value, got {text!r}", 2)
    return key, value


def parse_seed_list(text: str) -> list[int]:
    try:
        seeds = [int(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CliError(f"--seed expects N or N,N,..., got {text!r}", 2) from None
    if not seeds:
        raise CliError(f"--seed expects N or N,N,..., got {text!r}", 2)
    return seeds


def gather_settings(args) -> tuple[dict, list[int]]:
    """Merge config file, --set overrides and --seed into a settings payload."""
    settings: dict = {}
    if getattr(args, "config", None):
        settings.update(parse_config_file(args.config))
    for assignment in getattr(args, "set", None) or []:
        key, value = parse_assignment(assignment)
        settings[key] = value
    nodes_file = settings.pop("nodes_file", None)
    if nodes_file is not None:
        try:
            lines = Path(nodes_file).read_text().splitlines()
        except OSError as exc:
            raise CliError(f"cannot read node list {nodes_file}: {exc}", 2) from exc
        try:
            specs = parse_node_lines(lines)
        except ValueError as exc:
            raise CliError(f"{nodes_file}: {exc}", 2) from exc
        settings["nodes"] = [{"id": i, "x": x, "y": y} for i, x, y in specs]
        settings["node_count"] = len(specs)
    if getattr(args, "protocol", None):
        settings["protocol"] = args.protocol
    if getattr(args, "seed", None):
        seeds = parse_seed_list(args.seed)
    else:
        try:
            seeds = [int(settings.get("seed", 1))]
        except ValueError:
            raise CliError(f"seed must be an integer, got {settings.get('seed')!r}", 2) from None
    return settings, seeds


def _cell(value) -> object:
    return "" if value is None else value


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    """Write atomically; a failed write leaves no partial file behind."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            tmp.unlink()
        except OSError:
            pass
        raise CliError(f"cannot write {path}: {exc}", 1) from exc


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            tmp.unlink()
        except OSError:
            pass
        raise CliError(f"cannot write {path}: {exc}", 1) from exc


def round_rows(runs: list[dict]) -> list[list]:
    rows = []
    for run in runs:
        for r in run["rounds"]:
            rows.append([r[name] for name in ROUNDS_HEADER])
    return rows


def summary_rows(cells: list[dict]) -> list[list]:
    return [
        [
            c["protocol"],
            c["param_name"],
            c["param_value"],
            c["seed"],
            _cell(c["first_death"]),
            _cell(c["half_death"]),
            _cell(c["last_death"]),
        ]
        for c in cells
    ]


def median_csv_rows(cells: list[dict]) -> list[list]:
    return [
        [
            c["protocol"],
            c["param_name"],
            c["param_value"],
            c["n_seeds"],
            c["first_death_median"],
            c["half_death_median"],
            c["last_death_median"],
        ]
        for c in cells
    ]


def print_lifetimes(cells: list[dict]) -> None:
    for c in cells:
        print(
            f"{c['protocol']} seed {c['seed']}: first death {_cell(c['first_death']) or '-'}, "
            f"half {_cell(c['half_death']) or '-'}, last {_cell(c['last_death']) or '-'}"
        )


GNUPLOT_ROUNDS = """\
# Alive nodes and residual energy per round. Run from this directory:
#   gnuplot plots.gp
set datafile separator ','
set key outside right
set xlabel 'round'
set terminal pngcairo size 900,600

set ylabel 'alive nodes'
set output 'alive_vs_round.png'
plot {alive_plots}

set ylabel 'total residual energy (J)'
set output 'energy_vs_round.png'
plot {energy_plots}
"""

GNUPLOT_SWEEP = """\
# Median lifetime across the swept parameter. Run from this directory:
#   gnuplot plots.gp
set datafile separator ','
set key outside right
set xlabel '{param}'
set ylabel 'median last-death round'
set terminal pngcairo size 900,600
set output 'lifetime_vs_{param}.png'
plot {plots}
"""


def gnuplot_rounds_script(files: dict[str, str]) -> str:
    alive = ", \\\n     ".join(
        f"'{name}' every ::1 using 3:5 with lines title '{label}'" for label, name in files.items()
    )
    energy = ", \\\n     ".join(
        f"'{name}' every ::1 using 3:6 with lines title '{label}'" for label, name in files.items()
    )
    return GNUPLOT_ROUNDS.format(alive_plots=alive, energy_plots=energy)


def gnuplot_sweep_script(param: str, protocols: list[str]) -> str:
    plots = ", \\\n     ".join(
        f"'summary_medians.csv' every ::1 "
        f"using 3:(strcol(1) eq '{p}' ? column(7) : 1/0) with linespoints title '{p}'"
        for p in protocols
    )
    return GNUPLOT_SWEEP.format(param=param, plots=plots)


def cmd_run(args) -> int:
    settings, seeds = gather_settings(args)
    protocol = settings.get("protocol", "RFDMRP")
    client = ServiceClient(args.server)
    data = client.post(
        "/compare", {"settings": settings, "seeds": seeds, "protocols": [protocol]}
    )
    out = Path(args.out)
    write_csv(out / "rounds.csv", ROUNDS_HEADER, round_rows(data["runs"]))
    write_csv(out / "summary.csv", SUMMARY_HEADER, summary_rows(data["rows"]))
    if args.gnuplot_script:
        write_text(out / "plots.gp", gnuplot_rounds_script({protocol: "rounds.csv"}))
    print_lifetimes(data["rows"])
    print(f"wrote {out / 'rounds.csv'} and {out / 'summary.csv'}")
    return 0


def cmd_compare(args) -> int:
    settings, seeds = gather_settings(args)
    client = ServiceClient(args.server)
    data = client.post(
        "/compare", {"settings": settings, "seeds": seeds, "protocols": list(ALL_PROTOCOLS)}
    )
    out = Path(args.out)
    files: dict[str, str] = {}
    for protocol in ALL_PROTOCOLS:
        runs = [r for r in data["runs"] if r["protocol"] == protocol]
        name = f"rounds_{protocol.lower()}.csv"
        write_csv(out / name, ROUNDS_HEADER, round_rows(runs))
        files[protocol] = name
    write_csv(out / "rounds_all.csv", ROUNDS_HEADER, round_rows(data["runs"]))
    write_csv(out / "summary.csv", SUMMARY_HEADER, summary_rows(data["rows"]))
    write_csv(out / "summary_medians.csv", MEDIANS_HEADER, median_csv_rows(data["medians"]))
    if args.gnuplot_script:
        write_text(out / "plots.gp", gnuplot_rounds_script(files))
    print_lifetimes(data["rows"])
    print(f"wrote per-protocol and merged round CSVs plus summaries under {out}")
    return 0


def _parse_number_list(text: str, kind, flag: str) -> list:
    try:
        values = [kind(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CliError(f"{flag} expects a comma-separated list, got {text!r}", 2) from None
    if not values:
        raise CliError(f"{flag} expects a comma-separated list, got {text!r}", 2)
    return values


def cmd_sweep_density(args) -> int:
    settings, seeds = gather_settings(args)
    counts = _parse_number_list(args.counts, int, "--counts")
    client = ServiceClient(args.server)
    data = client.post(
        "/sweep/density",
        {"settings": settings, "node_counts": counts, "seeds": seeds, "protocols": list(ALL_PROTOCOLS)},
    )
    out = Path(args.out)
    write_csv(out / "summary.csv", SUMMARY_HEADER, summary_rows(data["rows"]))
    write_csv(out / "summary_medians.csv", MEDIANS_HEADER, median_csv_rows(data["medians"]))
    if args.gnuplot_script:
        write_text(out / "plots.gp", gnuplot_sweep_script("node_count", list(ALL_PROTOCOLS)))
    print(f"wrote lifetime summaries for node counts {counts} under {out}")
    return 0


def cmd_sweep_gamma(args) -> int:
    settings, seeds = gather_settings(args)
    gammas = _parse_number_list(args.gammas, float, "--gammas")
    protocol = settings.get("protocol", "RFDMRP")
    client = ServiceClient(args.server)
    data = client.post(
        "/sweep/gamma",
        {"settings": settings, "gammas": gammas, "seeds": seeds, "protocols": [protocol]},
    )
    out = Path(args.out)
    write_csv(out / "summary.csv", SUMMARY_HEADER, summary_rows(data["rows"]))
    write_csv(out / "summary_medians.csv", MEDIANS_HEADER, median_csv_rows(data["medians"]))
    if args.gnuplot_script:
        write_text(out / "plots.gp", gnuplot_sweep_script("gamma", [protocol]))
    print(f"wrote lifetime summaries for gamma {gammas} under {out}")
    return 0


def parse_graph_file(path: str) -> dict:
    """Parse a demo graph spec into an /rfd/paths request payload.

    Lines: ``vertex ID X Y``, ``edge A B``, ``source ID``, ``dest ID``;
    '#' comments and blank lines are skipped.
    """
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read graph file {path}: {exc}", 2) from exc
    vertices: list[dict] = []
    edges: list[list[int]] = []
    sources: list[int] = []
    destination: int | None = None
    seen: set[int] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].lower()
        try:
            if kind == "vertex" and len(parts) == 4:
                vid = int(parts[1])
                if vid in seen:
                    raise CliError(f"{path} line {lineno}: duplicate vertex {vid}", 2)
                seen.add(vid)
                vertices.append({"id": vid, "x": float(parts[2]), "y": float(parts[3])})
            elif kind == "edge" and len(parts) == 3:
                edges.append([int(parts[1]), int(parts[2])])
            elif kind == "source" and len(parts) == 2:
                sources.append(int(parts[1]))
            elif kind == "dest" and len(parts) == 2:
                if destination is not None:
                    raise CliError(f"{path} line {lineno}: multiple dest lines", 2)
                destination = int(parts[1])
            else:
                raise CliError(
                    f"{path} line {lineno}: expected 'vertex ID X Y', 'edge A B', "
                    f"'source ID' or 'dest ID', got {raw.strip()!r}",
                    2,
                )
        except ValueError:
            raise CliError(f"{path} line {lineno}: malformed numbers in {raw.strip()!r}", 2) from None
    if destination is None:
        raise CliError(f"{path}: missing dest line", 2)
    if not sources:
        raise CliError(f"{path}: no source lines", 2)
    if not vertices:
        raise CliError(f"{path}: no vertex lines", 2)
    return {"vertices": vertices, "edges": edges, "sources": sources, "destination": destination}


def cmd_rfd_demo(args) -> int:
    payload = parse_graph_file(args.graph)
    payload.update(
        erosion_rate=args.erosion_rate,
        sediment_fraction=args.sediment_fraction,
        max_iterations=args.max_iterations,
        convergence_window=args.convergence_window,
        seed=args.seed_value,
    )
    client = ServiceClient(args.server)
    data = client.post("/rfd/paths", payload)
    print(f"iterations: {data['iterations']}, converged: {data['converged']}")
    unreachable = 0
    for report in data["reports"]:
        source = report["source"]
        if not report["reached"]:
            unreachable += 1
            print(f"source {source}: no path found")
            continue
        path = " -> ".join(str(v) for v in report["path"])
        line = f"source {source}: path {path}, cost {report['cost']:.3f}"
        if report["shortest_cost"] is not None:
            line += f", shortest {report['shortest_cost']:.3f}"
            if report["ratio"] is not None:
                line += f", ratio {report['ratio']:.3f}"
        print(line)
    return 3 if unreachable else 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("rfdmrp.service.app:app", host=args.host, port=args.port)
    return 0


def _add_common(parser: argparse.ArgumentParser, protocol_flag: bool = False) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one setting (repeatable)")
    parser.add_argument("--seed", help="seed or comma-separated seed list")
    parser.add_argument("--out", default="results", help="output directory (default: results)")
    parser.add_argument("--gnuplot-script", action="store_true", help="also write plots.gp")
    parser.add_argument("--server", help="base URL of a running service (default: run in-process)")
    if protocol_flag:
        parser.add_argument("--protocol", choices=ALL_PROTOCOLS, help="protocol to simulate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfdmrp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one protocol, write per-round CSV")
    _add_common(p_run, protocol_flag=True)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run all three protocols on shared seeds")
    _add_common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_den = sub.add_parser("sweep-density", help="lifetime summaries across node counts")
    _add_common(p_den)
    p_den.add_argument("--counts", default="25,50,100,150,200", help="comma-separated node counts")
    p_den.set_defaults(func=cmd_sweep_density)

    p_gam = sub.add_parser("sweep-gamma", help="lifetime summaries across aggregation gamma")
    _add_common(p_gam, protocol_flag=True)
    p_gam.add_argument("--gammas", default="0,0.25,0.5,0.75,1", help="comma-separated gamma values")
    p_gam.set_defaults(func=cmd_sweep_gamma)

    p_rfd = sub.add_parser("rfd-demo", help="river-formation path search on a graph file")
    p_rfd.add_argument("graph", help="graph spec file (vertex/edge/source/dest lines)")
    p_rfd.add_argument("--seed", dest="seed_value", type=int, default=1)
    p_rfd.add_argument("--erosion-rate", type=float, default=0.1)
    p_rfd.add_argument("--sediment-fraction", type=float, default=1.0)
    p_rfd.add_argument("--max-iterations", type=int, default=1000)
    p_rfd.add_argument("--convergence-window", type=int, default=10)
    p_rfd.add_argument("--server", help="base URL of a running service (default: run in-process)")
    p_rfd.set_defaults(func=cmd_rfd_demo)

    p_srv = sub.add_parser("serve", help="start the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
