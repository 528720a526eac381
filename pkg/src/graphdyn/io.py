"""Persistence: graph text files, trajectory CSVs and JSON reports."""
from __future__ import annotations

import json
import re
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import FormatError
from .sampler import VARIANTS, SampledGraph, graph_from_edges

GRAPH_MAGIC = "graphdyn-graph v1"
_PARAMS = re.compile(r"n=(\d+) rho=(\S+) seed=(\d+) variant=(\S+)")

# above this size only observables and a 16-node sample are written
FULL_STATE_LIMIT = 1024
SAMPLE_NODES = 16


def format_graph(graph: SampledGraph) -> str:
    lines = [GRAPH_MAGIC,
             f"n={graph.n} rho={graph.rho:.17g} seed={graph.seed} variant={graph.variant}"]
    lines.extend(f"{i + 1} {j + 1}" for i, j in graph.edge_list())
    return "\n".join(lines) + "\n"


def save_graph(graph: SampledGraph, path) -> None:
    Path(path).write_bytes(format_graph(graph).encode("ascii"))


def parse_graph(text: str, expected_degrees=None, node_weights=None) -> SampledGraph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != GRAPH_MAGIC:
        raise FormatError(f"expected header {GRAPH_MAGIC!r}", line=1)
    if len(lines) < 2:
        raise FormatError("missing parameter line", line=2)
    m = _PARAMS.fullmatch(lines[1])
    if m is None:
        raise FormatError("malformed parameter line", line=2)
    n = int(m.group(1))
    try:
        rho = float(m.group(2))
    except ValueError:
        raise FormatError("rho is not a number", line=2) from None
    seed = int(m.group(3))
    variant = m.group(4)
    if n < 1 or not 0 < rho <= 1 or variant not in VARIANTS or seed >= 1 << 64:
        raise FormatError("parameter out of range", line=2)

    edges = np.empty((len(lines) - 2, 2), dtype=np.int64)
    prev = (0, 0)
    for k, line in enumerate(lines[2:]):
        lineno = k + 3
        parts = line.split(" ")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise FormatError(f"expected 'i j', got {line!r}", line=lineno)
        i, j = int(parts[0]), int(parts[1])
        if not 1 <= i <= n or not 1 <= j <= n:
            raise FormatError(f"node index out of range 1..{n}", line=lineno)
        if i > j:
            raise FormatError("edge must be written with i <= j", line=lineno)
        if (i, j) <= prev:
            raise FormatError("edges must be sorted and unique", line=lineno)
        prev = (i, j)
        edges[k] = (i - 1, j - 1)
    graph = graph_from_edges(n, edges, rho, seed, variant, expected_degrees, node_weights)
    csr = graph.to_csr()
    if (csr != csr.T).nnz:
        raise FormatError("adjacency is not symmetric")
    return graph


def load_graph(path, expected_degrees=None, node_weights=None) -> SampledGraph:
    """Read a graph file; pass the degree data to make it integrable."""
    try:
        text = Path(path).read_bytes().decode("ascii")
    except UnicodeDecodeError:
        raise FormatError("graph file is not ASCII") from None
    return parse_graph(text, expected_degrees, node_weights)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_trajectory_csv(traj, path) -> list:
    """Write a trajectory; returns the list of files written.

    Small states (n <= 1024) go to one CSV ``t,u_1,...,u_n``.  Larger ones are
    written as an observables CSV ``t,mean,l2,linf,gn_norm`` plus a second CSV
    holding 16 uniformly spaced nodes.
    """
    path = Path(path)
    n = traj.n
    if n <= FULL_STATE_LIMIT:
        header = ["t"] + [f"u_{i}" for i in range(1, n + 1)]
        rows = [[_fmt(t)] + [_fmt(v) for v in s] for t, s in zip(traj.times, traj.states)]
        _write_rows(path, header, rows)
        return [path]
    gn = traj.weighted_norms
    obs = []
    for t, s, g in zip(traj.times, traj.states, gn):
        obs.append([_fmt(t), _fmt(s.mean()), _fmt(np.sqrt(np.mean(s * s))),
                    _fmt(np.max(np.abs(s))), _fmt(g)])
    _write_rows(path, ["t", "mean", "l2", "linf", "gn_norm"], obs)
    idx = np.linspace(0, n - 1, SAMPLE_NODES).round().astype(int)
    sample_path = path.with_name(path.stem + "_nodes" + path.suffix)
    header = ["t"] + [f"u_{i + 1}" for i in idx]
    rows = [[_fmt(t)] + [_fmt(v) for v in s[idx]] for t, s in zip(traj.times, traj.states)]
    _write_rows(sample_path, header, rows)
    return [path, sample_path]


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(r) + "\n")


def report_payload(report) -> dict:
    return report.as_dict() if hasattr(report, "as_dict") else dict(report)


def dump_report(report, timestamp: bool = False) -> str:
    """Deterministic JSON text; the optional timestamp is the only varying field."""
    payload = report_payload(report)
    if timestamp:
        payload = {**payload, "created": datetime.now(timezone.utc).isoformat()}
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def write_report(report, path, timestamp: bool = True) -> None:
    Path(path).write_text(dump_report(report, timestamp))
