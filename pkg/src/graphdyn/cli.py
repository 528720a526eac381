"""Command line entry point: ``graphdyn {sample,run,study,check,kernel-dist}``.

Exit codes: 0 success, 1 configuration error, 2 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .analysis import kernel_l4_distance
from .config import load_config
from .dynamics import AVERAGED, GALERKIN, MODELS, SAMPLED
from .errors import ConfigError, GraphdynError
from .graphon import check_assumptions
from .operators import galerkin_matrix
from .sampler import sample_graph
from .studies import averaged_operator, galerkin_kernel, run_model, run_study

log = logging.getLogger("graphdyn")

# flag -> dotted config key
OVERRIDES = {
    "n": "n", "seed": "seed", "seeds": "seeds", "master_seed": "master_seed",
    "M": "M", "n_list": "n_list", "study": "study", "workers": "workers",
    "T": "model.T", "dt": "model.dt", "output_stride": "model.output_stride",
    "coupling": "model.coupling", "scaling": "model.scaling", "variant": "model.variant",
}


def _int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="JSON study configuration")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", type=int)
    p.add_argument("--master-seed", dest="master_seed", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--n-list", dest="n_list", type=_int_list)
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--output-stride", dest="output_stride", type=int)
    p.add_argument("--coupling")
    p.add_argument("--scaling")
    p.add_argument("--variant")
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphdyn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample one graph and write it to a file")
    _common(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="integrate one model and write its trajectory")
    _common(p)
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--out", required=True)

    p = sub.add_parser("study", help="run the configured convergence study")
    _common(p)
    p.add_argument("--study")
    p.add_argument("--out", required=True)

    p = sub.add_parser("check", help="print the graphon assumption report")
    _common(p)

    p = sub.add_parser("kernel-dist", help="print ||U_n - V_n||_L4 over n_list")
    _common(p)
    return parser


def _load(args):
    overrides = {}
    for flag, key in OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    return load_config(args.config, overrides)


def cmd_sample(cfg, args):
    n = cfg.single_n
    graph = sample_graph(cfg.spec, cfg.schedule, n, cfg.seed, cfg.model.variant)
    io.save_graph(graph, args.out)
    print(f"wrote {args.out}: n={n} edges={graph.num_edges}")


def cmd_run(cfg, args):
    n = cfg.single_n
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.model == SAMPLED:
        graph = sample_graph(cfg.spec, cfg.schedule, n, cfg.seed, cfg.model.variant)
        io.save_graph(graph, out / "graph.txt")
        traj = run_model(cfg, SAMPLED, graph)
    elif args.model == AVERAGED:
        traj = run_model(cfg, AVERAGED, averaged_operator(cfg, n))
    else:
        op = galerkin_matrix(cfg.spec, n, galerkin_kernel(cfg))
        traj = run_model(cfg, GALERKIN, op, averaged_operator(cfg, n).meta["node_weights"])
    files = io.write_trajectory_csv(traj, out / f"trajectory_{args.model}.csv")
    for f in files:
        print(f"wrote {f}")


def cmd_study(cfg, args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = run_study(cfg)
    path = out / f"{cfg.study}.json"
    io.write_report(report, path)
    print(f"wrote {path}")


def cmd_check(cfg, args):
    ns = [cfg.n] if cfg.n is not None else cfg.n_list
    reports = [check_assumptions(cfg.spec, cfg.schedule, n).as_dict() for n in ns]
    print(json.dumps(reports, indent=2))


def cmd_kernel_dist(cfg, args):
    rows = [{"n": n, "distance": kernel_l4_distance(cfg.spec, cfg.schedule, n)}
            for n in cfg.n_list]
    print(json.dumps(rows, indent=2))


COMMANDS = {"sample": cmd_sample, "run": cmd_run, "study": cmd_study,
            "check": cmd_check, "kernel-dist": cmd_kernel_dist}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except GraphdynError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
