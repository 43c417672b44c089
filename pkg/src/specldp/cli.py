"""Command-line front end.

One binary, subcommand style.  Every run resolves its configuration from
(in increasing precedence) built-in defaults, an optional key=value config
file, and explicit flags, then echoes the fully resolved config into the
output.  Randomized subcommands are fully determined by --seed (falling
back to the SPECLDP_SEED environment variable).

Exit codes: 0 success, 2 usage or domain error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments, planting, serialize, variational
from .distributions import WeibullSpec
from .graphs import sample_er, attach_weights
from .streams import derive_stream

_DEFAULTS: dict[str, dict] = {
    "phi": {"theta": None, "k": None, "tol": 1e-10},
    "rate": {"alpha": None, "delta": None, "k_max": 64},
    "typical": {"alpha": None, "n": None},
    "plant": {"kind": "star", "alpha": None, "delta": 0.5, "n": 10000, "k": 2, "p": 1.5,
              "seed": 0},
    "sample": {"n": 1000, "d": 2.0, "alpha": None, "seed": 0},
    "verify": {"suite": None, "infile": None, "trials": 200, "seed": 0, "threads": 0},
    "lln": {"kind": "light", "alpha": None, "d": 2.0, "delta": None, "n": "100000",
            "trials": 20, "seed": 0, "threads": 0, "tol": 1e-8},
    "decomp": {"n": "100000", "epsilon": 0.5, "d_prime": 2.0, "trials": 20, "seed": 0,
               "threads": 0, "threshold": None},
    "report": {"alphas": "0.5,0.8,1.0,1.2,1.5,1.8,4.0",
               "deltas": "0.1,0.5,1.0,10.0,100.0,1000.0", "k_max": 64},
}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="specldp", description=__doc__)
    sub = top.add_subparsers(dest="subcommand", required=True)

    def add(name, *specs):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="key=value config file")
        p.add_argument("--out", type=str, default=None, help="output path (default stdout)")
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
        for flag, typ, help_ in specs:
            p.add_argument(flag, type=typ, default=None, help=help_)
        return p

    add("phi", ("--theta", float, "Lagrangian exponent > 1"), ("--k", int, "clique size"),
        ("--tol", float, "solver tolerance"))
    add("rate", ("--alpha", float, "Weibull shape"), ("--delta", float, "deviation"),
        ("--k-max", int, "clique search range"))
    add("typical", ("--alpha", float, "Weibull shape"), ("--n", int, "matrix size"))
    add("plant", ("--kind", str, "star | clique | block"), ("--alpha", float, ""),
        ("--delta", float, ""), ("--n", int, ""), ("--k", int, ""),
        ("--p", float, "quasinorm exponent (block)"), ("--seed", int, ""))
    add("sample", ("--n", int, ""), ("--d", float, "mean degree"),
        ("--alpha", float, "attach Weibull weights"), ("--seed", int, ""))
    add("verify", ("--suite", str, "lp-bound"), ("--in", str, "graph file to round-trip"),
        ("--trials", int, ""), ("--seed", int, ""), ("--threads", int, ""))
    add("lln", ("--kind", str, "light | heavy | degree"), ("--alpha", float, ""),
        ("--d", float, ""), ("--delta", float, ""), ("--n", str, "comma list of sizes"),
        ("--trials", int, ""), ("--seed", int, ""), ("--threads", int, ""),
        ("--tol", float, ""))
    add("decomp", ("--n", str, "comma list of sizes"), ("--epsilon", float, ""),
        ("--d-prime", float, ""), ("--trials", int, ""), ("--seed", int, ""),
        ("--threads", int, ""), ("--threshold", int, "remainder degree cap"))
    add("report", ("--alphas", str, "comma list"), ("--deltas", str, "comma list"),
        ("--k-max", int, ""))
    return top


def _read_config_file(path: str) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line {line!r}; expected key=value")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _resolve(sub: str, args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags; returns the full config."""
    cfg = dict(_DEFAULTS[sub])
    if getattr(args, "config", None):
        file_vals = _read_config_file(args.config)
        for key, raw in file_vals.items():
            if key == "in":
                key = "infile"
            if key not in cfg and key not in ("seed", "format"):
                raise ValueError(f"unknown config key {key!r} for subcommand {sub}")
            cfg[key] = raw
    for key in cfg:
        flag_val = getattr(args, "infile" if key == "infile" else key, None)
        if flag_val is None and key == "infile":
            flag_val = getattr(args, "in", None)
        if flag_val is not None:
            cfg[key] = flag_val
    if "seed" in cfg and (cfg["seed"] is None or cfg["seed"] == _DEFAULTS[sub].get("seed")):
        env = os.environ.get("SPECLDP_SEED")
        explicit = getattr(args, "seed", None)
        if env is not None and explicit is None:
            cfg["seed"] = env
    # normalize scalar types coming from config files
    for key, val in list(cfg.items()):
        if isinstance(val, str) and key in ("theta", "alpha", "delta", "d", "tol", "epsilon",
                                            "d_prime", "p"):
            cfg[key] = float(val)
        elif isinstance(val, str) and key in ("k", "k_max", "trials", "seed", "threads",
                                              "threshold") and val.lstrip("-").isdigit():
            cfg[key] = int(val)
    return cfg


def _emit(payload: str, out: str | None) -> None:
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


def _envelope(sub: str, config: dict, data: dict) -> str:
    # threads is an execution detail: output is contractually independent of
    # the worker count, so it never enters the echoed config.
    doc = {"schema_version": 1, "subcommand": sub,
           "config": {k: v for k, v in sorted(config.items()) if k != "threads"},
           "data": data}
    return json.dumps(doc, sort_keys=True) + "\n"


def _n_list(raw) -> tuple[int, ...]:
    if isinstance(raw, (int, float)):
        return (int(raw),)
    return tuple(int(x) for x in str(raw).split(",") if x)


def _float_list(raw) -> tuple[float, ...]:
    return tuple(float(x) for x in str(raw).split(",") if x)


def _require(cfg: dict, sub: str, *keys: str) -> None:
    for key in keys:
        if cfg.get(key) is None:
            raise ValueError(f"{sub} requires --{key.replace('_', '-')}")


def _threads(cfg: dict) -> int:
    # 0 means auto: use the available parallelism (output never depends on it)
    t = int(cfg.get("threads", 0))
    return t if t > 0 else (os.cpu_count() or 1)


def _cmd_phi(cfg, out):
    _require(cfg, "phi", "theta", "k")
    sol = variational.clique_lagrangian(float(cfg["theta"]), int(cfg["k"]), tol=float(cfg["tol"]))
    data = {"theta": sol.theta, "k": sol.k, "value": sol.value,
            "k1": sol.k1, "k2": sol.k2, "x": sol.x, "y": sol.y}
    _emit(_envelope("phi", cfg, data), out)
    return 0


def _cmd_rate(cfg, out):
    _require(cfg, "rate", "alpha", "delta")
    alpha, delta = float(cfg["alpha"]), float(cfg["delta"])
    if 0 < alpha < 2:
        rate, argmin = variational.heavy_upper_rate(alpha, delta, k_max=int(cfg["k_max"]))
        lower = variational.heavy_lower_rate(alpha, delta) if 0 < delta < 1 else None
        data = {"family": "heavy", "rate": rate, "argmin_k": argmin, "lower_rate": lower}
    elif alpha == 2.0:
        rate, argmin = variational.gaussian_upper_rate(delta, k_max=max(200, int(cfg["k_max"])))
        data = {"family": "gaussian", "rate": rate, "argmin_k": argmin}
    else:
        lower = variational.light_lower_rate(delta) if 0 < delta < 1 else None
        data = {"family": "light", "rate": variational.light_upper_rate(delta), "lower_rate": lower}
    _emit(_envelope("rate", cfg, data), out)
    return 0


def _cmd_typical(cfg, out):
    _require(cfg, "typical", "alpha", "n")
    alpha, n = float(cfg["alpha"]), int(cfg["n"])
    if alpha > 2:
        data = {"family": "light", "value": variational.typical_light(alpha, n),
                "prefactor": variational.light_prefactor(alpha)}
    else:
        data = {"family": "heavy", "value": variational.typical_heavy(alpha, n),
                "prefactor": None}
    _emit(_envelope("typical", cfg, data), out)
    return 0


def _cmd_plant(cfg, out):
    kind = str(cfg["kind"])
    if kind == "star":
        _require(cfg, "plant", "alpha", "n")
        s = planting.plant_star(float(cfg["alpha"]), float(cfg["delta"]), int(cfg["n"]))
    elif kind == "clique":
        _require(cfg, "plant", "alpha", "n")
        s = planting.plant_clique(float(cfg["alpha"]), float(cfg["delta"]), int(cfg["n"]),
                                  int(cfg["k"]))
    elif kind == "block":
        s = planting.equality_network(float(cfg["p"]), int(cfg["k"]))
    else:
        raise ValueError(f"unknown plant kind {kind!r}; expected star | clique | block")
    data = {"kind": s.kind, "target_lambda1": s.target_lambda1, "size": s.size,
            "params": {k: (v if not isinstance(v, (np.floating, np.integer)) else float(v))
                       for k, v in s.params.items()},
            "path": out}
    if out:
        planting.write_structure(out, s)
        sys.stdout.write(_envelope("plant", cfg, data))
    else:
        data["edges"] = [[int(i), int(j)] for i, j in s.edges]
        data["weights"] = [float(w) for w in s.weights]
        sys.stdout.write(_envelope("plant", cfg, data))
    return 0


def _cmd_sample(cfg, out):
    n, d, seed = int(cfg["n"]), float(cfg["d"]), int(cfg["seed"])
    rng = derive_stream(seed, 0)
    g = sample_er(n, d, rng)
    if cfg.get("alpha") is not None:
        g = attach_weights(g, WeibullSpec(alpha=float(cfg["alpha"])), rng)
        n_edges, weighted = g.graph.m, True
    else:
        n_edges, weighted = g.m, False
    payload = serialize.dumps_graph(g)
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)
    data = {"n": n, "edges": n_edges, "weighted": weighted, "path": out}
    sys.stderr.write(_envelope("sample", cfg, data))
    return 0


def _cmd_verify(cfg, out):
    if cfg.get("infile"):
        path = Path(str(cfg["infile"]))
        original = path.read_text()
        g = serialize.loads_graph(original)
        ok = serialize.dumps_graph(g) == original
        data = {"ok": bool(ok), "violations": 0 if ok else 1,
                "detail": {"mode": "round-trip", "path": str(path)}}
        _emit(_envelope("verify", cfg, data), out)
        return 0 if ok else 3
    suite = cfg.get("suite")
    if suite != "lp-bound":
        raise ValueError(f"unknown verify suite {suite!r}; expected 'lp-bound' or --in FILE")
    rep = experiments.run_bound_stress(
        experiments.ExperimentConfig(kind="bound-stress", seed=int(cfg["seed"]),
                                     trials=int(cfg["trials"])),
        threads=_threads(cfg),
    )
    n_viol = int(rep.aggregates["violations"])
    data = {"ok": n_viol == 0, "violations": n_viol, "detail": rep.to_dict()["aggregates"]}
    _emit(_envelope("verify", cfg, data), out)
    return 0 if n_viol == 0 else 3


def _cmd_lln(cfg, out, fmt):
    _require(cfg, "lln", "alpha")
    kind_map = {"light": "lln-light", "heavy": "lln-heavy", "degree": "degree-lln"}
    kind = kind_map.get(str(cfg["kind"]))
    if kind is None:
        raise ValueError(f"unknown lln kind {cfg['kind']!r}; expected light | heavy | degree")
    cfg_obj = experiments.ExperimentConfig(
        kind=kind, seed=int(cfg["seed"]), trials=int(cfg["trials"]),
        n_list=_n_list(cfg["n"]), alpha=float(cfg["alpha"]), d=float(cfg["d"]),
        delta=(float(cfg["delta"]) if cfg.get("delta") is not None else None),
        tol=float(cfg["tol"]),
    )
    rep = experiments.run(cfg_obj, threads=_threads(cfg))
    payload = rep.to_csv() if fmt == "csv" else _envelope("lln", cfg, rep.to_dict())
    if fmt == "csv":
        payload = "# config: " + json.dumps(cfg_obj.resolved(), sort_keys=True) + "\n" + payload
    _emit(payload, out)
    return 0


def _cmd_decomp(cfg, out, fmt):
    extras = {"epsilon": float(cfg["epsilon"]), "d_prime": float(cfg["d_prime"])}
    if cfg.get("threshold") is not None:
        extras["threshold"] = int(cfg["threshold"])
    cfg_obj = experiments.ExperimentConfig(
        kind="decomposition-stress", seed=int(cfg["seed"]), trials=int(cfg["trials"]),
        n_list=_n_list(cfg["n"]), extras=extras,
    )
    rep = experiments.run(cfg_obj, threads=_threads(cfg))
    payload = rep.to_csv() if fmt == "csv" else _envelope("decomp", cfg, rep.to_dict())
    if fmt == "csv":
        payload = "# config: " + json.dumps(cfg_obj.resolved(), sort_keys=True) + "\n" + payload
    _emit(payload, out)
    return 0


def _cmd_report(cfg, out, fmt):
    cfg_obj = experiments.ExperimentConfig(
        kind="rate-tabulate", seed=0,
        extras={"alphas": _float_list(cfg["alphas"]), "deltas": _float_list(cfg["deltas"]),
                "k_max": int(cfg["k_max"])},
    )
    rep = experiments.run(cfg_obj)
    if fmt == "csv":
        cols = ("alpha", "delta", "heavy_upper_rate", "heavy_argmin_k", "heavy_lower_rate",
                "light_upper_rate", "light_lower_rate", "gaussian_rate", "gaussian_argmin_k")
        lines = ["# config: " + json.dumps(cfg_obj.resolved(), sort_keys=True), ",".join(cols)]
        for row in rep.aggregates["rows"]:
            lines.append(",".join(
                f"{row[c]:.17g}" if isinstance(row.get(c), float)
                else str(row.get(c, "")) for c in cols))
        payload = "\n".join(lines) + "\n"
    else:
        payload = _envelope("report", cfg, rep.to_dict())
    _emit(payload, out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    sub = args.subcommand
    try:
        cfg = _resolve(sub, args)
        fmt = getattr(args, "fmt", None) or "json"
        if fmt == "csv" and sub not in ("lln", "decomp", "report"):
            raise ValueError(f"--format csv is not defined for {sub}")
        out = getattr(args, "out", None)
        if sub == "phi":
            return _cmd_phi(cfg, out)
        if sub == "rate":
            return _cmd_rate(cfg, out)
        if sub == "typical":
            return _cmd_typical(cfg, out)
        if sub == "plant":
            return _cmd_plant(cfg, out)
        if sub == "sample":
            return _cmd_sample(cfg, out)
        if sub == "verify":
            return _cmd_verify(cfg, out)
        if sub == "lln":
            return _cmd_lln(cfg, out, fmt)
        if sub == "decomp":
            return _cmd_decomp(cfg, out, fmt)
        if sub == "report":
            return _cmd_report(cfg, out, fmt)
        raise ValueError(f"unhandled subcommand {sub}")
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"specldp {sub}: error: {exc}\n")
        return 2


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
