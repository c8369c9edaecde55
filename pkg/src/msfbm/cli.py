"""Command-line front end: kernels, simulation, verification, dimensions, classification.

Exit codes: 0 success, 1 verification failure, 2 input validation,
3 numerical failure.  All output is byte-deterministic for a given
configuration; MSFBM_THREADS caps replica-level parallelism without
affecting any output byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import analysis, kernels, verify
from .classify import increment_sign_predict, markov_verdict, semimartingale_classify
from .process import IncrementWindow, ProcessSpec
from .sampler import (
    DENSE_LIMIT,
    FactorizationFailure,
    TimeGrid,
    sample_ensemble,
)
from .seeds import derive_seed

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _fmt(value: float) -> str:
    return repr(float(value))


def _csv(rows: list[list], header: list[str], meta: Optional[dict] = None) -> str:
    lines = []
    if meta:
        for key in sorted(meta):
            lines.append(f"# {key}: {meta[key]}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_text(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(tok) for tok in str(text).split(",") if tok != ""]
    except ValueError as exc:
        raise ValueError(f"could not parse float list {text!r}") from exc


class _Config:
    """Per-field fallback chain: command-line flag, config file, default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = {}
        if getattr(args, "config", None):
            with open(args.config) as fh:
                self.file = json.load(fh)
            if not isinstance(self.file, dict):
                raise ValueError("config file must hold one JSON object")

    def get(self, name: str, default=None, cast=None):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.file.get(name, default)
        if value is not None and cast is not None:
            value = cast(value)
        return value

    def spec(self) -> ProcessSpec:
        coeffs = self.get("coeffs")
        hurst = self.get("hurst")
        if hurst is None:
            raise ValueError("a process needs --hurst (and optionally --coeffs; flags or config file)")
        hs = _floats(hurst)
        weights = [1.0] * len(hs) if coeffs is None else _floats(coeffs)
        return ProcessSpec(weights, hs)


def _spec_dict(spec: ProcessSpec) -> dict:
    return {"coeffs": list(spec.coeffs), "hurst": list(spec.hurst)}


def _n_threads() -> int:
    raw = os.environ.get("MSFBM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"MSFBM_THREADS must be an integer, got {raw!r}")


def _cmd_cov(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    spec = cfg.spec()
    window = cfg.get("window")
    points = cfg.get("points")
    out = cfg.get("out")
    if window:
        w = IncrementWindow(*_floats(window))
        value = kernels.increment_cov(spec, w)
        rows = [[w.u, w.v, w.s, w.t, value]]
        header = ["u", "v", "s", "t", "cov"]
        payload = [{"u": w.u, "v": w.v, "s": w.s, "t": w.t, "cov": value}]
    else:
        if not points:
            raise ValueError("cov needs --points or --window")
        pts = _floats(points)
        rows = []
        payload = []
        for i, s in enumerate(pts):
            for t in pts[i:]:
                value = kernels.msfbm_cov(spec, s, t)
                rows.append([s, t, value])
                payload.append({"s": s, "t": t, "cov": value})
        header = ["s", "t", "cov"]
    if cfg.get("format", "csv") == "json":
        _emit(_json_text({
            "format": "msfbm.cov",
            "schema_version": 1,
            "spec": _spec_dict(spec),
            "rows": payload,
        }), out)
    else:
        _emit(_csv(rows, header), out)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    spec = cfg.spec()
    times = cfg.get("times")
    if times:
        grid = TimeGrid(_floats(times))
    else:
        grid = TimeGrid.uniform(cfg.get("grid_points", 17, int),
                                cfg.get("horizon", 1.0, float))
    sampler = cfg.get("sampler", "auto")
    if sampler == "auto":
        sampler = "exact" if grid.n_points <= DENSE_LIMIT else "fgn"
    seed = cfg.get("seed", 0, int)
    reps = cfg.get("reps", 1, int)
    out = cfg.get("out")
    ens = sample_ensemble(spec, grid, reps, seed, sampler=sampler,
                          n_threads=_n_threads())
    meta = {
        "coeffs": ",".join(_fmt(a) for a in spec.coeffs),
        "hurst": ",".join(_fmt(h) for h in spec.hurst),
        "grid_points": grid.n_points,
        "horizon": _fmt(grid.horizon),
        "master_seed": ens.master_seed,
        "n_reps": ens.n_reps,
        "sampler": ens.sampler,
        "jitter": _fmt(ens.jitter),
    }
    if cfg.get("format", "csv") == "json":
        _emit(_json_text({
            "format": "msfbm.ensemble",
            "schema_version": 1,
            "spec": _spec_dict(spec),
            "grid": {"times": list(grid.times)},
            "master_seed": ens.master_seed,
            "n_reps": ens.n_reps,
            "sampler": ens.sampler,
            "jitter": ens.jitter,
            "paths": [list(p.values) for p in ens.paths],
        }), out)
    else:
        rows = []
        for r, path in enumerate(ens.paths):
            for t, v in zip(grid.times, path.values):
                rows.append([r, float(t), float(v)])
        _emit(_csv(rows, ["replica", "t", "value"], meta), out)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    spec = cfg.spec() if cfg.get("hurst") is not None else None
    suite = cfg.get("suite", "all")
    names = verify.SUITE_NAMES if suite == "all" else (suite,)
    report = verify.run_suites(
        names, spec=spec, seed=cfg.get("seed", 0, int),
        n_reps=cfg.get("reps", 3000, int), n_threads=_n_threads(),
    )
    _emit(_json_text(report), cfg.get("out"))
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY_FAILED


def _cmd_dims(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    spec = cfg.spec()
    grid = TimeGrid.uniform(cfg.get("grid_points", 2 ** 16 + 1, int),
                            cfg.get("horizon", 1.0, float))
    seed = cfg.get("seed", 0, int)
    level = cfg.get("level", 0.0, float)
    eps = cfg.get("eps", 0.01, float)
    level_reps = cfg.get("level_reps", 20, int)
    sampler = "fgn" if grid.n_points > DENSE_LIMIT else "auto"
    h_min = spec.h_min

    graph_path = sample_ensemble(spec, grid, 1, derive_seed(seed, 1),
                                 sampler=sampler).paths[0]
    graph = analysis.graph_box_dimension(graph_path)
    range_est = analysis.range_dimension(graph_path)

    level_values = []
    level_ens = sample_ensemble(spec, grid, level_reps, derive_seed(seed, 2),
                                sampler=sampler, n_threads=_n_threads())
    for path in level_ens.paths:
        try:
            level_values.append(
                analysis.level_set_box_dimension(path, level, eps).value
            )
        except analysis.LevelNotCrossed:
            continue
    if not level_values:
        raise analysis.LevelNotCrossed(
            f"no replica crossed level {level} on [{eps}, {grid.horizon}]"
        )
    report = {
        "format": "msfbm.dims",
        "schema_version": 1,
        "spec": _spec_dict(spec),
        "grid_points": grid.n_points,
        "horizon": grid.horizon,
        "master_seed": seed,
        "graph": {**graph.to_dict(), "target": 2.0 - h_min},
        "range": {**range_est.to_dict(), "target": 1.0},
        "level_set": {
            "level": level,
            "eps": eps,
            "values": level_values,
            "median": float(np.median(level_values)),
            "n_crossed": len(level_values),
            "n_paths": level_reps,
            "target": 1.0 - h_min,
        },
    }
    _emit(_json_text(report), cfg.get("out"))
    return EXIT_OK


def _cmd_classify(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    spec = cfg.spec()
    half_tol = cfg.get("half_tol", 0.0, float)
    verdict = semimartingale_classify(spec, half_tol=half_tol)
    report = {
        "format": "msfbm.classify",
        "schema_version": 1,
        "spec": _spec_dict(spec),
        "semimartingale": verdict.to_dict(),
        "markov": markov_verdict(spec, half_tol=half_tol),
        "increment_sign": increment_sign_predict(spec, half_tol=half_tol).value,
    }
    _emit(_json_text(report), cfg.get("out"))
    return EXIT_OK


def _cmd_srd(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    spec = cfg.spec()
    p = cfg.get("p", 0, int)
    n_max = cfg.get("n_max", 10 ** 4, int)
    sums = analysis.srd_partial_sums(spec, p, n_max)
    terms = kernels.lag_cov_series(spec, p, np.arange(1, n_max + 1))
    if cfg.get("format", "csv") == "json":
        _emit(_json_text({
            "format": "msfbm.srd",
            "schema_version": 1,
            "spec": _spec_dict(spec),
            "p": p,
            "n_max": n_max,
            "lag_cov": list(terms),
            "partial_sums": list(sums),
        }), cfg.get("out"))
    else:
        rows = [[n + 1, float(terms[n]), float(sums[n])] for n in range(n_max)]
        _emit(_csv(rows, ["n", "lag_cov", "partial_sum"]), cfg.get("out"))
    return EXIT_OK


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--coeffs", help="comma-separated weights a_1..a_N")
    p.add_argument("--hurst", help="comma-separated Hurst indices in (0,1)")
    p.add_argument("--config", help="JSON config file; flags take precedence over it")
    p.add_argument("--out", help="output path (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msfbm",
        description=(
            "Mixed sub-fractional Brownian motion: exact covariance kernels, exact "
            "path samplers, path-property estimators and a rule-based classifier. "
            "Configuration precedence is flags > config file (--config) > built-in "
            "defaults; the MSFBM_THREADS environment variable caps replica "
            "parallelism without changing any output byte."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cov", help="evaluate covariance / increment-covariance tables")
    _add_common_flags(p)
    p.add_argument("--points", help="comma-separated times; emits all pairs (s<=t)")
    p.add_argument("--window", help="u,v,s,t increment window for one covariance")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=_cmd_cov)

    p = sub.add_parser("simulate", help="simulate an ensemble of paths")
    _add_common_flags(p)
    p.add_argument("--grid-points", type=int, help="uniform grid size (default 17)")
    p.add_argument("--horizon", type=float, help="grid horizon T (default 1.0)")
    p.add_argument("--times", help="explicit comma-separated grid (starts at 0)")
    p.add_argument("--reps", type=int, help="replica count (default 1)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--sampler", choices=("auto", "exact", "fbm", "fgn"),
                   help="auto routes to the circulant construction beyond the dense limit")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run a verification suite; exit 1 on failure")
    _add_common_flags(p)
    p.add_argument("--suite", choices=verify.SUITE_NAMES + ("all",),
                   help="suite name (default all)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--reps", type=int, help="Monte Carlo replicas (default 3000)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("dims", help="graph/range/level-set dimension estimates")
    _add_common_flags(p)
    p.add_argument("--grid-points", type=int, help="default 2^16 + 1")
    p.add_argument("--horizon", type=float, help="default 1.0")
    p.add_argument("--seed", type=int, help="default 0")
    p.add_argument("--level", type=float, help="level-set level x (default 0.0)")
    p.add_argument("--eps", type=float, help="left end of the probed interval (default 0.01)")
    p.add_argument("--level-reps", type=int, help="replicas for the level-set median (default 20)")
    p.set_defaults(func=_cmd_dims)

    p = sub.add_parser("classify", help="semimartingale / Markov / sign verdicts")
    _add_common_flags(p)
    p.add_argument("--half-tol", type=float, help="tolerance band for H = 1/2 detection (default 0)")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("srd", help="lag covariances and their partial sums")
    _add_common_flags(p)
    p.add_argument("--p", type=int, help="base offset of the first increment (default 0)")
    p.add_argument("--n-max", type=int, help="largest lag (default 10^4)")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=_cmd_srd)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FactorizationFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
