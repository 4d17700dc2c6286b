"""Command-line entry point: ``uib <experiment> --config FILE --out DIR [--seed N] [--plot]``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PathSpec, RunConfig, parse_config, resolve_schedule
from .empirical import SeedSpec
from .errors import BadPath, IoError, ParseError, UibError
from .experiments import (
    ExperimentRecord,
    run_tail_lemmas,
    run_theorem1_sweep,
    run_theorem2_joint,
    run_theorem3_bk,
)
from .ldp import ldp_rate_curve
from .paths import StepPath
from .report import render_svg, to_csv
from .strassen import dist_to_ball

log = logging.getLogger("uib")

EXPERIMENTS = ("sweep", "joint", "bk", "lemmas", "ldp-curve", "project")


@dataclass
class RunOutput:
    columns: list[str]
    rows: list[list]
    summary: dict
    series: list = field(default_factory=list)
    plot_title: str = ""
    xlabel: str = "log10 n"
    ylabel: str = ""


def path_from_spec(spec: PathSpec) -> StepPath:
    knots = np.asarray(spec.knots, dtype=float)
    values = np.asarray(spec.values, dtype=float)
    left = np.asarray(spec.left if spec.left is not None else spec.values, dtype=float)
    right = np.asarray(spec.right if spec.right is not None else spec.values, dtype=float)
    try:
        return StepPath(knots, left, right, values)
    except UibError as exc:
        raise BadPath(str(exc)) from exc


def _records_table(records: list[ExperimentRecord], with_h: bool = True) -> tuple[list[str], list[list]]:
    keys = list(records[0].stats) if records else []
    cols = ["n"] + (["h"] if with_h else []) + keys + ["seed_label"]
    rows = [[r.n] + ([r.h] if with_h else []) + [r.stats[k] for k in keys] + [r.seed_label] for r in records]
    return cols, rows


def _per_n(records: list[ExperimentRecord], reducers: dict[str, str]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for n in sorted({r.n for r in records}):
        sub = [r for r in records if r.n == n]
        entry = {}
        for key, how in reducers.items():
            vals = [r.stats[key] for r in sub if key in r.stats]
            if vals:
                entry[f"{how}_{key}"] = max(vals) if how == "sup" else min(vals)
        out[str(n)] = entry
    return out


def _trend(summary: dict, key: str, label: str):
    ns = sorted(int(n) for n in summary)
    return ([math.log10(n) for n in ns], [summary[str(n)][key] for n in ns], label)


def execute(cfg: RunConfig) -> RunOutput:
    seed = SeedSpec(cfg.run_seed)
    exp = cfg.experiment
    if exp == "project":
        rows = []
        for i, spec in enumerate(cfg.paths):
            f = path_from_spec(spec)
            for c in cfg.radii:
                rows.append([i, c, dist_to_ball(f, c)])
        dists = {f"path_{i}": {f"radius_{c:.17g}": d for j, c, d in rows if j == i} for i in range(len(cfg.paths))}
        series = [(list(cfg.radii), [d for j, _, d in rows if j == i], f"path {i}") for i in range(len(cfg.paths))]
        return RunOutput(["index", "radius", "distance"], rows, dists, series, "distance to the scaled ball", "radius", "distance")

    ns = resolve_schedule(cfg)
    if exp == "ldp-curve":
        curve = ldp_rate_curve(cfg.x, [(n, n ** -cfg.ldp_exponent) for n in ns])
        x2 = cfg.x * cfg.x
        rows = [[p.n, p.h, p.kmin, p.speed, p.normalized_log_tail, p.bennett_bound, p.normalized_log_tail / x2]
                for p in curve.points]
        cols = ["n", "h", "kmin", "speed", "normalized_log_tail", "bennett_bound", "ratio_to_x2"]
        summary = {str(p.n): {"normalized_log_tail": p.normalized_log_tail, "bennett_bound": p.bennett_bound} for p in curve.points}
        lx = [math.log10(p.n) for p in curve.points]
        series = [
            (lx, [p.normalized_log_tail for p in curve.points], "normalized log-tail"),
            (lx, [p.bennett_bound for p in curve.points], "Bennett lower bound"),
            (lx, [x2] * len(lx), "x^2"),
        ]
        return RunOutput(cols, rows, summary, series, f"log-tail speed curve, x = {cfg.x:g}", ylabel="-log P / log log n")

    common = dict(ns=ns, seed=seed)
    grid = dict(a1=cfg.a1, a2=cfg.a2, rho=cfg.rho, bandwidths=cfg.bandwidths)
    if exp == "sweep":
        targets = {name: path_from_spec(p) for name, p in cfg.targets.items()}
        records = run_theorem1_sweep(**common, **grid, t=cfg.t, targets=targets)
        reducers = {"dist_S": "sup", "dist_sqrt2S": "sup", **{f"target_{k}": "inf" for k in targets}}
        summary = _per_n(records, reducers)
        series = [_trend(summary, "sup_dist_S", "sup dist to S"), _trend(summary, "sup_dist_sqrt2S", "sup dist to sqrt2 S")]
        cols, rows = _records_table(records)
        return RunOutput(cols, rows, summary, series, "bandwidth sweep", ylabel="sup over grid")
    if exp == "bk":
        records = run_theorem3_bk(**common, **grid)
        summary = _per_n(records, {"bk_ratio": "sup"})
        n_axis = _trend(summary, "sup_bk_ratio", "sup R/r")
        series = [n_axis, (n_axis[0], [math.sqrt(2.0)] * len(n_axis[0]), "sqrt 2")]
        cols, rows = _records_table(records)
        return RunOutput(cols, rows, summary, series, "Bahadur-Kiefer ratio", ylabel="sup R/r")
    if exp == "lemmas":
        records = run_tail_lemmas(**common, **grid, eta=cfg.eta)
        summary = _per_n(records, {"lemma51_ratio": "sup", "lemma53_ratio": "sup", "lemma52_holds": "inf"})
        series = [_trend(summary, "sup_lemma51_ratio", "sup quantile ratio"),
                  _trend(summary, "sup_lemma53_ratio", "sup oscillation ratio")]
        cols, rows = _records_table(records)
        return RunOutput(cols, rows, summary, series, "tail ratios", ylabel="sup over grid")
    if exp == "joint":
        records = run_theorem2_joint(**common, exponents=cfg.joint_exponents, replicates=cfg.replicates, t=cfg.t)
        summary = {str(r.n): dict(r.stats) for r in records}
        series = [_trend(summary, "product_dist", "product distance"), _trend(summary, "identity_gap", "identity gap")]
        cols, rows = _records_table(records, with_h=False)
        return RunOutput(cols, rows, summary, series, "joint bandwidths", ylabel="distance")
    raise ParseError(f"unknown experiment {exp!r}")


def _write(path: Path, text: str) -> None:
    try:
        path.write_bytes(text.encode("utf-8"))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def run(cfg: RunConfig, out_dir: str | Path | None = None, plot: bool = False) -> dict[str, Path]:
    """Run one experiment and write ``<exp>.csv``, ``<exp>_summary.json`` and optionally ``<exp>.svg``."""
    out = Path(out_dir or cfg.out_dir or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc}") from exc
    result = execute(cfg)
    stem = cfg.experiment.replace("-", "_")
    files = {"csv": out / f"{stem}.csv", "summary": out / f"{stem}_summary.json"}
    _write(files["csv"], to_csv(result.columns, result.rows))
    summary = {"config": cfg.model_dump(mode="json"), "rows": len(result.rows), "per_n": result.summary}
    _write(files["summary"], json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if plot:
        files["svg"] = out / f"{stem}.svg"
        _write(files["svg"], render_svg(result.series, result.plot_title, result.xlabel, result.ylabel))
    return files


def load_config(path: str, experiment: str, seed: int | None) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    if raw.setdefault("experiment", experiment) != experiment:
        raise ParseError(f"config is for {raw['experiment']!r} but the subcommand is {experiment!r}")
    if seed is not None:
        raw["run_seed"] = seed
    return parse_config(json.dumps(raw))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uib", description="Local empirical and quantile process experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", default=None, help="output directory (default: config out_dir or .)")
    p.add_argument("--seed", type=int, default=None, help="override run_seed")
    p.add_argument("--plot", action="store_true", help="also write an SVG trend plot")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config, args.experiment, args.seed)
        files = run(cfg, args.out, args.plot)
    except UibError as exc:
        print(f"uib: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    for kind, path in files.items():
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
