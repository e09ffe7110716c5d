"""Configuration-driven command line front end.

Usage: ``bilmax run CONFIG [--override key=value ...] [--out DIR]
[--threads K] [--seed S]``.  CONFIG is a JSON file (or the name of a
bundled configuration such as ``paper-suite``).  Exit codes: 0 when all
configured verdicts pass, 1 on verdict failure, 2 on invalid
configuration, 3 on resolution errors.
"""

from __future__ import annotations

import argparse
import copy
import importlib.resources
import json
import sys
import time
from pathlib import Path

from .errors import BilmaxError, ConfigError, ResolutionError
from .harness import EXPERIMENTS
from .io import write_csv, write_report
from .parallel import resolve_threads

_COMMON_KEYS = {"kind", "name", "seed", "dump_fields"}

_ALLOWED_KEYS = {
    "decompose": {"n", "lambdas", "j_range", "j_max", "flavor"},
    "sobolev-decay": {"n", "lambda", "s", "r", "j_range", "tol",
                      "cross_check", "cross_check_n"},
    "wavelet-decay": {"order", "resolution", "gamma_max", "quad_level",
                      "bump_width", "reconstruction", "recon_n"},
    "coeff-decay": {"n", "lambda", "r", "s", "order", "resolution", "j_range",
                    "gamma_min", "gamma_max", "quad_level", "gamma_tol", "j_tol"},
    "maximal": {"n", "trials", "band", "grid_n", "grid_extent", "lambda",
                "majorization", "per_octave"},
    "gfunction": {"lambda", "j", "pairs", "band", "grid_n", "grid_extent",
                  "per_octave", "ftc_points"},
    "kernel-decay": {"n", "lambda", "grid_n", "extent", "fit_range", "bins", "tol"},
    "convergence": {"n", "lambda", "grid_n", "extent", "t_exponents",
                    "oracle", "oracle_n"},
    "bessel-check": {"nodes", "control_shift"},
    "norm-ratio": {"n", "lambda", "j_range", "seed", "trials", "band", "grid_n",
                   "grid_extent", "per_octave", "tol"},
}


def _validate_experiment(exp: dict, position: int) -> dict:
    if not isinstance(exp, dict):
        raise ConfigError(f"experiment #{position} is not an object")
    kind = exp.get("kind")
    if kind is None:
        raise ConfigError(f"experiment #{position} is missing 'kind'")
    if kind not in EXPERIMENTS:
        raise ConfigError(
            f"experiment #{position}: unknown kind {kind!r}; "
            f"known kinds: {', '.join(sorted(EXPERIMENTS))}")
    allowed = _ALLOWED_KEYS[kind] | _COMMON_KEYS
    unknown = set(exp) - allowed
    if unknown:
        raise ConfigError(
            f"experiment #{position} ({kind}): unknown keys {sorted(unknown)}; "
            f"allowed: {sorted(allowed)}")
    return exp


def validate_config(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    if "experiments" not in cfg and "kind" in cfg:
        cfg = {"experiments": [dict(cfg)]}
    top_allowed = {"experiments", "seed", "threads", "output_dir"}
    unknown = set(cfg) - top_allowed
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}; "
                          f"allowed: {sorted(top_allowed)}")
    exps = cfg.get("experiments")
    if not isinstance(exps, list) or not exps:
        raise ConfigError("'experiments' must be a non-empty list")
    for i, exp in enumerate(exps):
        _validate_experiment(exp, i)
    names = []
    for i, exp in enumerate(exps):
        names.append(exp.get("name", f"{exp['kind']}-{i}"))
    if len(set(names)) != len(names):
        raise ConfigError(f"experiment names must be unique, got {names}")
    return cfg


def apply_override(cfg: dict, assignment: str):
    """Apply a dot-path override such as experiments.0.lambda=2.5."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} must look like key=value")
    path, _, raw = assignment.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = path.split(".")
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        if isinstance(node, list):
            try:
                idx = int(part)
            except ValueError as exc:
                raise ConfigError(f"override path {path!r}: {part!r} is not an index") from exc
            if not 0 <= idx < len(node):
                raise ConfigError(f"override path {path!r}: index {idx} out of range")
            if last:
                node[idx] = value
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if last:
                node[part] = value
            else:
                node = node.setdefault(part, {})
        else:
            raise ConfigError(f"override path {path!r} descends into a scalar")


def _load_config(spec: str) -> dict:
    path = Path(spec)
    if not path.exists():
        bundled = spec if spec.endswith(".json") else f"{spec.replace('-', '_')}.json"
        res = importlib.resources.files("bilmax").joinpath("configs", bundled)
        if res.is_file():
            return json.loads(res.read_text())
        raise ConfigError(f"config {spec!r} not found (no file, no bundled config)")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{spec}: invalid JSON: {exc}") from exc


def _samples_rows(data: dict) -> list[dict]:
    rows = []
    for key, value in sorted(data.items()):
        if isinstance(value, dict) and "xs" in value and "log2_values" in value:
            for x, y in zip(value["xs"], value["log2_values"]):
                rows.append({"series": f"{key}:{value.get('label', '')}",
                             "x": x, "log2_value": y})
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for entry in value:
                row = {"series": key}
                row.update({k: v for k, v in entry.items()
                            if isinstance(v, (int, float, str))})
                rows.append(row)
        elif isinstance(value, list) and value and isinstance(value[0], (int, float)):
            for i, v in enumerate(value):
                rows.append({"series": key, "x": i, "value": v})
    return rows


def run_config(cfg: dict, out_dir: Path, threads: int) -> tuple[bool, list[str]]:
    """Run every configured experiment; returns (all_passed, summary lines)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    all_ok = True
    lines = []
    meta = {"started": time.strftime("%Y-%m-%dT%H:%M:%S"), "threads": threads,
            "experiments": []}
    reports = {}
    for i, exp in enumerate(cfg["experiments"]):
        exp = copy.deepcopy(exp)
        kind = exp.pop("kind")
        name = exp.pop("name", f"{kind}-{i}")
        if "seed" in cfg and "seed" not in exp:
            exp["seed"] = cfg["seed"]
        t0 = time.time()
        report = EXPERIMENTS[kind](exp, threads=threads)
        elapsed = time.time() - t0
        ok = all(v["pass"] for v in report["verdicts"].values())
        all_ok &= ok
        exp_dir = out_dir / name
        exp_dir.mkdir(parents=True, exist_ok=True)
        fields = report.pop("fields", None)
        if fields:
            from .io import write_field

            field_dir = exp_dir / "fields"
            field_dir.mkdir(exist_ok=True)
            for fname, fld in fields.items():
                write_field(field_dir / f"{fname}.raw", fld)
        reports[name] = report
        write_report(exp_dir / "report.json", report)
        rows = _samples_rows(report.get("data", {}))
        if rows:
            write_csv(exp_dir / "samples.csv", rows)
        meta["experiments"].append({"name": name, "seconds": round(elapsed, 3)})
        status = "PASS" if ok else "FAIL"
        lines.append(f"{status} {name} ({elapsed:.1f}s)")
        for vname, v in report["verdicts"].items():
            mark = "ok " if v["pass"] else "FAIL"
            lines.append(f"  [{mark}] {vname}: value={v['value']} bound={v['bound']}")
    summary = {"passed": all_ok,
               "experiments": {name: {"passed": all(v["pass"] for v in rep["verdicts"].values()),
                                      "verdicts": rep["verdicts"]}
                               for name, rep in reports.items()}}
    write_report(out_dir / "report.json", summary)
    meta["finished"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    write_report(out_dir / "run_meta.json", meta)
    return all_ok, lines


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bilmax",
                                     description="bilinear multiplier laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a configuration file")
    runp.add_argument("config", help="path to a JSON config, or a bundled name "
                                     "such as 'paper-suite'")
    runp.add_argument("--override", action="append", default=[],
                      help="dot-path override, e.g. experiments.0.lambda=2.5")
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument("--threads", type=int, default=1,
                      help="worker threads (0 = all cores)")
    runp.add_argument("--seed", type=int, default=None, help="global seed override")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        for assignment in args.override:
            apply_override(cfg, assignment)
        if args.seed is not None:
            cfg["seed"] = args.seed
        cfg = validate_config(cfg)
        out_dir = Path(args.out or cfg.get("output_dir", "bilmax-out"))
        threads = resolve_threads(args.threads if args.threads is not None
                                  else cfg.get("threads", 1))
        ok, lines = run_config(cfg, out_dir, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return 3
    except BilmaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    print("all passed" if ok else "verdict failures present")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
