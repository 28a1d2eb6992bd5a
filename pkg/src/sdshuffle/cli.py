"""Command-line entry point: mask, evaluate, tune, simulate, bench."""

from __future__ import annotations

import argparse
import csv
import json
import os
import secrets
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .baselines import DEFAULT_GRIDS, MaskSpec, Method, apply_mask
from .bench import SLOPE_RANGES, SWEEPS, as_records, run_sweep, sweep_slope
from .core import InvalidInputError, InvalidParameterError, check_seed, derive_seed
from .dataio import REPORT_SCHEMA, CsvParseError, read_csv, write_csv, write_json
from .metrics import evaluate
from .scoring import DEFAULT_THRESHOLD, compute_scores, parse_grid, select_best_parameter
from .simulate import PRESETS, Family, SimSpec, preset_specs, resolve, simulate

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5

SEED_ENV = "SDSHUFFLE_SEED"

DEFAULTS = {
    "mask": {"method": "sjppds-s"},
    "evaluate": {},
    "tune": {"method": "sjppds-s", "threshold": DEFAULT_THRESHOLD, "replications": 30},
    "simulate": {},
    "bench": {"sweep": "all", "methods": "sjppds-s", "repeats": 3},
}


class ValidationError(ValueError):
    pass


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="input CSV")
    p.add_argument("--output", help="output CSV (directory for simulate)")
    p.add_argument("--seed", type=int, help=f"RNG seed; falls back to ${SEED_ENV}, then a random seed")
    p.add_argument("--config", help="JSON file of flag values; flags override it")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    p.add_argument("--timings", action=argparse.BooleanOptionalAction, default=None,
                   help="include wall-clock timings in the report (makes it non-reproducible)")


def _method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=[m.value for m in Method])
    p.add_argument("--param", type=float, help="n_c, k, noise %% or swap %%")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sdshuffle", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mask", help="mask a CSV file")
    _shared(p)
    _method_flags(p)

    p = sub.add_parser("evaluate", help="score a masked CSV against its original")
    _shared(p)
    p.add_argument("--masked", help="masked CSV")
    p.add_argument("--method", choices=[m.value for m in Method], help="masker that produced --masked")
    p.add_argument("--sorted", action=argparse.BooleanOptionalAction, default=None,
                   help="use averaged-sorted metrics (default: on for sjppds methods)")

    p = sub.add_parser("tune", help="pick a masking parameter under a DBRL threshold")
    _shared(p)
    _method_flags(p)
    p.add_argument("--grid", help="start:step:end or comma list (default: the method's standard grid)")
    p.add_argument("--threshold", type=float)
    p.add_argument("--replications", type=int)
    p.add_argument("--sorted", action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser("simulate", help="generate simulated datasets")
    _shared(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--datasets", type=int)

    p = sub.add_parser("bench", help="time maskers over n, p and n_c sweeps")
    _shared(p)
    p.add_argument("--sweep", choices=["all", *SWEEPS])
    p.add_argument("--methods", help="comma-separated method names")
    p.add_argument("--repeats", type=int)
    return ap


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge command defaults, the config file and explicit flags (flags win)."""
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CsvParseError(f"config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a flat JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    cfg.update({k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")})
    if cfg.get("seed") is None:
        env = os.environ.get(SEED_ENV)
        cfg["seed"] = int(env) if env else secrets.randbits(64)
    cfg["seed"] = check_seed(cfg["seed"])
    cfg.setdefault("workers", os.cpu_count() or 1)
    return cfg


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ValidationError("missing required option(s): " + ", ".join("--" + k for k in missing))


def _report_head(command: str, cfg: dict) -> dict:
    return {"schema": REPORT_SCHEMA, "tool": "sdshuffle", "version": __version__,
            "command": command, "config": cfg, "seed": cfg["seed"]}


def _emit(cfg: dict, doc: dict) -> None:
    if cfg.get("report"):
        write_json(doc, cfg["report"])


def cmd_mask(cfg: dict) -> int:
    _require(cfg, "input", "output", "param")
    spec = MaskSpec(Method(cfg["method"]), float(cfg["param"]), cfg["seed"])
    data = read_csv(cfg["input"])
    t0 = time.perf_counter()
    masked = apply_mask(spec, data)
    elapsed = time.perf_counter() - t0
    write_csv(masked, cfg["output"])
    print(f"seed: {cfg['seed']}")
    doc = _report_head("mask", cfg)
    doc["result"] = {"n": data.n, "p": data.p, "output": cfg["output"]}
    if cfg.get("timings"):
        doc["timings"] = {"mask_seconds": elapsed}
    _emit(cfg, doc)
    return EXIT_OK


def cmd_evaluate(cfg: dict) -> int:
    _require(cfg, "input", "masked")
    x = read_csv(cfg["input"])
    xm = read_csv(cfg["masked"])
    if x.shape != xm.shape:
        raise InvalidInputError(f"shape mismatch: {x.shape} vs {xm.shape}")
    use_sorted = cfg.get("sorted")
    if use_sorted is None:
        use_sorted = bool(cfg.get("method")) and Method(cfg["method"]).is_sjppds
    t0 = time.perf_counter()
    bundle = evaluate(x, xm, sorted_metrics=use_sorted, seed=cfg["seed"])
    scores = compute_scores(bundle)
    doc = _report_head("evaluate", cfg)
    doc["result"] = {"sorted": use_sorted, "metrics": bundle.as_dict(), "scores": asdict(scores)}
    if cfg.get("timings"):
        doc["timings"] = {"evaluate_seconds": time.perf_counter() - t0}
    _emit(cfg, doc)
    print(json.dumps(doc["result"], indent=2, sort_keys=True))
    return EXIT_OK


def cmd_tune(cfg: dict) -> int:
    _require(cfg, "input")
    method = Method(cfg["method"])
    grid = parse_grid(str(cfg["grid"])) if cfg.get("grid") else DEFAULT_GRIDS[method]
    specs = [MaskSpec(method, v, cfg["seed"]) for v in grid]
    x = read_csv(cfg["input"])
    t0 = time.perf_counter()
    result = select_best_parameter(
        x, specs, float(cfg["threshold"]), int(cfg["replications"]), cfg["seed"],
        sorted_metrics=cfg.get("sorted"), workers=int(cfg["workers"]),
    )
    doc = _report_head("tune", cfg)
    doc["result"] = result.as_dict()
    if cfg.get("timings"):
        doc["timings"] = {"tune_seconds": time.perf_counter() - t0}
    _emit(cfg, doc)
    if not result.feasible:
        print(f"no grid point has median DBRL below {result.threshold}", file=sys.stderr)
        return EXIT_INFEASIBLE
    best = result.selected_point()
    print(f"selected {method.value} param={best.param} overall={best.scores.overall:.4f} dbrl={best.dbrl:.4f}")
    return EXIT_OK


def cmd_simulate(cfg: dict) -> int:
    _require(cfg, "output")
    if cfg.get("preset"):
        pr = PRESETS[cfg["preset"]]
        n, p = int(cfg.get("n", pr.n)), int(cfg.get("p", pr.p))
        specs = [
            SimSpec(s.family, n, p, s.seed, cfg.get("rho"), None, cfg.get("lam"))
            for s in preset_specs(cfg["preset"], cfg["seed"], cfg.get("datasets"))
        ]
    else:
        _require(cfg, "family", "n", "p")
        specs = [
            SimSpec(Family(cfg["family"]), int(cfg["n"]), int(cfg["p"]), derive_seed(cfg["seed"], d),
                    cfg.get("rho"), None, cfg.get("lam"))
            for d in range(int(cfg.get("datasets", 1)))
        ]
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    manifest = _report_head("simulate", cfg)
    manifest["datasets"] = []
    for d, spec in enumerate(specs, start=1):
        name = f"dataset_{d:03d}.csv"
        write_csv(simulate(spec), out / name)
        entry = resolve(spec).as_dict()
        entry["file"] = name
        manifest["datasets"].append(entry)
    write_json(manifest, out / "manifest.json")
    _emit(cfg, manifest)
    print(f"seed: {cfg['seed']}; wrote {len(specs)} dataset(s) to {out}")
    return EXIT_OK


def cmd_bench(cfg: dict) -> int:
    methods = [Method(m.strip()) for m in str(cfg["methods"]).split(",") if m.strip()]
    sweeps = list(SWEEPS) if cfg["sweep"] == "all" else [cfg["sweep"]]
    doc = _report_head("bench", cfg)
    doc["sweeps"] = {}
    table = []
    for name in sweeps:
        rows = run_sweep(name, methods, int(cfg["repeats"]), cfg["seed"])
        table.extend(rows)
        slopes = {m.value: sweep_slope(rows, name, m.value) for m in methods}
        doc["sweeps"][name] = {"rows": as_records(rows), "slopes": slopes, "expected_range": SLOPE_RANGES[name]}
        for m, s in slopes.items():
            lo, hi = SLOPE_RANGES[name]
            print(f"{name:>4} sweep {m:>10}: log-log slope {s:.3f} (expected {lo}-{hi})")
    if cfg.get("output"):
        with open(cfg["output"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["method", "n", "p", "n_c", "param", "seconds", "repeats"])
            for r in table:
                w.writerow([r.method, r.n, r.p, r.n_c, r.param, repr(r.seconds), r.repeats])
    _emit(cfg, doc)
    return EXIT_OK


COMMANDS = {
    "mask": cmd_mask,
    "evaluate": cmd_evaluate,
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except CsvParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, InvalidInputError, InvalidParameterError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
