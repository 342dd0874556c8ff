"""Command-line entry point: ``ads2chain run|render|validate|preset``."""

from __future__ import annotations

import argparse
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np

from .. import __version__
from ..ed import EngineCapError
from .checks import run_checks
from .config import ConfigError, ExperimentConfig, load, loads
from .output import ENV_OUT, default_out_dir, write_csv, write_json
from .presets import PRESETS, preset_text
from .render import RENDER_KINDS, SchemaError, render

log = logging.getLogger("ads2chain")

# table name -> (render kind, x, y, z); tables not listed are not rendered
RENDER_HINTS = {
    "heatmap": ("heatmap", "m", "mu", "E0"),
    "ee": ("line", "ell", "s_ee", None),
    "gap": ("line", "num_sites", "gap_over_m", None),
    "chirality": ("line", "num_sites", "kappa_mean", None),
    "current": ("line", "t", "value", None),
    "otoc": ("line", "t", "re", None),
    "rstats_histogram": ("line", "s_lo", "density", None),
    "quench": ("line", "t", "mean", None),
    "continuum": ("line", "num_sites", "aQ_weighted", None),
    "spectrum": ("line", "index", "energy", None),
}


def execute(cfg: ExperimentConfig, out_dir: Path, threads: int = 1) -> dict:
    """Run ``cfg``, write its tables and sidecar under ``out_dir``; return the metadata."""
    from .experiments import RUNNERS, RunResult, Table

    out_dir = Path(out_dir)
    stem = cfg.name or cfg.kind
    t0 = time.perf_counter()
    if cfg.kind == "validate":
        res = run_checks(quick=bool(cfg.sweep["quick"]))
        result = RunResult({"validate": Table(["check", "ok"], [[i, int(ok)] for i, (_, ok, _)
                                                                  in enumerate(res)])},
                           {"checks": {name: detail for name, _, detail in res},
                            "all_passed": all(ok for _, ok, _ in res)})
    else:
        result = RUNNERS[cfg.kind](cfg, threads=threads)
    wall = time.perf_counter() - t0

    files = {}
    for name, table in result.tables.items():
        files[name] = str(write_csv(out_dir / f"{name}.csv", table.columns, table.rows))
    if cfg.output.get("svg"):
        for name in result.tables:
            hint = RENDER_HINTS.get(name)
            if hint is None or not result.tables[name].rows:
                continue
            kind, x, y, z = hint
            files[f"{name}_svg"] = str(render(files[name], kind, x=x, y=y, z=z))

    meta = {
        "config": cfg.to_dict(),
        "seeds": {"base_seed": cfg.model["seed"],
                  "per_sample": "SeedSequence([seed, sample, site]) -> Philox"},
        "engine": cfg.resolved_engine(),
        "version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "threads": threads,
        "wall_time_s": wall,
        "flags": result.flags,
        "files": files,
    }
    write_json(out_dir / f"{stem}.meta.json", meta)
    return meta


def _cmd_run(args) -> int:
    try:
        cfg = load(args.config)
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _run_cfg(cfg, args.out, args.threads)


def _run_cfg(cfg, out, threads) -> int:
    out_dir = Path(out) if out else Path(cfg.output.get("dir") or default_out_dir()) / (
        cfg.name or cfg.kind)
    try:
        meta = execute(cfg, out_dir, threads=max(1, threads))
    except (EngineCapError, ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(meta['files'])} file(s) to {out_dir} in {meta['wall_time_s']:.1f} s")
    if cfg.kind == "validate" and not meta["flags"]["all_passed"]:
        return 1
    return 0


def _cmd_render(args) -> int:
    # tables written by `run` carry their column choices; explicit flags win
    x, y, z = args.x, args.y, args.z
    hint = RENDER_HINTS.get(Path(args.input).stem)
    if hint and hint[0] == args.kind:
        x, y, z = x or hint[1], y or hint[2], z or hint[3]
    try:
        path = render(args.input, args.kind, out=args.out, x=x, y=y, z=z)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


def _cmd_validate(args) -> int:
    results = run_checks(quick=args.quick)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    return 0 if all(ok for _, ok, _ in results) else 1


def _cmd_preset(args) -> int:
    if args.list or not args.name:
        print("\n".join(sorted(PRESETS)))
        return 0
    try:
        text = preset_text(args.name)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    if not args.run:
        sys.stdout.write(text)
        return 0
    return _run_cfg(loads(text), args.out, args.threads)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ads2chain",
        description="Staggered fermions on an AdS2 black-hole lattice: experiments and figures.",
        epilog=f"Default output directory: ${ENV_OUT} or ./results.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a TOML config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="output directory")
    r.add_argument("--threads", type=int, default=1, help="worker processes")
    r.set_defaults(func=_cmd_run)

    d = sub.add_parser("render", help="render a result CSV to SVG")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--kind", required=True, choices=RENDER_KINDS)
    d.add_argument("--out")
    d.add_argument("--x")
    d.add_argument("--y")
    d.add_argument("--z")
    d.set_defaults(func=_cmd_render)

    v = sub.add_parser("validate", help="run the invariant suite")
    v.add_argument("--quick", action="store_true")
    v.set_defaults(func=_cmd_validate)

    s = sub.add_parser("preset", help="print (or run) a named figure preset")
    s.add_argument("name", nargs="?")
    s.add_argument("--list", action="store_true")
    s.add_argument("--run", action="store_true")
    s.add_argument("--out")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=_cmd_preset)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)
