"""Command-line driver: ``glterm prove <files...>``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields

from .evaluator import ensure_recursion_limit
from .prover import FileReport, ProveConfig, run_file
from .util import deep_call


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="glterm", description="Term-level bit-blasting prover")
    sub = p.add_subparsers(dest="command", required=True)
    pr = sub.add_parser("prove", help="process event files and prove their theorems")
    pr.add_argument("files", nargs="+")
    pr.add_argument("--trace-rewrites", action="store_true", help="log every rewrite attempt")
    pr.add_argument("--dump-bvar-db", action="store_true", help="print generated Boolean variables")
    pr.add_argument("--print-rules", action="store_true", help="print the rule database after loading")
    pr.add_argument("--sat-budget", type=int, help="conflict budget for the final query (0: none)")
    pr.add_argument("--dimacs-dir", help="write each final query as DIMACS into this directory")
    pr.add_argument("--export-only", action="store_true", help="write DIMACS without solving")
    pr.add_argument("--seed", type=int, help="seed for all random sampling")
    pr.add_argument("--jobs", type=int, default=1, help="files processed in parallel")
    pr.add_argument("--cov-samples", type=int, help="coverage samples per theorem")
    pr.add_argument("--config", help="JSON file of configuration values")
    pr.add_argument("--summary", action="store_true", help="print one key=value record per theorem")
    return p


def make_config(args: argparse.Namespace) -> ProveConfig:
    cfg = ProveConfig()
    known = {f.name for f in fields(ProveConfig)}
    if args.config:
        with open(args.config) as f:
            data = json.load(f)
        for k, v in data.items():
            k = k.replace("-", "_")
            if k not in known:
                raise ValueError(f"unknown configuration key {k!r}")
            setattr(cfg, k, v)
    for name in ("sat_budget", "dimacs_dir", "seed", "cov_samples"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    for name in ("trace_rewrites", "dump_bvar_db", "print_rules", "export_only"):
        if getattr(args, name):
            setattr(cfg, name, True)
    return cfg


def render_report(rep: FileReport, summary: bool) -> str:
    lines = [f"== {rep.path}"]
    if rep.error is not None:
        lines.append(f"error: {rep.error}")
    for r in rep.results:
        lines.extend(r.report_lines())
    if summary:
        lines.extend(r.summary() for r in rep.results)
    return "\n".join(lines)


def _run_one(path: str, cfg: ProveConfig, summary: bool) -> tuple[int, str]:
    ensure_recursion_limit()
    rep = deep_call(run_file, path, cfg)
    text = render_report(rep, summary)
    if cfg.print_rules and rep.db is not None:
        text += "\n" + rep.db.dump()
    return rep.status, text


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    status = 0
    if args.jobs > 1 and len(args.files) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            outs = list(ex.map(_run_one, args.files, [cfg] * len(args.files), [args.summary] * len(args.files)))
    else:
        outs = [_run_one(p, cfg, args.summary) for p in args.files]
    for code, text in outs:
        print(text)
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
