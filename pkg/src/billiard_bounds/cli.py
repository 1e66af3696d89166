"""Command-line runner: ``bbl --config run.json [--seed N] [--out DIR] [--json]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config, parse_config
from .errors import ConfigInvalid
from .runner import EXIT_CONFIG, run


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bbl", description="Periodic billiard trajectories and their lower bounds.")
    ap.add_argument("--config", required=True, help="JSON or TOML experiment document")
    ap.add_argument("--seed", type=int, help="override settings.rng_seed")
    ap.add_argument("--out", help="directory for report.json and renderings")
    ap.add_argument("--budget", type=int, help="cell budget for homology builds")
    ap.add_argument("--json", action="store_true", help="print the report to stdout")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _summary(report) -> str:
    lines = [f"command: {report.config['command']}"]
    for name, ok in report.checks.items():
        lines.append(f"  {'PASS' if ok else 'FAIL'} {name}")
    for err in report.errors:
        lines.append(f"  ERROR {err['type']}: {err['message']}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args.config)
        if args.seed is not None or args.budget is not None:
            data = cfg.model_dump(mode="json")
            if args.seed is not None:
                data["settings"]["rng_seed"] = args.seed
            if args.budget is not None:
                data["budget"] = args.budget
            cfg = parse_config(data)
    except ConfigInvalid as exc:
        payload = {"errors": [{"type": "ConfigInvalid", "message": str(exc), "fields": exc.errors}]}
        print(json.dumps(payload, indent=2) if args.json else f"config error: {exc}", file=sys.stdout if args.json else sys.stderr)
        return EXIT_CONFIG

    out_dir = None
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    report = run(cfg, out_dir=out_dir)
    text = json.dumps(report.to_dict(), indent=2)
    if out_dir is not None:
        (out_dir / "report.json").write_text(text + "\n")
    if cfg.output.report:
        Path(cfg.output.report).write_text(text + "\n")
    if args.json:
        print(text)
    else:
        print(_summary(report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
