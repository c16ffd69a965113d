"""Command-line front end.

    delayedchoice run CONFIG --out DIR [--seed N] [--shots N]
    delayedchoice sweep CONFIG --out DIR [--seed N] [--shots N]
    delayedchoice check CONFIG

``run`` writes ``report.json``, ``histogram.csv`` and ``plot.csv`` into DIR.
``sweep`` writes one such set per grid point under ``point_NNN/`` plus
``summary.csv``.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from .config import ConfigFile, parse_config, serialize_config
from .errors import ConfigError, DelayedChoiceError
from .experiments import ExperimentReport, run_experiment

log = logging.getLogger("delayedchoice")

REPORT_NAME = "report.json"
HISTOGRAM_NAME = "histogram.csv"
PLOT_NAME = "plot.csv"
SUMMARY_NAME = "summary.csv"
PORTS_NAME = "ports.csv"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2


def write_atomic(path: Path, text: str):
    """Write via a temporary file in the same directory, then rename."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def plot_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write("x,expected_intensity\n")
    for x, y in zip(report.record.bin_centers, report.exact_intensity):
        buf.write(f"{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def write_run(report: ExperimentReport, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    write_atomic(out / REPORT_NAME, report_json(report))
    write_atomic(out / HISTOGRAM_NAME, report.record.to_csv())
    write_atomic(out / PLOT_NAME, plot_csv(report))


def run_file(cfg: ConfigFile, out: Path) -> ExperimentReport:
    report = run_experiment(cfg.config)
    write_run(report, out)
    return report


def sweep_file(cfg: ConfigFile, out: Path) -> list[ExperimentReport]:
    if cfg.sweep is None:
        raise ConfigError("sweep: config file has no [sweep] section")
    out.mkdir(parents=True, exist_ok=True)
    params = cfg.sweep_values()
    reports = []
    for k, (param, config) in enumerate(zip(params, cfg.configs)):
        report = run_experiment(config)
        write_run(report, out / f"point_{k:03d}")
        reports.append((param, report))

    summary = io.StringIO()
    summary.write("param,visibility,visibility_stderr,count_ratio\n")
    for param, r in reports:
        summary.write(
            f"{param!r},{_fmt(r.visibility)},{_fmt(r.visibility_stderr)},{r.count_ratio!r}\n"
        )
    write_atomic(out / SUMMARY_NAME, summary.getvalue())

    if any("port_probabilities" in r.diagnostics for _, r in reports):
        ports = io.StringIO()
        ports.write("param,port_1,port_2\n")
        for param, r in reports:
            p1, p2 = r.diagnostics["port_probabilities"]
            ports.write(f"{param!r},{float(p1)!r},{float(p2)!r}\n")
        write_atomic(out / PORTS_NAME, ports.getvalue())
    return [r for _, r in reports]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delayedchoice", description="Delayed-choice interferometry simulator."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("run", "run one experiment"), ("sweep", "run a parameter sweep")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="experiment config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override experiment.seed")
        p.add_argument("--shots", type=int, default=None, help="override experiment.shots")

    p = sub.add_parser("check", help="validate a config file and echo it with defaults")
    p.add_argument("config", help="experiment config file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        cfg = parse_config(args.config)
        if args.command == "check":
            sys.stdout.write(serialize_config(cfg))
            return EXIT_OK
        cfg = cfg.with_overrides(seed=args.seed, shots=args.shots)
        out = Path(args.out)
        if args.command == "run":
            report = run_file(cfg, out)
            log.info("wrote %s", out)
            print(
                f"{report.config.scenario}: count_ratio={report.count_ratio} "
                f"visibility={_fmt(report.visibility) or 'n/a'}"
            )
        else:
            reports = sweep_file(cfg, out)
            print(f"sweep over {cfg.sweep.parameter}: {len(reports)} points written to {out}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DelayedChoiceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
