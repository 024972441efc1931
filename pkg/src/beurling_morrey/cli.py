"""Command-line runner: ``beurling-morrey run --config FILE --out DIR`` and ``beurling-morrey list``.

Config files are flat ``key = value`` text (``#`` comments allowed).  Exit
codes: 0 when every check passes, 1 on a failed check or a numerical error
(rows computed so far are still written), 2 on an invalid configuration.
Set ``BEURLING_MORREY_THREADS`` to cap FFT threads (0 = auto).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import numbers
import sys
import traceback
from pathlib import Path

import numpy as np

from .experiments import (EXPERIMENTS, ConfigError, ExperimentConfig, Table, list_experiments, new_table,
                          run_experiment)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def read_config(path) -> dict:
    text = Path(path).read_text()
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return dict(cp["run"])


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        x = float(v)
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x} in table")
        return f"{x:.12g}"
    if isinstance(v, numbers.Complex):
        raise ValueError("complex values must be split into columns before writing")
    return str(v)


def emit_csv(table: Table, path) -> Path:
    """Write ``table`` as RFC 4180 CSV; every value is formatted before the file is opened."""
    body = [[_fmt(v) for v in row] for row in table.rows]
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\r\n")
        wr.writerow(table.columns)
        wr.writerows(body)
    return path


def write_resolved(cfg: ExperimentConfig, path):
    with Path(path).open("w") as fh:
        for k, v in cfg.items():
            fh.write(f"{k} = {v}\n")


def _summary_lines(name, anchor, checks, status, error=None):
    lines = [f"experiment: {name}", f"anchor: {anchor}"]
    for c in checks:
        tag = "PASS" if c.passed else "FAIL"
        lines.append(f"{tag}  {c.name}" + (f"  ({c.detail})" if c.detail else ""))
    if error:
        lines.append(f"ERROR  {error}")
    lines.append(f"status: {status}")
    return lines


def cmd_list(args) -> int:
    for name, anchor in list_experiments():
        print(f"{name:22s} {anchor}")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        raw = read_config(args.config)
        if args.seed is not None:
            raw["seed"] = str(args.seed)
        if args.grid_n is not None:
            raw["n"] = str(args.grid_n)
        if args.grid_l is not None:
            raw["L"] = str(args.grid_l)
        if "experiment" not in raw:
            raise ConfigError("config must name an experiment; valid names: " + ", ".join(EXPERIMENTS))
        cfg = ExperimentConfig.from_mapping(raw).resolved()
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_resolved(cfg, out / "config.resolved")
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    spec = EXPERIMENTS[cfg.experiment]
    table = new_table(cfg.experiment)
    csv_path = out / f"{cfg.experiment}.csv"
    try:
        res = run_experiment(cfg, table)
    except (ConfigError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        traceback.print_exc(file=sys.stderr)
        try:
            emit_csv(table, csv_path)
        except ValueError:
            pass
        lines = _summary_lines(spec.name, spec.anchor, [], "FAIL", f"{type(exc).__name__}: {exc}")
        (out / "summary.txt").write_text("\n".join(lines) + "\n")
        print("\n".join(lines))
        return EXIT_FAIL
    emit_csv(res.table, csv_path)
    status = ("PASS" if res.passed else "FAIL") + (" (vacuous)" if res.vacuous else "")
    lines = _summary_lines(res.name, res.anchor, res.checks, status)
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK if res.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="beurling-morrey",
                                 description="Numerical experiments for the Beurling transform on weighted Morrey spaces.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print experiment names and anchors").set_defaults(func=cmd_list)
    run = sub.add_parser("run", help="run the experiment named in a config file")
    run.add_argument("--config", required=True, help="flat key = value config file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, help="override the RNG seed (unsigned 64-bit)")
    run.add_argument("--grid-n", type=int, help="override samples per axis")
    run.add_argument("--grid-l", type=float, help="override the window half-width L")
    run.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
