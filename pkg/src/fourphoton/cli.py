"""Command-line entry point: ``fourphoton <subcommand>``.

Subcommands: ``table1``, ``figure2``, ``sweep``, ``probabilities``,
``validate-unitary``. Tables are written as CSV (``#`` metadata lines, then a
header) or JSON. The exit status is 0 only if every normalisation check
passes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .engine import (
    NORMALIZATION_TOL,
    TABULATED_EVENTS,
    event_index,
    event_order,
    p_distinguishable,
    p_indistinguishable_closed,
    simulate,
)
from .experiments import NM, UM, ConfigError, load_config, resolve_workers, run_scenario
from .multiport import UnitaryFileError, build_four_port, load_unitary, validate
from .source import ALL_PATTERNS, COMPONENTS, SPEED_OF_LIGHT, gram_schmidt, display_label, setting_weights, wavelength_to_spec

EXIT_CHECK_FAILED = 3


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def event_str(s) -> str:
    return "(" + ",".join(str(c) for c in s) + ")"


def pattern_column(pattern) -> str:
    return "W_" + "".join(str(i) for i in display_label(pattern))


@dataclass
class OutputTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    # (name, residual) pairs; every residual must stay below NORMALIZATION_TOL
    checks: list = field(default_factory=list)

    def add_row(self, row) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(self.columns)}")
        self.rows.append(list(row))

    def failed_checks(self) -> list:
        return [(name, r) for name, r in self.checks if not abs(r) <= NORMALIZATION_TOL]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [[float(v) if isinstance(v, np.floating) else v for v in row] for row in self.rows]
        return json.dumps({"metadata": self.metadata, "columns": self.columns, "rows": rows}, indent=2)


def read_csv_table(text: str) -> OutputTable:
    """Parse a CSV written by :meth:`OutputTable.to_csv`; numeric fields become floats."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = []
    for rec in reader:
        row = []
        for v in rec:
            try:
                row.append(float(v))
            except ValueError:
                row.append(v)
        rows.append(row)
    return OutputTable(columns, rows, meta)


def _base_metadata(**extra) -> dict:
    meta = {"program": "fourphoton", "version": __version__}
    meta.update(extra)
    return meta


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_table1(alpha: float = 0.0, phi: float = 0.0, lambda0: float = 780 * NM,
               delta_lambda: float = 5 * NM) -> OutputTable:
    spec = wavelength_to_spec(lambda0, delta_lambda)
    dist = simulate(spec, build_four_port(alpha, phi))
    table = OutputTable(
        ["label", "event", "P_dist", "P_dist_exact", "P_id_closed", "P_id_engine"],
        metadata=_base_metadata(table="table1", alpha_rad=fmt(float(alpha)), phi_rad=fmt(float(phi)),
                                times="all equal (fully indistinguishable)"),
    )
    for s in TABULATED_EVENTS:
        pd = p_distinguishable(s)
        table.add_row([f"s{event_index(s)}", event_str(s), float(pd), str(pd),
                       p_indistinguishable_closed(s, alpha, phi), dist[s]])
        table.checks.append((f"closed form vs engine {event_str(s)}", dist[s] - p_indistinguishable_closed(s, alpha, phi)))
    table.checks.append(("normalization", dist.total() - 1))
    return table


FIGURE2_SETTINGS = (("P_id_phi0_alpha0", 0.0, 0.0), ("P_id_phi0_alphapi4", math.pi / 4, 0.0),
                    ("P_id_phipi4_alpha0", 0.0, math.pi / 4))


def cmd_figure2() -> OutputTable:
    spec = wavelength_to_spec(780 * NM, 5 * NM)
    dists = [simulate(spec, build_four_port(a, p)) for _, a, p in FIGURE2_SETTINGS]
    table = OutputTable(["index", "event", "P_dist"] + [name for name, _, _ in FIGURE2_SETTINGS],
                        metadata=_base_metadata(table="figure2", times="all equal for the P_id columns",
                                                settings="; ".join(f"{n}: alpha={a:.17g}, phi={p:.17g}"
                                                                   for n, a, p in FIGURE2_SETTINGS)))
    for i, s in enumerate(event_order(), start=1):
        table.add_row([i, event_str(s), float(p_distinguishable(s))] + [d[s] for d in dists])
    table.checks.append(("normalization P_dist", float(sum(p_distinguishable(s) for s in event_order())) - 1))
    for (name, _, _), d in zip(FIGURE2_SETTINGS, dists):
        table.checks.append((f"normalization {name}", d.total() - 1))
    return table


GNUPLOT_TEMPLATE = """\
# gnuplot template for {csv}
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set xlabel 'sweep value [um]'
set ylabel 'event probability'
plot '{csv}' using 'sweep_um':'P_35' with lines title 's35 (1,1,1,1)', \\
     '' using 'sweep_um':'P_14' with lines title 's14 (0,1,0,3)', \\
     '' using 'sweep_um':'P_21' with lines title 's21 (0,2,0,2)'{envelopes}
"""


def sweep_table(config, rows) -> OutputTable:
    events = event_order()
    n = len(events)
    columns = ["sweep_um", "x1_um", "x2_um", "x3_um", "x4_um"] + [f"P_{i}" for i in range(1, n + 1)]
    with_env = bool(config.phi_samples)
    if with_env:
        columns += [f"Pmin_{i}" for i in range(1, n + 1)] + [f"Pmax_{i}" for i in range(1, n + 1)]
    columns += [pattern_column(p) for p in ALL_PATTERNS]
    meta = _base_metadata(**{k: fmt(v) for k, v in config.metadata().items()})
    meta["events"] = " ".join(f"P_{i}={event_str(s)}" for i, s in enumerate(events, start=1))
    meta["setting_weights"] = "port-level distinguishability settings of the input state"
    table = OutputTable(columns, metadata=meta)
    for row in rows:
        scale = 1.0 if config.scenario == "custom" else 1 / UM
        rec = [row.sweep_value * scale] + [x / UM for x in row.path_lengths] + row.probabilities.tolist()
        if with_env:
            rec += row.envelope_min.tolist() + row.envelope_max.tolist()
        rec += [row.setting_weights[p] for p in ALL_PATTERNS]
        table.add_row(rec)
        table.checks.append((f"normalization at {fmt(row.sweep_value)}", float(row.probabilities.sum()) - 1))
        table.checks.append((f"setting weights at {fmt(row.sweep_value)}", row.setting_weights.total() - 1))
    return table


def cmd_sweep(config_path, output_path, workers: int | None = None, emit_plot_script: bool = False) -> OutputTable:
    config = load_config(config_path)
    rows = run_scenario(config, workers=resolve_workers(workers))
    table = sweep_table(config, rows)
    out = Path(output_path)
    out.write_text(table.to_csv())
    if emit_plot_script:
        env = ""
        if config.phi_samples:
            env = ", \\\n     '' using 'sweep_um':'Pmin_14':'Pmax_14' with filledcurves fs transparent solid 0.3 notitle"
        out.with_suffix(".gp").write_text(GNUPLOT_TEMPLATE.format(csv=out.name, envelopes=env))
    return table


def cmd_probabilities(path_lengths=None, times=None, alpha: float = 0.0, phi: float = 0.0, unitary=None,
                      lambda0: float = 780 * NM, delta_lambda: float = 5 * NM, components=COMPONENTS) -> OutputTable:
    """Event probabilities at a single configuration.

    Give either ``path_lengths`` (metres) or ``times`` (seconds). ``unitary``
    is a path to a unitary file; otherwise the four-port ``U(alpha, phi)`` is
    used.
    """
    if (path_lengths is None) == (times is None):
        raise ValueError("give exactly one of path_lengths or times")
    if path_lengths is None:
        path_lengths = [t * SPEED_OF_LIGHT for t in times]
    if len(path_lengths) != 4:
        raise ValueError(f"need 4 path lengths or times, got {len(path_lengths)}")
    spec = wavelength_to_spec(lambda0, delta_lambda, path_lengths)
    if unitary is not None:
        u = load_unitary(unitary)
        if u.shape != (4, 4):
            raise UnitaryFileError(f"expected a 4x4 unitary, got {u.shape[0]}x{u.shape[1]}")
        u_desc = str(unitary)
    else:
        u = build_four_port(alpha, phi)
        u_desc = f"four-port alpha={alpha:.17g} phi={phi:.17g}"
    exp = gram_schmidt(spec)
    dist = simulate(spec, u, components)
    weights = setting_weights(exp)
    residual = dist.total() - 1
    meta = _base_metadata(
        lambda0_nm=fmt(lambda0 / NM), delta_lambda_fwhm_nm=fmt(delta_lambda / NM), unitary=u_desc,
        path_lengths_um=" ".join(fmt(x / UM) for x in path_lengths), components=",".join(components),
        normalization_residual=fmt(residual),
    )
    for label, w in weights.labelled().items():
        meta[f"weight {label}"] = fmt(w)
    table = OutputTable(["index", "event", "probability"], metadata=meta)
    for i, (s, p) in enumerate(dist, start=1):
        table.add_row([i, event_str(s), p])
    table.checks.append(("normalization", residual))
    return table


def cmd_validate_unitary(path) -> dict:
    u = load_unitary(path)
    report = validate(u)
    return {"path": str(path), "n": u.shape[0], **report.as_dict(), "loaded_unitary_tol": 1e-8}


# ---------------------------------------------------------------------------
# argparse plumbing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fourphoton", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_opts(p):
        p.add_argument("--out", help="write the table here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def source_opts(p):
        p.add_argument("--lambda0-nm", type=float, default=780.0, help="central wavelength [nm]")
        p.add_argument("--dlambda-nm", type=float, default=5.0, help="spectral FWHM [nm]")

    p = sub.add_parser("table1", help="closed forms vs engine for the five tabulated events")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    source_opts(p)
    output_opts(p)

    p = sub.add_parser("figure2", help="all 35 events, distinguishable and three indistinguishable settings")
    output_opts(p)

    p = sub.add_parser("sweep", help="run a scenario JSON configuration and write CSV")
    p.add_argument("config", help="scenario JSON file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: $SIM_THREADS, 0 = all)")
    p.add_argument("--emit-plot-script", action="store_true", help="also write a gnuplot template next to the CSV")

    p = sub.add_parser("probabilities", help="event probabilities at one configuration")
    for j in range(1, 5):
        p.add_argument(f"--x{j}-um", type=float, default=None, help=f"path length of port {j} [um]")
    p.add_argument("--times-fs", type=float, nargs="+", help="four arrival times [fs] instead of path lengths")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--unitary", help="unitary file replacing the four-port array")
    p.add_argument("--components", default=",".join(COMPONENTS),
                   help="comma-separated subset of " + ",".join(COMPONENTS))
    source_opts(p)
    output_opts(p)

    p = sub.add_parser("validate-unitary", help="parse and validate a unitary file")
    p.add_argument("path")
    return parser


def _emit(table: OutputTable, args) -> None:
    text = table.to_json() + "\n" if args.format == "json" else table.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "table1":
            table = cmd_table1(args.alpha, args.phi, args.lambda0_nm * NM, args.dlambda_nm * NM)
            _emit(table, args)
        elif args.command == "figure2":
            table = cmd_figure2()
            _emit(table, args)
        elif args.command == "sweep":
            table = cmd_sweep(args.config, args.out, args.threads, args.emit_plot_script)
        elif args.command == "probabilities":
            xs = [getattr(args, f"x{j}_um") for j in range(1, 5)]
            given = [x for x in xs if x is not None]
            if args.times_fs is not None:
                if given:
                    parser.error("use either --x1-um..--x4-um or --times-fs, not both")
                if len(args.times_fs) != 4:
                    parser.error(f"--times-fs needs 4 values, got {len(args.times_fs)}")
                kw = {"times": [t * 1e-15 for t in args.times_fs]}
            else:
                if 0 < len(given) < 4:
                    parser.error("give all four of --x1-um..--x4-um")
                kw = {"path_lengths": [(x or 0.0) * UM for x in xs]}
            components = tuple(c.strip() for c in args.components.split(",") if c.strip())
            if not components or set(components) - set(COMPONENTS):
                parser.error(f"--components must be a subset of {','.join(COMPONENTS)}")
            table = cmd_probabilities(alpha=args.alpha, phi=args.phi, unitary=args.unitary,
                                      lambda0=args.lambda0_nm * NM, delta_lambda=args.dlambda_nm * NM,
                                      components=components, **kw)
            _emit(table, args)
        else:
            report = cmd_validate_unitary(args.path)
            print(json.dumps(report, indent=2))
            return 0 if report["unitary"] else EXIT_CHECK_FAILED
    except (ConfigError, UnitaryFileError) as err:
        print(f"fourphoton: error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"fourphoton: I/O error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"fourphoton: error: {err}", file=sys.stderr)
        return 2

    failed = table.failed_checks()
    for name, residual in failed:
        print(f"fourphoton: check failed: {name}: residual {residual:.3e}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else 0


if __name__ == "__main__":
    sys.exit(main())
