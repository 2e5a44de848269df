"""``mimocap`` command-line interface.

Every command resolves a :class:`~mimocap.config.RunConfig` (defaults, then
``--config``, then ``--set`` and the shortcut flags), computes one result
table, and writes it as CSV or JSON with the resolved config embedded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__, analysis, capacity, checks, montecarlo, randmat
from ._backend import name as backend_name
from .config import CSV_META_PREFIX, RunConfig, resolve
from .errors import (
    BoundaryOptimumWarning,
    InvalidParameter,
    MultipleMaximaWarning,
    NumericFailure,
    UnsupportedCombination,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} cells, table has {len(self.columns)} columns")
        self.rows.append([_cell(v) for v in values])

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_META_PREFIX + json.dumps(self.metadata, sort_keys=True) + "\n")
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(self.columns)
        out.writerows([_csv_cell(v) for v in row] for row in self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"metadata": self.metadata, "columns": self.columns, "rows": self.rows}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def _cell(v):
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # shortest round-trip form, full precision
    return str(v)


def _metadata(cfg: RunConfig, command: str) -> dict:
    return {
        "command": command,
        "config": cfg.to_dict(),
        "version": __version__,
        "seed": cfg.seed,
        "backend": backend_name,
    }


def _analytic_for(cfg: RunConfig, detector: str) -> bool:
    if cfg.analytic == "false":
        return False
    if detector != "mmse":
        if cfg.analytic == "true":
            raise UnsupportedCombination(
                f"no analytic model for detector {detector!r}; set analytic=auto or false"
            )
        return False
    return True


def _rho_grid(cfg: RunConfig):
    return np.geomspace(cfg.rho_min, cfg.rho_max, cfg.rho_points)


# ---------------------------------------------------------------------------
# commands


def cmd_sinr_cdf(cfg: RunConfig) -> ResultTable:
    """Analytic and empirical SINR CDFs on a grid per (m, detector, K)."""
    cols = ["m", "detector", "K", "sinr", "cdf_analytic"] + (["cdf_empirical"] if cfg.empirical else [])
    table = ResultTable(cols, metadata=_metadata(cfg, "sinr-cdf"))
    for sc in cfg.scenarios():
        use_analytic = _analytic_for(cfg, sc.detector)
        for K in cfg.K:
            samples = None
            if cfg.empirical:
                samples = montecarlo.sample_sinr(sc, K, cfg.trials, cfg.seed, workers=cfg.workers)
                lo, hi = float(samples.min()), float(samples.max())
            else:
                fit = analysis.sinr_gamma_fit(K, sc) if K else None
                lo, hi = _analytic_span(sc, K, fit)
            grid = np.geomspace(lo, hi, cfg.cdf_points)
            ana = _analytic_cdf(sc, K, grid) if use_analytic else [None] * grid.size
            emp = montecarlo.EmpiricalCdf(samples)(grid) if samples is not None else None
            for i, x in enumerate(grid):
                row = [sc.m, sc.detector, K, x, ana[i]]
                if emp is not None:
                    row.append(emp[i])
                table.add(*row)
    return table


def _analytic_cdf(sc, K, x):
    if K == 0:
        return randmat.lambda_cdf(x / sc.snr, sc.m)
    return analysis.sinr_gamma_fit(K, sc).cdf(x)


def _analytic_span(sc, K, fit):
    from scipy import stats

    if fit is None:
        e1 = randmat.lambda_moments(sc.m, 1)
        return 1e-3 * sc.snr * e1, 10.0 * sc.snr * e1
    return tuple(float(v) for v in stats.gamma.ppf([1e-4, 1 - 1e-4], fit.a, scale=fit.b))


def cmd_moments(cfg: RunConfig) -> ResultTable:
    """SINR mean and second moment per (m, detector, K)."""
    cols = ["m", "detector", "K", "mean_analytic", "m2_analytic"]
    if cfg.empirical:
        cols += ["mean_empirical", "m2_empirical"]
    table = ResultTable(cols, metadata=_metadata(cfg, "moments"))
    for sc in cfg.scenarios():
        use_analytic = _analytic_for(cfg, sc.detector)
        for K in cfg.K:
            mean_a = m2_a = None
            if use_analytic:
                mo = analysis.sinr_moments(K, sc)
                mean_a, m2_a = mo.mean, mo.second_moment
            row = [sc.m, sc.detector, K, mean_a, m2_a]
            if cfg.empirical:
                s = montecarlo.sample_sinr(sc, K, cfg.trials, cfg.seed, workers=cfg.workers)
                row += [float(np.mean(s)), float(np.mean(s * s))]
            table.add(*row)
    return table


def cmd_capacity_sweep(cfg: RunConfig) -> ResultTable:
    """Capacity against active-link density per (m, detector)."""
    cols = ["m", "detector", "rho0", "capacity_analytic"] + (["capacity_empirical"] if cfg.empirical else [])
    table = ResultTable(cols, metadata=_metadata(cfg, "capacity-sweep"))
    grid = _rho_grid(cfg)
    for sc in cfg.scenarios():
        use_analytic = _analytic_for(cfg, sc.detector)
        outage = montecarlo.OutageTable(sc, cfg.trials, cfg.seed, cfg.workers) if cfg.empirical else None
        for rho in grid:
            ana = capacity.network_capacity(rho, sc) if use_analytic else None
            row = [sc.m, sc.detector, rho, ana]
            if outage is not None:
                row.append(capacity.network_capacity(rho, sc, outage))
            table.add(*row)
    return table


def _optimum(sc, cfg, outage):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rho, c = capacity.optimal_density(sc, cfg.rho_min, cfg.rho_max, outage=outage, n_grid=cfg.rho_points)
    kinds = {w.category for w in caught}
    for w in caught:
        print(f"warning: m={sc.m} {sc.detector}: {w.message}", file=sys.stderr)
    return rho, c, BoundaryOptimumWarning in kinds, MultipleMaximaWarning in kinds


def cmd_optimal_density(cfg: RunConfig) -> ResultTable:
    """Capacity-maximizing density per (m, detector, method)."""
    cols = ["m", "detector", "method", "rho_star", "c_star", "boundary", "multiple_maxima"]
    if cfg.L is not None:
        cols += ["p_t_star", "saturated"]
    table = ResultTable(cols, metadata=_metadata(cfg, "optimal-density"))
    for sc in cfg.scenarios():
        runs = []
        if _analytic_for(cfg, sc.detector):
            runs.append(("analytic", None))
        if cfg.empirical:
            runs.append(("empirical", montecarlo.OutageTable(sc, cfg.trials, cfg.seed, cfg.workers)))
        for method, outage in runs:
            rho, c, boundary, multi = _optimum(sc, cfg, outage)
            row = [sc.m, sc.detector, method, rho, c, boundary, multi]
            if cfg.L is not None:
                row += list(capacity.transmission_probability(rho, cfg.L))
            table.add(*row)
    return table


def cmd_validate(cfg: RunConfig) -> ResultTable:
    """Oracle and invariant checks; ``passed`` is 1 or 0 per row."""
    table = ResultTable(["check", "value", "bound", "passed"], metadata=_metadata(cfg, "validate"))
    for r in checks.run_all(cfg):
        table.add(r.name, r.value, r.bound, r.passed)
    return table


COMMANDS = {
    "sinr-cdf": cmd_sinr_cdf,
    "moments": cmd_moments,
    "capacity-sweep": cmd_capacity_sweep,
    "optimal-density": cmd_optimal_density,
    "validate": cmd_validate,
}

HELP = {
    "sinr-cdf": "analytic and empirical SINR CDFs",
    "moments": "SINR mean and second moment",
    "capacity-sweep": "capacity against active-link density",
    "optimal-density": "capacity-maximizing density",
    "validate": "oracle and invariant checks",
}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value file, or a table emitted earlier")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], dest="overrides",
                        help="override one config key (repeatable)")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per interferer count")

    parser = argparse.ArgumentParser(prog="mimocap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def _overrides(args) -> list:
    out = list(args.overrides)
    for key in ("format", "seed", "trials"):
        v = getattr(args, key)
        if v is not None:
            out.append(f"{key}={v}")
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args.config, _overrides(args))
        table = COMMANDS[args.command](cfg)
    except (InvalidParameter, UnsupportedCombination) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = table.render(cfg.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "validate" and not all(table.column("passed")):
        failed = [r[0] for r in table.rows if not r[3]]
        print("validation failed: " + "; ".join(failed), file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
