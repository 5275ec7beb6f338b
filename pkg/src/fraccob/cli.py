"""Command line front end: ``fraccob table|traj|verify|mlf``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Any, Literal

import numpy as np

from fraccob.cobweb import (
    DemandModel,
    SupplyModel,
    TimeGrid,
    derive,
    price_at,
    trajectory,
)
from fraccob.errors import FraccobError
from fraccob.mlf import MLArgument, ml_eval
from fraccob.oracle import residual

DEFAULT_NU = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_PRECISION = 6


@dataclass(frozen=True)
class RunConfig:
    model: Literal["demand", "supply"] = "demand"
    alpha: float | None = None
    beta: float | None = None
    alpha1: float | None = None
    beta1: float | None = None
    delta: float = 1.0
    mu: tuple[float, ...] = ()
    nu: tuple[float, ...] = DEFAULT_NU
    c: float | None = None
    times: tuple[float, ...] = ()
    t_start: float | None = None
    t_end: float | None = None
    points: int = 400
    log: bool = True
    h: float = 1e-2
    format: Literal["csv", "json"] = "csv"
    out: str | None = None
    precision: int = DEFAULT_PRECISION

    def build(self, mu: float, nu: float) -> DemandModel:
        missing = [
            k for k in ("alpha", "beta", "alpha1", "beta1", "c") if getattr(self, k) is None
        ]
        if missing:
            raise ConfigError("missing " + ", ".join("--" + k for k in missing))
        common = dict(
            alpha=self.alpha,
            beta=self.beta,
            alpha1=self.alpha1,
            beta1=self.beta1,
            mu=mu,
            nu=nu,
            c=self.c,
        )
        if self.model == "supply":
            return SupplyModel(**common, delta=self.delta)
        return DemandModel(**common)

    def time_points(self) -> np.ndarray:
        if self.times:
            return np.asarray(self.times, dtype=np.float64)
        if self.t_start is None or self.t_end is None:
            raise ConfigError("give --times or both --t-start and --t-end")
        return TimeGrid(self.t_start, self.t_end, self.points, self.log).times()

    def check(self) -> None:
        if not self.mu:
            raise ConfigError("need at least one --mu")
        if not self.nu:
            raise ConfigError("need at least one --nu")
        if self.precision < 1:
            raise ConfigError("--precision must be positive")


class ConfigError(FraccobError, ValueError):
    pass


def fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}g}"


# {{{ commands


@dataclass(frozen=True)
class Table:
    mu: float
    nu: tuple[float, ...]
    times: tuple[float, ...]
    cells: tuple[tuple[float, ...], ...]
    p_e: float


def cmd_table(cfg: RunConfig) -> list[Table]:
    """One table per mu: rows are nu values, columns are times."""
    cfg.check()
    times = tuple(float(t) for t in cfg.time_points())
    tables = []
    for mu in cfg.mu:
        rows = []
        p_e = math.nan
        for nu in cfg.nu:
            m = cfg.build(mu, nu)
            d = derive(m)
            p_e = d.p_e
            rows.append(tuple(price_at(d, m.c, t) for t in times))
        tables.append(Table(mu, tuple(cfg.nu), times, tuple(rows), p_e))
    return tables


def cmd_traj(cfg: RunConfig) -> list[tuple[float, float, float, float]]:
    """Long format rows ``(mu, nu, t, p)``."""
    cfg.check()
    times = cfg.time_points()
    rows = []
    for mu in cfg.mu:
        for nu in cfg.nu:
            m = cfg.build(mu, nu)
            tr = trajectory(derive(m), m.c, times)
            rows.extend((mu, nu, float(t), float(p)) for t, p in zip(tr.times, tr.prices))
    return rows


def cmd_verify(cfg: RunConfig) -> list[dict[str, Any]]:
    """Residual of the governing equation at ``h`` and ``h/2``."""
    cfg.check()
    start = 0.5 if cfg.t_start is None else cfg.t_start
    end = 20.0 if cfg.t_end is None else cfg.t_end
    reports = []
    for mu in cfg.mu:
        for nu in cfg.nu:
            m = cfg.build(mu, nu)
            d = derive(m)
            coarse = residual(d, m.c, (start, end), cfg.h)
            fine = residual(d, m.c, (start, end), cfg.h / 2)
            ratio = (
                coarse.max_residual / fine.max_residual if fine.max_residual > 0 else math.inf
            )
            reports.append(
                {
                    "model": cfg.model,
                    "mu": mu,
                    "nu": nu,
                    "h": cfg.h,
                    "max_residual": coarse.max_residual,
                    "max_residual_half_step": fine.max_residual,
                    "refinement_ratio": ratio,
                    "grid": coarse.times.tolist(),
                    "residuals": coarse.residuals.tolist(),
                }
            )
    return reports


def cmd_mlf(mu: float, gamma: float, z: float) -> float:
    return ml_eval(MLArgument(mu, gamma, z))


# }}}


# {{{ rendering


def render_table(tables: list[Table], cfg: RunConfig) -> str:
    p = cfg.precision
    if cfg.format == "json":
        return json.dumps(
            [
                {
                    "model": cfg.model,
                    "mu": tb.mu,
                    "nu": list(tb.nu),
                    "times": list(tb.times),
                    "p": [list(r) for r in tb.cells],
                    "p_e": tb.p_e,
                }
                for tb in tables
            ],
            indent=2,
        )

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    several = len(tables) > 1
    for tb in tables:
        head = ["nu", *(fmt(t, p) for t in tb.times), "p_e"]
        w.writerow(["mu", *head] if several else head)
        for nu, row in zip(tb.nu, tb.cells):
            line = [fmt(nu, p), *(fmt(x, p) for x in row), fmt(tb.p_e, p)]
            w.writerow([fmt(tb.mu, p), *line] if several else line)
    return buf.getvalue()


def render_traj(rows: list[tuple[float, float, float, float]], cfg: RunConfig) -> str:
    p = cfg.precision
    several = len(cfg.mu) > 1
    if cfg.format == "json":
        keys = ("mu", "nu", "t", "p")
        return json.dumps([dict(zip(keys, r)) for r in rows], indent=2)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mu", "nu", "t", "p"] if several else ["nu", "t", "p"])
    for mu, nu, t, price in rows:
        cells = [fmt(nu, p), fmt(t, p), fmt(price, p)]
        w.writerow([fmt(mu, p), *cells] if several else cells)
    return buf.getvalue()


def render_verify(reports: list[dict[str, Any]]) -> str:
    return json.dumps(reports[0] if len(reports) == 1 else reports, indent=2)


# }}}


# {{{ argument handling


def _floats(values: Sequence[str] | None) -> tuple[float, ...] | None:
    if values is None:
        return None
    out = []
    for v in values:
        try:
            out.extend(float(x) for x in v.split(",") if x.strip())
        except ValueError:
            raise ConfigError(f"not a number list: {v!r}") from None
    return tuple(out)


def _common(p: argparse.ArgumentParser) -> None:
    # defaults stay None so that a config file can fill them in
    p.add_argument("--config", help="JSON file with any of the options below")
    p.add_argument("--model", choices=["demand", "supply"])
    for name in ("alpha", "beta", "alpha1", "beta1", "delta", "c"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--mu", nargs="+", help="comma or space separated list")
    p.add_argument("--nu", nargs="+", help="comma or space separated list")
    p.add_argument("--times", nargs="+", help="explicit sampling times")
    p.add_argument("--t-start", dest="t_start", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--log", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--precision", type=int, help="significant digits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraccob",
        description="Hilfer fractional cobweb models: tables, trajectories, checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("table", help="price table, rows nu and columns t"))
    _common(sub.add_parser("traj", help="long format trajectories (nu, t, p)"))
    verify = sub.add_parser("verify", help="residual of the governing equation")
    _common(verify)
    verify.add_argument("--h", type=float, help="grid step (default 0.01)")

    mlf = sub.add_parser("mlf", help="evaluate E_{mu,gamma}(z)")
    mlf.add_argument("words", nargs="*", help=argparse.SUPPRESS)
    mlf.add_argument("--mu", type=float, required=True)
    mlf.add_argument("--gamma", type=float, default=1.0)
    mlf.add_argument("--z", type=float, required=True)
    mlf.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    return parser


_LIST_KEYS = ("mu", "nu", "times")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the ``--config`` file and explicit flags, in that order."""
    values: dict[str, Any] = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
        for key, val in loaded.items():
            key = key.replace("-", "_")
            if key in _LIST_KEYS:
                val = tuple(float(v) for v in (val if isinstance(val, list) else [val]))
            values[key] = val

    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        values[key] = _floats(val) if key in _LIST_KEYS else val

    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigError("unknown option(s): " + ", ".join(sorted(unknown)))
    return replace(RunConfig(), **values)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "mlf":
            if args.words not in ([], ["eval"]):
                parser.error(f"unexpected arguments: {' '.join(args.words)}")
            value = cmd_mlf(args.mu, args.gamma, args.z)
            print(fmt(value, args.precision))
            return 0

        cfg = resolve_config(args)
        if args.command == "table":
            _emit(render_table(cmd_table(cfg), cfg), cfg.out)
        elif args.command == "traj":
            _emit(render_traj(cmd_traj(cfg), cfg), cfg.out)
        else:
            _emit(render_verify(cmd_verify(cfg)), cfg.out)
    except (FraccobError, OSError, json.JSONDecodeError) as exc:
        print(f"fraccob: error: {exc}", file=sys.stderr)
        return 1
    return 0


# }}}


if __name__ == "__main__":
    sys.exit(main())
