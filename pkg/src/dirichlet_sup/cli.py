"""Command-line harness: single computations and reproducible experiment grids.

Exit codes: 0 on success, 2 for usage errors or malformed configs, 3 when a
row breaks the sandwich ``lower_z <= estimate + gap <= l1``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

from . import bounds, dickman, montecarlo
from .numbertheory import psi, sieve_primes
from .polynomial import e_tau_spec

EXIT_OK, EXIT_USAGE, EXIT_SANDWICH = 0, 2, 3
TAU_RULES = ("pi(N)", "sqrt(N)", "rs-optimal")
FORMATS = ("json", "csv")


class ConfigError(ValueError):
    """Malformed experiment configuration."""


class SandwichViolation(RuntimeError):
    def __init__(self, row: "ResultRow"):
        super().__init__(f"sandwich violated at N={row.N}, tau={row.tau}, sigma={row.sigma}")
        self.row = row


def fmt_float(x: float) -> str:
    return "%.17g" % x


@dataclass(frozen=True)
class ExperimentConfig:
    N: list[int]
    tau: str | list[int]
    sigma: list[float]
    method: str = "z-exact"
    R: int = 100
    seed: int = 0
    output: str = "results.jsonl"
    format: str = "json"
    workers: int = 1
    grid_budget: int = 1024
    refine_steps: int = 1
    plot: str | None = None

    def __post_init__(self):
        if not self.N or not self.sigma:
            raise ConfigError("N and sigma grids must be nonempty")
        if any(int(n) != n or n < 2 for n in self.N):
            raise ConfigError("N values must be integers >= 2")
        if isinstance(self.tau, list):
            if len(self.tau) not in (1, len(self.N)) or any(int(t) != t or t < 1 for t in self.tau):
                raise ConfigError("explicit tau list must hold positive integers, one per N (or a single value)")
        elif self.tau not in TAU_RULES:
            raise ConfigError(f"tau rule must be a list or one of {TAU_RULES}")
        if any(not 0 <= s < 0.5 for s in self.sigma):
            raise ConfigError("sigma values must lie in [0, 1/2)")
        if self.method not in montecarlo.METHODS:
            raise ConfigError(f"method must be one of {montecarlo.METHODS}")
        if self.R < 1 or self.workers < 1:
            raise ConfigError("R and workers must be >= 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def tau_for(self, i: int, N: int):
        if isinstance(self.tau, list):
            return int(self.tau[0] if len(self.tau) == 1 else self.tau[i])
        return self.tau


@dataclass(frozen=True)
class ResultRow:
    N: int
    tau: int
    sigma: float
    method: str
    R: int
    seed: int
    estimate: float
    stderr: float
    gap: float
    lower_z: float
    l1: float
    thm11_upper: float
    thm11_lower: float
    ratio_to_rate: float

    def sandwich_ok(self, rtol: float = montecarlo.SANDWICH_RTOL) -> bool:
        slack = rtol * max(self.l1, 1.0)
        top = self.estimate + self.gap
        return self.lower_z <= top + slack and top <= self.l1 + slack

    def to_json(self) -> str:
        parts = []
        for f in fields(self):
            v = getattr(self, f.name)
            parts.append(f'"{f.name}": ' + (fmt_float(v) if isinstance(v, float) else json.dumps(v)))
        return "{" + ", ".join(parts) + "}"

    @classmethod
    def from_json(cls, line: str) -> "ResultRow":
        raw = json.loads(line)
        return cls(**{f.name: _coerce(f.type, raw[f.name]) for f in fields(cls)})

    def csv_cells(self) -> list[str]:
        return [fmt_float(v) if isinstance(v, float) else str(v) for v in astuple_shallow(self)]


def astuple_shallow(row) -> tuple:
    return tuple(getattr(row, f.name) for f in fields(row))


def _coerce(type_name, value):
    return {"int": int, "float": float, "str": str}.get(str(type_name), lambda v: v)(value)


CSV_HEADER = [f.name for f in fields(ResultRow)]
PLOT_HEADER = ["N", "tau", "sigma", "quantity", "value"]


def make_row(cfg: ExperimentConfig, N: int, tau_rule, sigma: float, table) -> ResultRow:
    tau = montecarlo.resolve_tau(tau_rule, N, table)
    spec = e_tau_spec(N, tau, table, sigma)
    rec = montecarlo.estimate_esup(
        spec, tau, cfg.method, cfg.R, cfg.seed,
        grid_budget=cfg.grid_budget, refine_steps=cfg.refine_steps, workers=cfg.workers,
    )
    lower = bounds.lower_thm11(N, tau, sigma, bounds.thm11_psi_star(N, tau, table)).value if tau >= 2 else 0.0
    row = ResultRow(
        N=N, tau=tau, sigma=float(sigma), method=cfg.method, R=cfg.R, seed=cfg.seed,
        estimate=rec.estimate, stderr=rec.stderr, gap=rec.gap, lower_z=rec.lower_z, l1=rec.l1,
        thm11_upper=bounds.upper_thm11(N, tau, sigma).value, thm11_lower=lower,
        ratio_to_rate=rec.estimate / (N ** (1 - sigma) / math.log(N)),
    )
    if rec.violations or not row.sandwich_ok():
        raise SandwichViolation(row)
    return row


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """All rows in grid order (N outer, sigma inner)."""
    table = sieve_primes(max(max(cfg.N), 2))
    return [
        make_row(cfg, int(N), cfg.tau_for(i, N), s, table)
        for i, N in enumerate(cfg.N)
        for s in cfg.sigma
    ]


def render(rows: Sequence[ResultRow], fmt: str) -> str:
    if fmt == "json":
        return "".join(r.to_json() + "\n" for r in rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(r.csv_cells() for r in rows)
    return buf.getvalue()


def render_plot(rows: Sequence[ResultRow]) -> str:
    """Tidy long-form CSV: one line per (row, quantity)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_HEADER)
    for r in rows:
        for q in ("estimate", "stderr", "gap", "lower_z", "l1", "thm11_upper", "thm11_lower", "ratio_to_rate"):
            w.writerow([r.N, r.tau, fmt_float(r.sigma), q, fmt_float(getattr(r, q))])
    return buf.getvalue()


# --- subcommands ---


def cmd_sieve(args) -> int:
    table = sieve_primes(args.limit)
    if args.count:
        print(len(table))
    else:
        print("\n".join(map(str, table.primes.tolist())))
    return EXIT_OK


def cmd_psi(args) -> int:
    if args.exact:
        print(psi(args.n, args.m))
    else:
        print(repr(args.n * dickman.psi_star_dickman(args.n, args.m)))
    return EXIT_OK


def cmd_rho(args) -> int:
    print(repr(float(dickman.rho(args.u))))
    return EXIT_OK


def cmd_bounds(args) -> int:
    N, tau, sigma = args.n, args.tau, args.sigma
    table = sieve_primes(N)
    if not 1 <= tau <= table.pi(N):
        raise ValueError(f"tau must lie in 1..pi(N) = {table.pi(N)}")
    out = {"case": bounds.thm11_case(N, tau), "thm11_upper": bounds.upper_thm11(N, tau, sigma).value}
    if tau >= 2:
        out["thm11_lower"] = bounds.lower_thm11(N, tau, sigma, bounds.thm11_psi_star(N, tau, table)).value
        lo, hi = bounds.bounds_thm12(N, tau, sigma, *bounds.thm12_psi_stars(N, tau, table))
        out.update(thm12_lower=lo.value, thm12_upper=hi.value, thm12_valid=lo.flags["valid"])
    out["l1"] = bounds.l1_bound(N, tau, sigma, table).value
    for k, v in out.items():
        print(f"{k}\t{fmt_float(v) if isinstance(v, float) else v}")
    return EXIT_OK


def cmd_esup(args) -> int:
    cfg = ExperimentConfig(
        N=[args.n], tau=[args.tau], sigma=[args.sigma], method=args.method, R=args.reps, seed=args.seed,
        workers=args.workers, grid_budget=args.grid_budget,
    )
    table = sieve_primes(args.n)
    if args.tau > table.pi(args.n):
        raise ValueError(f"tau must lie in 1..pi(N) = {table.pi(args.n)}")
    row = make_row(cfg, args.n, args.tau, args.sigma, table)
    print(row.to_json())
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    if args.workers is not None:
        cfg = ExperimentConfig(**{**asdict(cfg), "workers": args.workers})
    rows = run_experiment(cfg)
    Path(cfg.output).write_text(render(rows, cfg.format))
    if cfg.plot:
        Path(cfg.plot).write_text(render_plot(rows))
    print(f"wrote {len(rows)} rows to {cfg.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirichlet-sup", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sieve", help="list primes up to a limit")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--count", action="store_true", help="print pi(limit) only")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("psi", help="count M-smooth integers in [2, N]")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--exact", action="store_true", help="exact count instead of N rho(log N / log M)")
    s.set_defaults(func=cmd_psi)

    s = sub.add_parser("rho", help="Dickman rho(u)")
    s.add_argument("--u", type=float, required=True)
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("bounds", help="evaluate the closed-form bounds (constants = 1)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--tau", type=int, required=True)
    s.add_argument("--sigma", type=float, default=0.0)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("esup", help="Monte Carlo estimate of E sup |D| on E_tau")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--tau", type=int, required=True)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--method", choices=montecarlo.METHODS, default="z-exact")
    s.add_argument("--reps", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--grid-budget", type=int, default=1024)
    s.set_defaults(func=cmd_esup)

    s = sub.add_parser("experiment", help="run a grid from a JSON config file")
    s.add_argument("config")
    s.add_argument("--workers", type=int, default=None, help="override the config thread count")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except SandwichViolation as exc:
        print(exc, file=sys.stderr)
        print(exc.row.to_json(), file=sys.stderr)
        return EXIT_SANDWICH
    except (ConfigError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
