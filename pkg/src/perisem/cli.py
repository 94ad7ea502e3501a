"""Batch experiment runner.

Subcommands
    simulate   write per-replicate jump records and coefficient estimates
    select     run the selection procedure over an (n, rho) matrix
    verify     check the risk bound cell by cell; nonzero exit on failure
    ingest     concatenate per-period increment files into one path
    grid-dump  tabulate the weight family for each configured horizon

Configuration is a flat ``key = value`` text file; repeat a key to build a
list (``n = 200`` on one line and ``n = 1000`` on the next).  Keys:

    signal      catalogue name (sine, parabola, ...) or file:PATH with
                one "j value" coefficient pair per line
    rho1 rho2 lambda jump_law      noise parameters (rademacher | gaussian)
    n           horizon, integer, repeatable
    rho         penalty factor in (0, 1/3), repeatable
    sigma_mode  known | estimated;  sigma = VALUE overrides the known value
                (default: the true noise intensity rho1^2 + lambda rho2^2)
    k_star epsilon                 optional grid overrides
    replicates seed j_tail threads

Exit status: 0 all checks passed, 1 a verification failed, 2 bad
configuration or I/O.  All randomness derives from the master seed, so a
rerun with the same config and seed reproduces every output byte.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import risk
from .estimator import CoefficientEstimates, PathObservation, segments_to_path
from .noise import GAUSSIAN, RADEMACHER, NoiseParams, replicate_rng, sigma_star, \
    simulate_coefficient_noise
from .selection import ESTIMATED, KNOWN, SelectionConfig, select
from .signals import SignalSpec, catalogue_signal
from .weights import build_grid


class ConfigError(ValueError):
    """Bad configuration or malformed input files (exit status 2)."""


@dataclass
class ExperimentConfig:
    signal: str = "sine"
    rho1: float = 1.0
    rho2: float = 1.0
    lam: float = 1.0
    jump_law: str = RADEMACHER
    n_values: list = field(default_factory=list)
    rho_values: list = field(default_factory=list)
    sigma_mode: str = ESTIMATED
    sigma: Optional[float] = None
    k_star: Optional[int] = None
    epsilon: Optional[float] = None
    replicates: int = 200
    seed: int = 0
    j_tail: int = risk.DEFAULT_J_TAIL
    threads: int = 1
    base_dir: Path = field(default_factory=Path)

    def noise(self) -> NoiseParams:
        try:
            return NoiseParams(self.rho1, self.rho2, self.lam, self.jump_law)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def load_signal(self) -> SignalSpec:
        try:
            if self.signal.startswith("file:"):
                path = Path(self.signal[5:])
                if not path.is_absolute():
                    path = self.base_dir / path
                return SignalSpec.from_file(path)
            return catalogue_signal(self.signal)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load signal {self.signal!r}: {exc}") from exc

    def selection_config(self, rho: float) -> SelectionConfig:
        try:
            if self.sigma_mode == KNOWN:
                sigma = self.sigma if self.sigma is not None else sigma_star(self.noise())
                return SelectionConfig(rho=rho, sigma_mode=KNOWN, sigma=sigma)
            return SelectionConfig(rho=rho, sigma_mode=ESTIMATED)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self, n: int):
        try:
            return build_grid(n, k_star=self.k_star, epsilon=self.epsilon)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self):
        if not self.rho_values:
            self.rho_values = [0.1]
        if not self.n_values:
            raise ConfigError("config needs at least one n value")
        for n in self.n_values:
            if n < 1:
                raise ConfigError(f"n must be a positive integer, got {n}")
            if self.sigma_mode == ESTIMATED and n < 4:
                raise ConfigError(f"estimated sigma mode needs n >= 4, got {n}")
        for rho in self.rho_values:
            if not 0.0 < rho < 1.0 / 3.0:
                raise ConfigError(f"rho must lie in (0, 1/3), got {rho}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.sigma_mode not in (KNOWN, ESTIMATED):
            raise ConfigError(f"sigma_mode must be known or estimated, "
                              f"got {self.sigma_mode!r}")
        if self.jump_law not in (RADEMACHER, GAUSSIAN):
            raise ConfigError(f"unknown jump_law {self.jump_law!r}")
        self.noise()


_INT_KEYS = {"n", "replicates", "seed", "j_tail", "threads", "k_star"}
_FLOAT_KEYS = {"rho1", "rho2", "lambda", "rho", "sigma", "epsilon"}


def parse_config(path) -> ExperimentConfig:
    """Read a flat key = value file; repeated keys accumulate into lists."""
    cfg = ExperimentConfig(base_dir=Path(path).resolve().parent)
    try:
        lines = Path(path).read_text(encoding="ascii").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            if key in _INT_KEYS:
                parsed = int(value)
            elif key in _FLOAT_KEYS:
                parsed = float(value)
            else:
                parsed = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
        _apply_key(cfg, key, parsed)
    cfg.validate()
    return cfg


_ALL_KEYS = {"signal", "jump_law", "sigma_mode", "rho1", "rho2", "sigma",
             "k_star", "epsilon", "replicates", "seed", "j_tail", "threads",
             "n", "rho", "lambda"}


def _apply_key(cfg: ExperimentConfig, key: str, parsed):
    if key == "n":
        cfg.n_values.append(parsed)
    elif key == "rho":
        cfg.rho_values.append(parsed)
    elif key == "lambda":
        cfg.lam = parsed
    else:
        setattr(cfg, key, parsed)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _resolve_threads(args, cfg: ExperimentConfig) -> int:
    threads = cfg.threads
    env = os.environ.get("PERISEM_THREADS")
    if env is not None:
        try:
            threads = int(env)
        except ValueError:
            raise ConfigError(f"PERISEM_THREADS must be an integer, got {env!r}")
    if args.threads is not None:
        threads = args.threads
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ConfigError(f"threads must be >= 0, got {threads}")
    return threads


# -- subcommands -------------------------------------------------------------

def run_simulate(cfg: ExperimentConfig, out: Path) -> int:
    noise = cfg.noise()
    signal = cfg.load_signal()
    for n in cfg.n_values:
        sub = out / f"sim_n{n}"
        sub.mkdir(parents=True, exist_ok=True)
        theta = signal.fourier_coefficients(n)
        for r in range(cfg.replicates):
            rng = replicate_rng(cfg.seed, r)
            xi, record = simulate_coefficient_noise(noise, n, n, rng)
            est = CoefficientEstimates(theta + xi / math.sqrt(n), n)
            est.to_csv(sub / f"estimates_r{r}.csv")
            record.to_csv(sub / f"jumps_r{r}.csv")
    return 0


def run_select(cfg: ExperimentConfig, out: Path) -> int:
    noise = cfg.noise()
    signal = cfg.load_signal()
    out.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    for n in cfg.n_values:
        grid = cfg.grid(n)
        j_sim = n if cfg.sigma_mode == ESTIMATED else \
            max(g.support_end for g in grid.members)
        theta = signal.fourier_coefficients(j_sim)
        estimates = []
        for r in range(cfg.replicates):
            rng = replicate_rng(cfg.seed, r)
            xi, _ = simulate_coefficient_noise(noise, n, j_sim, rng)
            estimates.append(CoefficientEstimates(theta + xi / math.sqrt(n), n))
        for rho in cfg.rho_values:
            sel_cfg = cfg.selection_config(rho)
            rows = []
            first_result = None
            for r, est in enumerate(estimates):
                result = select(est, grid, sel_cfg)
                if first_result is None:
                    first_result = result
                beta, t = result.chosen.label
                best_cost = min(c for _, _, c in result.cost_table)
                rows.append((r, beta, t, result.sigma_used, best_cost))
            tag = f"n{n}_rho{rho:g}"
            (out / f"selection_{tag}.json").write_text(first_result.to_json() + "\n",
                                                       encoding="ascii")
            with open(out / f"chosen_{tag}.csv", "w", encoding="ascii") as fh:
                fh.write("replicate,beta,t,sigma_used,cost\n")
                for r, beta, t, sig, c in rows:
                    fh.write(f"{r},{beta},{_fmt(t)},{_fmt(sig)},{_fmt(c)}\n")
            labels = [(beta, t) for _, beta, t, _, _ in rows]
            top = max(set(labels), key=lambda lab: (labels.count(lab), -lab[0], -lab[1]))
            summary_rows.append((n, rho, top[0], top[1],
                                 labels.count(top) / len(labels)))
    with open(out / "select_summary.csv", "w", encoding="ascii") as fh:
        fh.write("n,rho,top_beta,top_t,top_share\n")
        for n, rho, beta, t, share in summary_rows:
            fh.write(f"{n},{_fmt(rho)},{beta},{_fmt(t)},{_fmt(share)}\n")
    return 0


def run_verify(cfg: ExperimentConfig, out: Path, plot_data: bool = False,
               threads: int = 1) -> int:
    if cfg.replicates < 100:
        raise ConfigError("verify needs replicates >= 100 for a stable "
                          "Monte Carlo estimate")
    noise = cfg.noise()
    signal = cfg.load_signal()
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for n in cfg.n_values:
        grid = cfg.grid(n)
        for rho in cfg.rho_values:
            sel_cfg = cfg.selection_config(rho)
            report = risk.verify_oracle(signal, noise, n, grid, sel_cfg,
                                        cfg.replicates, cfg.seed,
                                        j_tail=cfg.j_tail, threads=threads)
            reports.append(report)
            tag = f"n{n}_rho{rho:g}"
            (out / f"oracle_{tag}.json").write_text(report.to_json() + "\n",
                                                    encoding="ascii")
    risk.write_report_csv(reports, out / "oracle_report.csv")
    if plot_data:
        with open(out / "dn_series.csv", "w", encoding="ascii") as fh:
            fh.write("rho,n,d_n,d_n_over_n025\n")
            for report in reports:
                d_n = report.constants.get("d_n")
                if d_n is None:
                    continue
                fh.write(f"{_fmt(report.rho)},{report.n},{_fmt(d_n)},"
                         f"{_fmt(d_n / report.n ** 0.25)}\n")
    return 0 if all(rep.holds for rep in reports) else 1


def run_ingest(segment_dir: Path, out: Path) -> int:
    files = sorted(Path(segment_dir).glob("*.csv"))
    if not files:
        raise ConfigError(f"no segment CSV files in {segment_dir}")
    segments = []
    for path in files:
        lines = path.read_text(encoding="ascii").splitlines()
        if not lines or lines[0].strip() != "dy":
            raise ConfigError(f"{path}: expected header 'dy'")
        try:
            values = np.array([float(x) for x in lines[1:] if x.strip()])
        except ValueError as exc:
            raise ConfigError(f"{path}: bad increment value: {exc}") from exc
        segments.append(values)
    widths = {seg.size for seg in segments}
    if len(widths) != 1:
        raise ConfigError(f"segments have mismatched grids: {sorted(widths)}")
    spu = widths.pop()
    if spu < 1:
        raise ConfigError("segments are empty")
    obs = segments_to_path([PathObservation(seg, spu, 1) for seg in segments])
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="ascii") as fh:
        fh.write("dy\n")
        for v in obs.increments:
            fh.write(_fmt(v) + "\n")
    return 0


def run_grid_dump(cfg: ExperimentConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    for n in cfg.n_values:
        cfg.grid(n).to_csv(out / f"grid_n{n}.csv")
    return 0


# -- entry point --------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perisem",
        description="Adaptive periodic-signal estimation: simulation, "
                    "selection, and risk-bound verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads, 0 = auto (env PERISEM_THREADS)")

    add_common(sub.add_parser("simulate", help="write estimate + jump CSVs"))
    add_common(sub.add_parser("select", help="run the selection procedure"))
    verify = sub.add_parser("verify", help="check the oracle risk bound")
    add_common(verify)
    verify.add_argument("--plot-data", action="store_true",
                        help="also emit the additive-constant growth series")
    ingest = sub.add_parser("ingest", help="concatenate per-period segments")
    ingest.add_argument("segment_dir", help="directory of per-period CSVs")
    ingest.add_argument("--out", required=True, help="output CSV path")
    add_common(sub.add_parser("grid-dump", help="tabulate the weight family"))
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ingest":
            return run_ingest(Path(args.segment_dir), Path(args.out))
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        threads = _resolve_threads(args, cfg)
        out = Path(args.out)
        if args.command == "simulate":
            return run_simulate(cfg, out)
        if args.command == "select":
            return run_select(cfg, out)
        if args.command == "verify":
            return run_verify(cfg, out, plot_data=args.plot_data, threads=threads)
        if args.command == "grid-dump":
            return run_grid_dump(cfg, out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ValueError as exc:
        # ConfigError and any parameter-combination error from the library
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
