"""Command-line entry point: ``optsample <command> --config <file> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bounds import APPROXIMATION_NOTE, BernsteinParams, covariance_bound, jittered_expected_info, min_eigenvalue_hermitian, solve_t
from .config import load_config
from .estimator import build_regression, ls_estimate
from .exceptions import CampaignError, ConfigError, NotConverged, RankDeficient, VacuousBound
from .experiments import design_measure, emit_results, run_montecarlo, samples_to_match
from .infodesign import doptimal_density, greedy_schedule, kw_statistic, uniform_measure
from .signals import amplitude_matrix
from .systems import simulate_measurements

log = logging.getLogger("optsample")


def _out(path):
    return sys.stdout if path in (None, "-") else Path(path)


def cmd_design_greedy(args, cfg):
    sched = greedy_schedule(cfg.input.basis, cfg.T, args.L or cfg.grid_L, args.n, cfg.ridge)
    io.write_schedule(_out(args.out), sched)
    return 0


def cmd_design_density(args, cfg):
    grid = uniform_measure(cfg.T, cfg.density_L).grid
    try:
        measure = doptimal_density(cfg.input.basis, grid, cfg.density_max_iters, cfg.kw_tol, horizon=cfg.T)
        status = 0
    except NotConverged as exc:
        measure, status = exc.measure, 3
        print(f"error: {exc}", file=sys.stderr)
    io.write_measure(_out(args.out), measure)
    print(f"kw_statistic={kw_statistic(measure, cfg.input.basis)!r} dim={cfg.input.basis.dim}", file=sys.stderr)
    return status


def cmd_simulate(args, cfg):
    sched = io.read_schedule(args.schedule, horizon=cfg.T)
    seed = cfg.seed if args.seed is None else args.seed
    rec = simulate_measurements(cfg.plant, cfg.input, sched, cfg.sigma, seed, cfg.noise)
    io.write_measurements(_out(args.out), sched.times, rec.y)
    return 0


def cmd_estimate(args, cfg):
    sched = io.read_schedule(args.schedule, horizon=cfg.T)
    times, y = io.read_measurements(args.data)
    if times is not None and not np.allclose(np.sort(times), sched.times, rtol=0, atol=1e-12):
        raise ValueError(f"{args.data}: time column does not match schedule {args.schedule}")
    if times is not None:
        y = y[np.argsort(times, kind="stable")]
    est = ls_estimate(build_regression(cfg.input, sched), y)
    io.write_estimate(_out(args.out), est)
    return 0


def cmd_montecarlo(args, cfg):
    summary = run_montecarlo(cfg, threads=args.threads)
    out = Path(args.output_dir or cfg.output_dir)
    for path in emit_results(summary, out):
        log.info("wrote %s", path)
    names = [s.name for s in cfg.strategies]
    if "greedy" in names and "uniform" in names and cfg.N_sweep:
        n_ref = max(cfg.N_sweep)
        n_match = samples_to_match(summary, "greedy", "uniform", n_ref)
        print(f"greedy matches uniform N={n_ref} accuracy at N={n_match:.1f}")
    return 0


def cmd_bound(args, cfg):
    delta = cfg.delta if args.delta is None else args.delta
    basis = cfg.input.basis
    t = solve_t(BernsteinParams(basis.M, args.n, delta))
    measure = design_measure(cfg, cfg.bound_density)
    R0 = jittered_expected_info(measure, basis, args.n)
    lam = min_eigenvalue_hermitian(R0)
    try:
        trace = np.trace(covariance_bound(amplitude_matrix(cfg.input), R0, t, cfg.sigma)).real
        value = f"{trace!r} ({APPROXIMATION_NOTE})"
    except VacuousBound:
        value = "vacuous"
    print(f"N={args.n} delta={delta!r} t={t!r} lambda_min_R0={lam!r} bound_trace={value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="optsample", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", required=True, help="experiment config file")
        return sp

    design = sub.add_parser("design", help="build sampling designs")
    dsub = design.add_subparsers(dest="design_kind", required=True)
    g = with_config(dsub.add_parser("greedy", help="greedy D-optimized schedule"))
    g.add_argument("--n", type=int, required=True, help="number of samples")
    g.add_argument("--L", type=int, default=None, help="grid size (default: config grid_L)")
    g.add_argument("--out", default=None, help="schedule CSV (default: stdout)")
    g.set_defaults(func=cmd_design_greedy)
    d = with_config(dsub.add_parser("density", help="discretized D-optimal sampling density"))
    d.add_argument("--out", default=None, help="measure CSV (default: stdout)")
    d.set_defaults(func=cmd_design_density)

    s = with_config(sub.add_parser("simulate", help="simulate one noisy measurement record"))
    s.add_argument("--schedule", required=True)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_simulate)

    e = with_config(sub.add_parser("estimate", help="least-squares FRF estimate from data"))
    e.add_argument("--schedule", required=True)
    e.add_argument("--data", required=True, help="CSV with columns (t, y) or (y)")
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_estimate)

    m = with_config(sub.add_parser("montecarlo", help="run the full Monte Carlo campaign"))
    m.add_argument("--output-dir", default=None)
    m.add_argument("--threads", type=int, default=None)
    m.set_defaults(func=cmd_montecarlo)

    b = with_config(sub.add_parser("bound", help="high-probability covariance bound"))
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--delta", type=float, default=None)
    b.set_defaults(func=cmd_bound)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (ConfigError, RankDeficient, NotConverged, CampaignError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
