"""Monte Carlo comparison of sampling strategies and CSV emission of the results."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .bounds import BernsteinParams, bound_sweep, covariance_bound, jittered_expected_info, solve_t
from .config import ExperimentConfig, Strategy
from .estimator import build_regression, ls_estimate
from .exceptions import CampaignError, RankDeficient, VacuousBound
from .infodesign import (
    DesignMeasure,
    doptimal_density,
    greedy_schedule,
    sample_schedule,
    uniform_measure,
    uniform_schedule,
)
from .signals import amplitude_matrix
from .systems import draw_noise, steady_state_output, true_theta

__all__ = [
    "CellSummary",
    "MonteCarloSummary",
    "run_montecarlo",
    "emit_results",
    "design_measure",
    "build_schedule",
    "samples_to_match",
    "thread_count",
]

log = logging.getLogger(__name__)

MAX_EXCLUDED_FRACTION = 0.01


@dataclass
class CellSummary:
    strategy: str
    N: int
    trace_cov: float
    mean_info_density: float
    bias_norm: float
    vacuous_bound_flag: bool
    bound_trace: float | None
    runs_used: int
    excluded: int
    conj_asymmetry: float


@dataclass
class MonteCarloSummary:
    cells: list = field(default_factory=list)
    bounds: list = field(default_factory=list)
    schedules: dict = field(default_factory=dict)  # (strategy slug, N) -> SamplingSchedule

    def cell(self, strategy: str, N: int) -> CellSummary:
        for c in self.cells:
            if c.strategy == strategy and c.N == N:
                return c
        raise KeyError((strategy, N))

    def curve(self, strategy: str, metric: str = "trace_cov"):
        cells = sorted((c for c in self.cells if c.strategy == strategy), key=lambda c: c.N)
        return np.array([c.N for c in cells]), np.array([getattr(c, metric) for c in cells])


def thread_count() -> int:
    env = os.environ.get("OPTSAMPLE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer OPTSAMPLE_THREADS=%r", env)
    return os.cpu_count() or 1


def design_measure(config: ExperimentConfig, ref: str) -> DesignMeasure:
    """Resolve a density reference: ``uniform``, ``doptimal`` or a two-column CSV path."""
    if ref == "uniform":
        return uniform_measure(config.T, config.density_L)
    if ref == "doptimal":
        grid = uniform_measure(config.T, config.density_L).grid
        return doptimal_density(
            config.input.basis, grid, config.density_max_iters, config.kw_tol, horizon=config.T
        )
    return io.read_measure(config.resolve(ref), horizon=config.T)


def build_schedule(config: ExperimentConfig, strategy: Strategy, N: int, measure=None, seed=None):
    if strategy.kind == "uniform":
        return uniform_schedule(config.T, N)
    if strategy.kind == "greedy":
        return greedy_schedule(config.input.basis, config.T, config.grid_L, N, config.ridge)
    if measure is None:
        measure = design_measure(config, strategy.density_ref)
    return sample_schedule(measure, N, seed)


def _noise_seed(config, N, run):
    # shared across strategies: paired comparison at equal (N, run)
    return np.random.SeedSequence([config.seed, 0, N, run])


def _schedule_seed(config, strategy_index, N, run):
    return np.random.SeedSequence([config.seed, 1, strategy_index, N, run])


def _chunks(n, k):
    bounds = np.linspace(0, n, min(n, k) + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run_cell(config, s_idx, strategy, N, measure, executor, workers):
    u, G = config.input, config.plant
    C = u.basis.dim
    fixed = None
    if strategy.deterministic:
        fixed = build_schedule(config, strategy, N)
        fixed_reg = build_regression(u, fixed)
        fixed_x = steady_state_output(G, u, fixed.times)

    def one(run):
        if fixed is None:
            sched = sample_schedule(measure, N, _schedule_seed(config, s_idx, N, run))
            reg = build_regression(u, sched)
            x = steady_state_output(G, u, sched.times)
        else:
            sched, reg, x = fixed, fixed_reg, fixed_x
        e = draw_noise(np.random.default_rng(_noise_seed(config, N, run)), N, config.sigma, config.noise)
        try:
            est = ls_estimate(reg, x + e)
        except RankDeficient:
            return None
        sign, logdet = np.linalg.slogdet(reg.Phi.conj().T @ reg.Phi / N)
        return est.theta_hat, float(np.exp(logdet)) if sign.real > 0 else 0.0, sched

    def chunk(runs):
        return [one(r) for r in runs]

    results = [r for part in executor.map(chunk, _chunks(config.runs, 4 * workers)) for r in part]
    kept = [r for r in results if r is not None]
    excluded = len(results) - len(kept)
    if excluded > MAX_EXCLUDED_FRACTION * config.runs:
        raise CampaignError(
            f"{strategy.name} at N={N}: {excluded}/{config.runs} runs rank deficient (limit 1%)"
        )
    if excluded:
        log.warning("%s N=%d: excluded %d rank-deficient runs", strategy.name, N, excluded)

    thetas = np.array([r[0] for r in kept]).reshape(-1, C)
    dens = np.array([r[1] for r in kept])
    theta0 = true_theta(G, u.basis)
    mean = thetas.mean(axis=0)
    ddof = 1 if len(kept) > 1 else 0
    trace_cov = float(np.sum(np.abs(thetas - mean) ** 2) / max(len(kept) - ddof, 1))
    conj = float(np.max(np.abs(thetas[:, 1::2] - np.conj(thetas[:, 2::2])))) if C > 1 and len(kept) else 0.0

    bound_trace, vacuous = _cell_bound(config, strategy, N, measure, fixed)
    cell = CellSummary(
        strategy=strategy.name,
        N=N,
        trace_cov=trace_cov,
        mean_info_density=float(dens.mean()),
        bias_norm=float(np.linalg.norm(mean - theta0)),
        vacuous_bound_flag=vacuous,
        bound_trace=bound_trace,
        runs_used=len(kept),
        excluded=excluded,
        conj_asymmetry=conj,
    )
    schedule = fixed if fixed is not None else (kept[0][2] if kept else None)
    return cell, schedule


def _cell_bound(config, strategy, N, measure, fixed):
    """Trace of the covariance bound for one cell, and whether it is vacuous.

    Deterministic schedules have ``R_N = R_0`` exactly, so ``t = 0`` applies.
    """
    u = config.input
    A = amplitude_matrix(u)
    if fixed is not None:
        reg = build_regression(u, fixed)
        R0, t = reg.Psi.conj().T @ reg.Psi, 0.0
        R0 = 0.5 * (R0 + R0.conj().T)
    else:
        R0 = jittered_expected_info(measure, u.basis, N)
        t = solve_t(BernsteinParams(u.M, N, config.delta))
    try:
        return float(np.trace(covariance_bound(A, R0, t, config.sigma)).real), False
    except VacuousBound:
        return None, True


def run_montecarlo(config: ExperimentConfig, threads: int | None = None) -> MonteCarloSummary:
    """Simulate ``config.runs`` noise realizations per (strategy, N) and summarize the estimates.

    Fully determined by ``config.seed``: noise is seeded by ``(seed, N, run)``
    so all strategies see the same realization at equal ``(N, run)``, and
    random schedules are seeded by ``(seed, strategy index, N, run)``.
    """
    summary = MonteCarloSummary()
    measures = {
        s.density_ref: design_measure(config, s.density_ref) for s in config.strategies if s.kind == "random_density"
    }
    workers = threads or thread_count()
    with ThreadPoolExecutor(max_workers=workers) as ex:
        for s_idx, strategy in enumerate(config.strategies):
            for N in config.N_sweep:
                cell, schedule = _run_cell(config, s_idx, strategy, N, measures.get(strategy.density_ref), ex, workers)
                summary.cells.append(cell)
                summary.schedules[(strategy.slug, N)] = schedule
                log.info("%s N=%d trace_cov=%.6g", strategy.name, N, cell.trace_cov)

    bound_measure = measures.get(config.bound_density) or design_measure(config, config.bound_density)
    rows = bound_sweep(
        config.input.basis, amplitude_matrix(config.input), bound_measure, config.N_sweep, config.delta, config.sigma
    )
    emp_name = f"random_density:{config.bound_density}"
    for row in rows:
        try:
            row["empirical_trace"] = summary.cell(emp_name, row["N"]).trace_cov
        except KeyError:
            row["empirical_trace"] = None
    summary.bounds = rows
    return summary


def samples_to_match(summary: MonteCarloSummary, strategy: str, reference: str, reference_N: int) -> float:
    """Sample count at which ``strategy`` reaches ``reference``'s accuracy at ``reference_N``.

    Piecewise log-log linear interpolation of the ``trace_cov`` curve;
    ``inf`` if the curve never gets that low.
    """
    target = summary.cell(reference, reference_N).trace_cov
    Ns, tr = summary.curve(strategy)
    if tr.size == 0 or tr.min() > target:
        return np.inf
    if tr[0] <= target:
        return float(Ns[0])
    for k in range(1, Ns.size):
        if tr[k] <= target:
            x0, x1 = np.log(Ns[k - 1]), np.log(Ns[k])
            y0, y1 = np.log(tr[k - 1]), np.log(tr[k])
            return float(np.exp(x0 + (np.log(target) - y0) * (x1 - x0) / (y1 - y0)))
    return np.inf


def emit_results(summary: MonteCarloSummary, output_dir) -> list:
    """Write the campaign CSVs into ``output_dir`` and return the written paths."""
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc

    written = []

    def put(name, header, rows):
        path = out / name
        io.write_csv(path, header, rows)
        written.append(path)

    put("fig1_variance.csv", ["strategy", "N", "trace_cov"], ((c.strategy, c.N, c.trace_cov) for c in summary.cells))
    put(
        "fig2_infodensity.csv",
        ["strategy", "N", "mean_info_density"],
        ((c.strategy, c.N, c.mean_info_density) for c in summary.cells),
    )
    put(
        "summary.csv",
        ["strategy", "N", "trace_cov", "mean_info_density", "bias_norm", "bound_trace", "runs_used", "excluded"],
        (
            (c.strategy, c.N, c.trace_cov, c.mean_info_density, c.bias_norm,
             "vacuous" if c.vacuous_bound_flag else c.bound_trace, c.runs_used, c.excluded)
            for c in summary.cells
        ),
    )
    put(
        "bounds.csv",
        ["N", "delta", "t", "lambda_min_R0", "bound_trace", "empirical_trace"],
        (
            (r["N"], r["delta"], r["t"], r["lambda_min_R0"],
             "vacuous" if r["bound_trace"] is None else r["bound_trace"], r["empirical_trace"])
            for r in summary.bounds
        ),
    )
    for (slug, N), schedule in summary.schedules.items():
        if schedule is None:
            continue
        path = out / f"schedule_{slug}_{N}.csv"
        io.write_schedule(path, schedule)
        written.append(path)
    return written

