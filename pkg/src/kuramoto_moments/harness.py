"""Finite-N vs continuum convergence study.

For each N and trial, N pairs (theta_j, omega_j) are drawn i.i.d. from h on
their own random substream, the finite-N model is integrated, and the error
|Zhat^m_k(t) - Z^m_k(t)| against a single continuum reference is recorded at
the observation times.  RMS over trials is then regressed on N in log-log
space; the law err ~ C / sqrt(N) shows up as slope -1/2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import stats

from . import csvio
from .config import SimConfig, dump_config
from .continuum import integrate_characteristics_at
from .measures import build_discretization, sample_pairs
from .oscillators import OscillatorState, integrate_at
from .orthopoly import RecurrenceCoefficients, eval_polys, recurrence_coefficients
from .rng import substream

log = logging.getLogger(__name__)

# phases per batch; bounds memory while letting numpy vectorize across trials
BATCH_ELEMENTS = 1 << 18


@dataclass(frozen=True)
class ScalingFit:
    p: float
    stderr: float
    intercept: float


def fit_scaling_exponent(pairs: Sequence[Tuple[float, float]]) -> ScalingFit:
    """Least squares on (log N, log rms): rms ~ c N^p."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("expected a sequence of (N, rms_error) pairs")
    N, err = arr[:, 0], arr[:, 1]
    if np.any(~np.isfinite(err)) or np.any(err <= 0):
        raise ValueError("rms errors must be positive and finite to fit a power law")
    if np.any(N <= 0):
        raise ValueError("N must be positive")
    if np.unique(N).size < 3:
        raise ValueError("need at least 3 distinct N values")
    res = stats.linregress(np.log(N), np.log(err))
    return ScalingFit(float(res.slope), float(res.stderr), float(res.intercept))


def _coefficients_for(cfg: SimConfig, pairs) -> RecurrenceCoefficients:
    return recurrence_coefficients(cfg.measure.frequency, max(m for m, _ in pairs))


def continuum_reference(cfg: SimConfig, coeffs=None) -> np.ndarray:
    """Z^m_k at each observation time; shape (n_times, n_pairs)."""
    ex = cfg.experiment
    coeffs = _coefficients_for(cfg, ex.moments) if coeffs is None else coeffs
    d = cfg.discretization
    h_disc = build_discretization(cfg.measure, d.n_omega, d.n_theta, d.omega_rule)
    traj = integrate_characteristics_at(h_disc, cfg.K, cfg.coupling, ex.observe_times,
                                        cfg.integrator.dt)
    return traj.moments(coeffs, ex.moments)


def finite_n_moments(cfg: SimConfig, N: int, trials: Sequence[int], coeffs) -> np.ndarray:
    """Zhat^m_k at the observation times for each trial; shape (len(trials), n_times, n_pairs)."""
    ex = cfg.experiment
    theta = np.empty((len(trials), N))
    omega = np.empty((len(trials), N))
    for i, trial in enumerate(trials):
        theta[i], omega[i] = sample_pairs(cfg.measure, N, substream(ex.seed, N, trial))
    state = OscillatorState(theta, omega, cfg.K, cfg.coupling)
    traj = integrate_at(state, ex.observe_times, cfg.integrator.dt)
    return np.moveaxis(traj.moments(coeffs, ex.moments), 0, 1)


@dataclass
class ConvergenceReport:
    n_list: Tuple[int, ...]
    times: Tuple[float, ...]
    pairs: Tuple[Tuple[int, int], ...]
    delta: float
    reference: np.ndarray  # (n_times, n_pairs) complex
    errors: np.ndarray  # (n_N, trials, n_times, n_pairs)
    rms: np.ndarray = None  # (n_N, n_times, n_pairs)
    quantile_C: np.ndarray = None
    fits: Dict[Tuple[int, int, float], ScalingFit] = field(default_factory=dict)

    def __post_init__(self):
        if np.any(self.errors < 0):
            raise ValueError("errors must be nonnegative")
        if self.rms is None:
            self.rms = np.sqrt(np.mean(self.errors ** 2, axis=1))
        if self.quantile_C is None:
            sqrtN = np.sqrt(np.asarray(self.n_list, dtype=float))[:, None, None, None]
            self.quantile_C = np.quantile(sqrtN * self.errors, 1.0 - self.delta, axis=1)
        if not self.fits and len(self.n_list) >= 3:
            for ti, t in enumerate(self.times):
                for pi, (m, k) in enumerate(self.pairs):
                    col = self.rms[:, ti, pi]
                    if np.all(col > 0):
                        self.fits[m, k, t] = fit_scaling_exponent(list(zip(self.n_list, col)))

    def fit(self, m: int, k: int, t: float) -> ScalingFit:
        return self.fits[m, k, t]

    def error_rows(self):
        for ni, N in enumerate(self.n_list):
            for trial in range(self.errors.shape[1]):
                for ti, t in enumerate(self.times):
                    for pi, (m, k) in enumerate(self.pairs):
                        yield (N, trial, t, m, k, self.errors[ni, trial, ti, pi])

    def summary_rows(self):
        for ni, N in enumerate(self.n_list):
            for ti, t in enumerate(self.times):
                for pi, (m, k) in enumerate(self.pairs):
                    yield (N, t, m, k, self.rms[ni, ti, pi], self.quantile_C[ni, ti, pi])

    def fit_rows(self):
        for (m, k, t), fit in self.fits.items():
            yield (m, k, t, fit.p, fit.stderr)


def run_convergence_experiment(cfg: SimConfig) -> ConvergenceReport:
    ex = cfg.experiment
    coeffs = _coefficients_for(cfg, ex.moments)
    # a failing reference aborts before any trial is spent
    reference = continuum_reference(cfg, coeffs)
    errors = np.empty((len(ex.n_list), ex.trials, len(ex.observe_times), len(ex.moments)))
    for ni, N in enumerate(ex.n_list):
        batch = max(1, BATCH_ELEMENTS // N)
        for start in range(0, ex.trials, batch):
            trials = range(start, min(ex.trials, start + batch))
            zhat = finite_n_moments(cfg, N, trials, coeffs)
            errors[ni, start:start + len(trials)] = np.abs(zhat - reference)
        log.info("N=%d: rms=%s", N, np.sqrt(np.mean(errors[ni] ** 2, axis=0)).ravel())
    return ConvergenceReport(tuple(ex.n_list), tuple(ex.observe_times), tuple(ex.moments),
                             ex.delta, reference, errors)


def emit_report(report: ConvergenceReport, out_dir, cfg: SimConfig = None) -> Dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "errors": csvio.write_csv(out / "errors.csv", ["N", "trial", "t", "m", "k", "err"],
                                  report.error_rows()),
        "summary": csvio.write_csv(out / "summary.csv", ["N", "t", "m", "k", "rms", "quantile_C"],
                                   report.summary_rows()),
        "fit": csvio.write_csv(out / "fit.csv", ["m", "k", "t", "p", "stderr"], report.fit_rows()),
    }
    if cfg is not None:
        paths["effective_config"] = dump_config(cfg, out / "effective_config.yaml")
    return paths
