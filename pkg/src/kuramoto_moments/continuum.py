"""Continuum limit solved along characteristics.

Every node (theta_q, omega_q, w_q) of a discretized initial measure carries a
characteristic x_q(t) = x(t, 0; theta_q, omega_q), and all of them move
together under the self-consistent mean field

    dx_q/dt = omega_q + K sum_l f_l Z_l(t) e^{-i l x_q},   Z_l = sum_q w_q e^{i l x_q}.

Observables of rho_t are pushforwards: int a d rho_t = sum_q w_q a(x_q(t), omega_q).
Positions are kept on the covering line (not reduced mod 2*pi) so that
differences between characteristics and Picard iterates stay meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from . import csvio
from .coupling import CouplingFunction, mean_field_velocity, order_parameters
from .errors import UnsupportedOperationError
from .integrators import march, n_steps
from .measures import DiscretizedMeasure
from .oscillators import default_dt
from .orthopoly import RecurrenceCoefficients, eval_polys

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class CharacteristicEnsemble:
    theta: np.ndarray
    omega: np.ndarray
    weights: np.ndarray
    x: np.ndarray
    t: float
    K: float
    coupling: CouplingFunction

    @classmethod
    def initial(cls, h_disc: DiscretizedMeasure, K: float,
                coupling: CouplingFunction) -> "CharacteristicEnsemble":
        return cls(h_disc.theta, h_disc.omega, h_disc.weights, h_disc.theta.copy(), 0.0,
                   float(K), coupling)

    def order_parameter(self) -> complex:
        return complex(np.dot(self.weights, np.exp(1j * self.x)))


@dataclass(frozen=True, eq=False)
class CharacteristicTrajectory:
    h_disc: DiscretizedMeasure
    times: np.ndarray
    xs: np.ndarray  # (n_snapshots, Q)
    K: float
    coupling: CouplingFunction

    def __len__(self):
        return len(self.times)

    def ensemble(self, i: int) -> CharacteristicEnsemble:
        h = self.h_disc
        return CharacteristicEnsemble(h.theta, h.omega, h.weights, self.xs[i],
                                      float(self.times[i]), self.K, self.coupling)

    def __iter__(self):
        return (self.ensemble(i) for i in range(len(self)))

    @property
    def order_parameter(self) -> np.ndarray:
        return np.exp(1j * self.xs) @ self.h_disc.weights

    def moments(self, coeffs: RecurrenceCoefficients, pairs: Sequence[tuple]) -> np.ndarray:
        """Z^m_k(t) for every snapshot; shape (n_snapshots, len(pairs))."""
        m_top = max(m for m, _ in pairs)
        wP = eval_polys(coeffs, self.h_disc.omega, m_top) * self.h_disc.weights
        return np.stack([np.exp(1j * k * self.xs) @ wP[m] for m, k in pairs], axis=-1)

    def to_csv(self, path, coeffs=None, pairs=()):
        header = ["t", "re_Z01", "im_Z01", "r"]
        extra = []
        if pairs:
            header += csvio.moment_columns(pairs)
            mom = self.moments(coeffs, pairs)
            for j in range(len(pairs)):
                extra += [mom[:, j].real, mom[:, j].imag]
        header.append("source")
        extra.append(["continuum"] * len(self.times))
        rows = csvio.order_parameter_rows(self.times, self.order_parameter, extra)
        return csvio.write_csv(path, header, rows)


def _velocity(h_disc, K, coupling):
    omega, w = h_disc.omega, h_disc.weights

    def f(t, x):
        return mean_field_velocity(x, omega, K, coupling, weights=w)

    return f


def integrate_characteristics_at(h_disc: DiscretizedMeasure, K: float,
                                 coupling: Optional[CouplingFunction], times,
                                 dt: Optional[float] = None) -> CharacteristicTrajectory:
    """RK4 snapshots at the requested strictly increasing times (>= 0)."""
    coupling = CouplingFunction.sine() if coupling is None else coupling
    times = np.asarray(times, dtype=float)
    dt = default_dt(h_disc.omega, K) if dt is None else float(dt)
    grid = times if times[0] == 0.0 else np.concatenate([[0.0], times])
    snaps = march(_velocity(h_disc, K, coupling), h_disc.theta, grid, dt)
    if times[0] != 0.0:
        snaps = snaps[1:]
    return CharacteristicTrajectory(h_disc, times, np.stack(snaps), float(K), coupling)


def integrate_characteristics(h_disc: DiscretizedMeasure, K: float,
                              coupling: Optional[CouplingFunction] = None, t_end: float = 1.0,
                              dt: Optional[float] = None, stride: int = 1) -> CharacteristicTrajectory:
    """Advance all characteristics with RK4; snapshot every ``stride`` steps and at t_end."""
    coupling = CouplingFunction.sine() if coupling is None else coupling
    dt = default_dt(h_disc.omega, K) if dt is None else float(dt)
    n = n_steps(t_end, dt)
    if n == 0:
        return CharacteristicTrajectory(h_disc, np.array([0.0]), h_disc.theta[None].copy(),
                                        float(K), coupling)
    h = t_end / n
    idx = list(range(0, n + 1, stride))
    if idx[-1] != n:
        idx.append(n)
    times = h * np.asarray(idx, dtype=float)
    times[-1] = t_end
    snaps = march(_velocity(h_disc, K, coupling), h_disc.theta, times, h)
    return CharacteristicTrajectory(h_disc, times, np.stack(snaps), float(K), coupling)


def continuum_moment(ens: CharacteristicEnsemble, coeffs: RecurrenceCoefficients, m: int, k: int) -> complex:
    """Z^m_k(t) = sum_q w_q P_m(omega_q) e^{i k x_q(t)}."""
    if m < 0 or m > coeffs.m_max:
        raise IndexError(f"moment index m={m} outside 0..{coeffs.m_max}")
    P = eval_polys(coeffs, ens.omega, m)[m]
    return complex(np.dot(ens.weights * P, np.exp(1j * k * ens.x)))


# ------------------------------------------------------------------- Picard


@dataclass
class PicardResult:
    t_grid: np.ndarray
    diffs: np.ndarray  # d_n = sup_{t,q} |x_n - x_{n-1}|, n = 1..n_iters
    final: np.ndarray  # (len(t_grid), Q)
    iterates: List[np.ndarray] = field(default_factory=list)

    def factorial_bound(self, K: float, lipschitz: float = 1.0, sup_f: float = 1.0) -> np.ndarray:
        """2^{n-1} L^{n-1} K^n M t^n / n! at t = max(t_grid), for n = 1..n_iters."""
        from scipy.special import gammaln

        t = float(self.t_grid[-1])
        n = np.arange(1, self.diffs.size + 1)
        with np.errstate(divide="ignore"):
            log_b = ((n - 1) * np.log(2 * lipschitz) + n * np.log(K * t) + np.log(sup_f)
                     - gammaln(n + 1))
        return np.exp(log_b)


def picard_iterate(h_disc: DiscretizedMeasure, K: float, coupling: Optional[CouplingFunction],
                   t_grid, n_iters: int, keep_iterates: bool = True) -> PicardResult:
    """Successive approximations of the characteristic integral equation.

    x_0 = theta + omega t;  x_{n+1}(t) = x_0(t) + K int_0^t sum_q' w_q' f(x_n(tau)_q' - x_n(tau)_q) dtau,
    with the tau-integral done by the trapezoid rule on ``t_grid``.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be >= 1")
    coupling = CouplingFunction.sine() if coupling is None else coupling
    t = np.asarray(t_grid, dtype=float)
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must start at 0 and increase strictly")
    w = h_disc.weights
    x0 = h_disc.theta[None, :] + np.multiply.outer(t, h_disc.omega)
    zero_omega = np.zeros(h_disc.theta.shape)
    x = x0
    iterates = [x0] if keep_iterates else []
    diffs = []
    for _ in range(n_iters):
        # force only: the omega term is already in x0
        force = mean_field_velocity(x, zero_omega, K, coupling, weights=w)
        incr = cumulative_trapezoid(force, t, axis=0, initial=0.0)
        x_new = x0 + incr
        diffs.append(float(np.max(np.abs(x_new - x))))
        x = x_new
        if keep_iterates:
            iterates.append(x)
    return PicardResult(t, np.asarray(diffs), x, iterates)


# ------------------------------------------------- density along characteristics


def log_density_growth(traj: CharacteristicTrajectory, index: int) -> np.ndarray:
    """int_0^t K sum_q' w_q' f'(x_q' - x_q) ds for every node, trapezoid over snapshots 0..index."""
    index = index % len(traj)
    f = traj.coupling
    xs = traj.xs[: index + 1]
    if index == 0:
        return np.zeros(xs.shape[1])
    lmax = f.max_harmonic
    Zl = order_parameters(xs, traj.h_disc.weights, lmax)[..., 0]  # (lmax+1, n_snap)
    rate = np.zeros(xs.shape)
    for l, c in f.harmonics:
        if l:
            # f'(phi) = sum_l i l f_l e^{i l phi}, conjugate pairs give 2 Re
            rate += 2.0 * (1j * l * c * Zl[l][:, None] * np.exp(-1j * l * xs)).real
    return traj.K * trapezoid(rate, traj.times[: index + 1], axis=0)


def density_along_characteristics(traj: CharacteristicTrajectory, h_density: Callable,
                                  index: int = -1) -> np.ndarray:
    """rho_t(x_q(t), omega_q) = h(theta_q, omega_q) exp[K int_0^t sum w f'(x' - x_q) ds].

    ``h_density(theta, omega)`` is the initial density w.r.t. d(theta) x dg(omega).
    Evaluated only at the pushed-forward node positions.
    """
    if h_density is None:
        raise UnsupportedOperationError("density reconstruction needs an initial density")
    h0 = np.asarray(h_density(traj.h_disc.theta, traj.h_disc.omega), dtype=float)
    return h0 * np.exp(log_density_growth(traj, index))


def mass_along_characteristics(traj: CharacteristicTrajectory, rho: np.ndarray, index: int = -1) -> float:
    """int int rho_t d(theta) dg reconstructed from node values.

    Uses d theta -> (dx/d theta) d theta along each omega row of a tensor grid,
    with the Jacobian dx/d theta from a spectral derivative of the periodic part
    x(t; theta) - theta.  Independent of how rho was computed.
    """
    h = traj.h_disc
    if h.grid_shape is None:
        raise UnsupportedOperationError("mass reconstruction needs a tensor-grid discretization")
    n_om, n_th = h.grid_shape
    theta = h.theta.reshape(n_om, n_th)
    if not np.allclose(theta, TWO_PI * np.arange(n_th) / n_th):
        raise UnsupportedOperationError("mass reconstruction needs equispaced phase nodes")
    x = traj.xs[index].reshape(n_om, n_th)
    periodic = x - theta
    k = np.fft.rfftfreq(n_th, d=1.0 / n_th)
    spec = np.fft.rfft(periodic, axis=1)
    if n_th % 2 == 0:
        spec[:, -1] = 0.0
    jac = 1.0 + np.fft.irfft(1j * k * spec, n=n_th, axis=1)
    g_w = h.weights.reshape(n_om, n_th).sum(axis=1)
    return float(g_w @ ((rho.reshape(n_om, n_th) * jac).sum(axis=1) * (TWO_PI / n_th)))


# ------------------------------------------------ continuity in initial data


@dataclass
class ContinuityProbe:
    max_diff: float
    growth_bound: float
    times: np.ndarray
    observable_diff: np.ndarray
    position_diff: np.ndarray
    envelope: np.ndarray
    delta: float


def initial_continuity_probe(h1: DiscretizedMeasure, h2: DiscretizedMeasure, a: Callable,
                             T: float, dt: float, K: float = 1.0,
                             coupling: Optional[CouplingFunction] = None,
                             delta: Optional[float] = None) -> ContinuityProbe:
    """Run two paired discretizations and compare int a d rho_{t,1} with int a d rho_{t,2}.

    ``delta`` defaults to the total-variation distance sum_q |w1_q - w2_q| of
    the weights, which is the perturbation size in the Gronwall estimate
    |x_1 - x_2|(t) <= (M delta / 2L)(e^{2KLt} - 1), M = max|f|, L = Lip(f).
    If the node positions differ too, their initial offset is propagated by
    an extra e^{2KLt} factor.
    """
    if len(h1) != len(h2):
        raise ValueError(f"paired probe needs equal node counts, got {len(h1)} and {len(h2)}")
    coupling = CouplingFunction.sine() if coupling is None else coupling
    tr1 = integrate_characteristics(h1, K, coupling, T, dt)
    tr2 = integrate_characteristics(h2, K, coupling, T, dt)
    obs1 = a(tr1.xs, h1.omega) @ h1.weights
    obs2 = a(tr2.xs, h2.omega) @ h2.weights
    diff = np.abs(obs1 - obs2)
    pos = np.max(np.abs(tr1.xs - tr2.xs), axis=1)
    if delta is None:
        delta = float(np.sum(np.abs(h1.weights - h2.weights)))
    M, L = coupling.sup_norm(), coupling.lipschitz()
    grow = np.exp(2 * K * L * tr1.times)
    offset = float(np.max(np.abs(h1.theta - h2.theta)))
    envelope = offset * grow + (M * delta / (2 * L)) * (grow - 1.0)
    return ContinuityProbe(float(diff.max()), float(envelope[-1]), tr1.times, diff, pos,
                           envelope, float(delta))
