"""Finite-N Kuramoto / Kuramoto-Daido oscillators.

    d theta_i / dt = omega_i + (K / N) sum_j f(theta_j - theta_i)

The force is evaluated through the generalized order parameters
Z_l = (1/N) sum_j e^{i l theta_j}, which costs O(N) per Fourier mode of f.
Phase arrays may carry leading batch axes (independent systems integrated in
lockstep); every reduction runs over the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import csvio
from .coupling import CouplingFunction, mean_field_velocity, pairwise_velocity
from .integrators import march, n_steps
from .orthopoly import RecurrenceCoefficients, eval_polys

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class OscillatorState:
    theta: np.ndarray
    omega: np.ndarray
    K: float = 1.0
    coupling: CouplingFunction = field(default_factory=CouplingFunction.sine)

    def __post_init__(self):
        theta = np.mod(np.asarray(self.theta, dtype=float), TWO_PI)
        omega = np.broadcast_to(np.asarray(self.omega, dtype=float), theta.shape).copy()
        if theta.ndim == 0 or theta.shape[-1] < 1:
            raise ValueError("need at least one oscillator")
        if not (self.K >= 0 and np.isfinite(self.K)):
            raise ValueError(f"coupling strength must be finite and >= 0, got {self.K}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "K", float(self.K))

    @property
    def N(self) -> int:
        return self.theta.shape[-1]

    def with_theta(self, theta) -> "OscillatorState":
        return replace(self, theta=theta)


def order_parameter(state: OscillatorState):
    """Z = (1/N) sum_j e^{i theta_j}; |Z| = r, arg Z = psi."""
    z = np.exp(1j * state.theta).mean(axis=-1)
    return complex(z) if np.ndim(z) == 0 else z


def rhs(state: OscillatorState) -> np.ndarray:
    return mean_field_velocity(state.theta, state.omega, state.K, state.coupling)


def pairwise_rhs(state: OscillatorState) -> np.ndarray:
    """Direct O(N^2) double sum; kept as an oracle for :func:`rhs`."""
    return pairwise_velocity(state.theta, state.omega, state.K, state.coupling)


def default_dt(omega, K: float) -> float:
    """1e-3 of the fastest natural period, 2*pi / max(1, max|omega|, K)."""
    scale = max(1.0, float(np.max(np.abs(omega))) if np.size(omega) else 1.0, float(K))
    return 1e-3 * TWO_PI / scale


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    thetas: np.ndarray  # (n_snapshots, *batch, N)
    omega: np.ndarray
    K: float
    coupling: CouplingFunction
    order_parameter: np.ndarray = None

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if self.order_parameter is None:
            object.__setattr__(self, "order_parameter", np.exp(1j * self.thetas).mean(axis=-1))

    def __len__(self):
        return len(self.times)

    def state_at(self, i: int) -> OscillatorState:
        return OscillatorState(self.thetas[i], self.omega, self.K, self.coupling)

    @property
    def final(self) -> OscillatorState:
        return self.state_at(-1)

    def moments(self, coeffs: RecurrenceCoefficients, pairs: Sequence[tuple]) -> np.ndarray:
        """Empirical moments for each (m, k) in pairs; shape (n_snapshots, *batch, len(pairs))."""
        m_top = max(m for m, _ in pairs)
        P = eval_polys(coeffs, self.omega, m_top)
        out = [
            (P[m] * np.exp(1j * k * self.thetas)).mean(axis=-1) for m, k in pairs
        ]
        return np.stack(out, axis=-1)

    def to_csv(self, path, coeffs: RecurrenceCoefficients = None, pairs=(), source: str = None):
        """Columns t, re_Z01, im_Z01, r (+ re_Zm_k, im_Zm_k per extra moment, + source)."""
        if self.thetas.ndim != 2:
            raise ValueError("CSV export is for a single (unbatched) trajectory")
        header = ["t", "re_Z01", "im_Z01", "r"]
        extra_cols = []
        if pairs:
            header += csvio.moment_columns(pairs)
            mom = self.moments(coeffs, pairs)
            for j in range(len(pairs)):
                extra_cols += [mom[:, j].real, mom[:, j].imag]
        if source is not None:
            header.append("source")
            extra_cols.append([source] * len(self.times))
        rows = csvio.order_parameter_rows(self.times, self.order_parameter, extra_cols)
        return csvio.write_csv(path, header, rows)


def _wrap(theta):
    return np.mod(theta, TWO_PI)


def integrate_at(state: OscillatorState, times, dt: Optional[float] = None) -> Trajectory:
    """RK4 states at the requested (strictly increasing, starting at 0 or later) times."""
    times = np.asarray(times, dtype=float)
    dt = default_dt(state.omega, state.K) if dt is None else float(dt)
    omega, K, coupling = state.omega, state.K, state.coupling

    def f(t, theta):
        return mean_field_velocity(theta, omega, K, coupling)

    grid = times if times[0] == 0.0 else np.concatenate([[0.0], times])
    snaps = march(f, state.theta, grid, dt, post_step=_wrap)
    if times[0] != 0.0:
        snaps = snaps[1:]
    return Trajectory(times, np.stack(snaps), omega, K, coupling)


def integrate(state: OscillatorState, t_end: float, dt: Optional[float] = None,
              stride: int = 1) -> Trajectory:
    """Classical RK4 with fixed step; snapshot every ``stride`` steps plus the final time.

    The step actually used is t_end / ceil(t_end / dt) <= dt.
    """
    dt = default_dt(state.omega, state.K) if dt is None else float(dt)
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n = n_steps(t_end, dt)
    if n == 0:
        return Trajectory(np.array([0.0]), state.theta[None].copy(), state.omega,
                          state.K, state.coupling)
    h = t_end / n
    idx = list(range(0, n + 1, stride))
    if idx[-1] != n:
        idx.append(n)
    times = h * np.asarray(idx, dtype=float)
    times[-1] = t_end
    omega, K, coupling = state.omega, state.K, state.coupling

    def f(t, theta):
        return mean_field_velocity(theta, omega, K, coupling)

    snaps = march(f, state.theta, times, h, post_step=_wrap)
    return Trajectory(times, np.stack(snaps), omega, K, coupling)


# ------------------------------------------------------------------ moments


def empirical_moment(state: OscillatorState, coeffs: RecurrenceCoefficients, m: int, k: int):
    """Zhat^m_k = (1/N) sum_j P_m(omega_j) e^{i k theta_j}."""
    if m < 0 or m > coeffs.m_max:
        raise IndexError(f"moment index m={m} outside 0..{coeffs.m_max}")
    P = eval_polys(coeffs, state.omega, m)[m]
    z = (P * np.exp(1j * k * state.theta)).mean(axis=-1)
    return complex(z) if np.ndim(z) == 0 else z


def empirical_lattice(state: OscillatorState, coeffs: RecurrenceCoefficients,
                      m_max: int, k_max: int) -> np.ndarray:
    """Zhat^m_k for 0 <= m <= m_max, 0 <= k <= k_max as an (m_max+1, k_max+1) array."""
    if m_max > coeffs.m_max:
        raise IndexError(f"need coefficients up to {m_max}, have {coeffs.m_max}")
    P = eval_polys(coeffs, state.omega, m_max)  # (m, N)
    E = np.exp(1j * np.multiply.outer(np.arange(k_max + 1), state.theta))  # (k, N)
    return (P @ E.T) / state.N


def moment_derivative(state: OscillatorState, coeffs: RecurrenceCoefficients, m: int, k: int) -> complex:
    """d Zhat^m_k / dt = (1/N) sum_j P_m(omega_j) i k thetadot_j e^{i k theta_j}."""
    P = eval_polys(coeffs, state.omega, m)[m]
    thetadot = rhs(state)
    return complex(np.mean(P * 1j * k * thetadot * np.exp(1j * k * state.theta)))


def moments_system_rhs(Z: Callable[[int, int], complex], coeffs: RecurrenceCoefficients,
                       K: float, coupling: CouplingFunction, m: int, k: int) -> complex:
    """Right-hand side of the moments system for one (m, k), moments supplied by ``Z(m, k)``.

    ik (b_m Z^{m+1}_k + a_m Z^m_k + b_{m-1} Z^{m-1}_k) + ikK sum_l f_l Z^0_l Z^m_{k-l}
    """
    lin = coeffs.b_ext(m) * Z(m + 1, k) + coeffs.a[m] * Z(m, k)
    if m >= 1:
        lin += coeffs.b_ext(m - 1) * Z(m - 1, k)
    nonlin = 0j
    for l, fl in coupling.fourier().items():
        nonlin += fl * Z(0, l) * Z(m, k - l)
    return 1j * k * lin + 1j * k * K * nonlin


def moment_identity_residual(state: OscillatorState, coeffs: RecurrenceCoefficients,
                             m: int, k: int) -> float:
    """|d Zhat^m_k/dt - RHS(Zhat)|: zero up to roundoff for every particle state."""
    if m + 1 > coeffs.m_max:
        raise IndexError(f"the (m={m}) equation needs P_{m + 1}; coefficients stop at {coeffs.m_max}")
    if np.ndim(state.theta) != 1:
        raise ValueError("moment_identity_residual takes a single (unbatched) state")
    P = eval_polys(coeffs, state.omega, m + 1)
    cache = {}

    def Z(mm, kk):
        if (mm, kk) not in cache:
            cache[mm, kk] = complex(np.mean(P[mm] * np.exp(1j * kk * state.theta)))
        return cache[mm, kk]

    lhs = moment_derivative(state, coeffs, m, k)
    return abs(lhs - moments_system_rhs(Z, coeffs, state.K, state.coupling, m, k))
