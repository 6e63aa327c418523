"""Truncated moments system on the lattice 0 <= m <= M_max, 0 <= k <= K_max.

    dZ^m_k/dt = ik (b_m Z^{m+1}_k + a_m Z^m_k + b_{m-1} Z^{m-1}_k) + ikK sum_l f_l Z^0_l Z^m_{k-l}

For f = sin the coupling sum is (kK/2)(Z^0_1 Z^m_{k-1} - Z^0_{-1} Z^m_{k+1}).
Only k >= 0 is stored; Z^m_{-k} = conj(Z^m_k).  Moments outside the lattice
are closed by zero.  The k = 0 column never changes (overall factor k) and is
held fixed rather than integrated.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import csvio
from .coupling import CouplingFunction
from .errors import LatticeBlowUpError
from .integrators import march, n_steps
from .measures import DiscretizedMeasure
from .oscillators import OscillatorState, empirical_lattice
from .orthopoly import RecurrenceCoefficients, eval_polys


@dataclass(frozen=True, eq=False)
class MomentLattice:
    Z: np.ndarray  # (M_max+1, K_max+1)
    coeffs: RecurrenceCoefficients
    K: float = 1.0
    coupling: CouplingFunction = field(default_factory=CouplingFunction.sine)

    def __post_init__(self):
        Z = np.array(self.Z, dtype=complex)
        if Z.ndim != 2:
            raise ValueError("Z must be 2-d, indexed by (m, k)")
        if Z.shape[0] - 1 > self.coeffs.m_max:
            raise IndexError(f"lattice needs a_0..a_{Z.shape[0] - 1}; coefficients stop at {self.coeffs.m_max}")
        Z[0, 0] = 1.0
        object.__setattr__(self, "Z", Z)

    @property
    def m_max(self) -> int:
        return self.Z.shape[0] - 1

    @property
    def k_max(self) -> int:
        return self.Z.shape[1] - 1

    def with_Z(self, Z) -> "MomentLattice":
        return replace(self, Z=Z)

    def get(self, m: int, k: int) -> complex:
        """Z^m_k with conjugation for k < 0 and zero closure outside the lattice."""
        if m < 0 or m > self.m_max or abs(k) > self.k_max:
            return 0j
        z = self.Z[m, abs(k)]
        return complex(np.conj(z)) if k < 0 else complex(z)


def init_lattice(h_disc: DiscretizedMeasure, coeffs: RecurrenceCoefficients, M_max: int, K_max: int,
                 K: float = 1.0, coupling: Optional[CouplingFunction] = None) -> MomentLattice:
    """Z^m_k(0) = sum_q w_q P_m(omega_q) e^{i k theta_q}."""
    if M_max > coeffs.m_max:
        raise IndexError(f"need coefficients up to {M_max}, have {coeffs.m_max}")
    coupling = CouplingFunction.sine() if coupling is None else coupling
    P = eval_polys(coeffs, h_disc.omega, M_max) * h_disc.weights
    E = np.exp(1j * np.multiply.outer(np.arange(K_max + 1), h_disc.theta))
    return MomentLattice(P @ E.T, coeffs, K, coupling)


def lattice_from_particles(state: OscillatorState, coeffs: RecurrenceCoefficients,
                           M_max: int, K_max: int) -> MomentLattice:
    return MomentLattice(empirical_lattice(state, coeffs, M_max, K_max), coeffs, state.K, state.coupling)


def _extended(Z: np.ndarray, pad: int) -> np.ndarray:
    """Two-sided array over k = -(K_max+pad)..K_max+pad with one zero row m = M_max+1."""
    M1, K1 = Z.shape
    k_max = K1 - 1
    off = k_max + pad
    E = np.zeros((M1 + 1, 2 * off + 1), dtype=complex)
    E[:M1, off:off + K1] = Z
    E[:M1, off - k_max:off] = np.conj(Z[:, :0:-1])
    return E


def _two_sided_rhs(lat: MomentLattice, ks: np.ndarray) -> np.ndarray:
    Z = lat.Z
    M1 = Z.shape[0]
    pad = lat.coupling.max_harmonic
    E = _extended(Z, pad)
    off = lat.k_max + pad
    cols = off + ks
    a = lat.coeffs.a[:M1][:, None]
    b = np.array([lat.coeffs.b_ext(m) for m in range(M1)])
    b[-1] = 0.0  # Z^{M_max+1} is closed by zero anyway
    b_up = b[:, None]
    b_down = np.concatenate([[0.0], b[:-1]])[:, None]
    Zk = E[:M1][:, cols]
    up = E[1:M1 + 1][:, cols]
    down = np.vstack([np.zeros((1, cols.size)), E[:M1 - 1][:, cols]])
    lin = b_up * up + a * Zk + b_down * down
    nonlin = np.zeros_like(Zk)
    for l, fl in lat.coupling.fourier().items():
        if abs(l) > pad:
            continue
        nonlin += fl * E[0, off + l] * E[:M1][:, cols - l]
    return 1j * ks * (lin + lat.K * nonlin)


def moments_rhs(lat: MomentLattice) -> np.ndarray:
    """dZ/dt on the stored half-lattice; the k = 0 column is exactly zero."""
    return _two_sided_rhs(lat, np.arange(lat.k_max + 1))


def moments_rhs_kuramoto(lat: MomentLattice) -> np.ndarray:
    """Hand-coded sine-coupling form, used to cross-check :func:`moments_rhs`."""
    M, Kx = lat.m_max, lat.k_max
    d = np.zeros_like(lat.Z)
    z01, z0m1 = lat.get(0, 1), lat.get(0, -1)
    for m in range(M + 1):
        bm = lat.coeffs.b_ext(m) if m < M else 0.0
        bm1 = lat.coeffs.b_ext(m - 1)
        for k in range(1, Kx + 1):
            lin = bm * lat.get(m + 1, k) + lat.coeffs.a[m] * lat.get(m, k) + bm1 * lat.get(m - 1, k)
            d[m, k] = 1j * k * lin + 0.5 * k * lat.K * (z01 * lat.get(m, k - 1) - z0m1 * lat.get(m, k + 1))
    return d


def conjugacy_defect(lat: MomentLattice) -> float:
    """max |dZ^m_{-k}/dt - conj(dZ^m_k/dt)| with the rhs evaluated at both signs of k."""
    ks = np.arange(1, lat.k_max + 1)
    pos = _two_sided_rhs(lat, ks)
    neg = _two_sided_rhs(lat, -ks)
    return float(np.max(np.abs(neg - np.conj(pos)), initial=0.0))


@dataclass(frozen=True, eq=False)
class LatticeSeries:
    times: np.ndarray
    Z: np.ndarray  # (n_snapshots, M_max+1, K_max+1)
    lattice: MomentLattice  # initial lattice (carries coeffs, K, coupling)

    def __len__(self):
        return len(self.times)

    def at(self, i: int) -> MomentLattice:
        return self.lattice.with_Z(self.Z[i])

    def to_csv(self, path, m_top: Optional[int] = None, k_top: Optional[int] = None):
        """Long format: t, m, k, re_Z, im_Z."""
        m_top = self.lattice.m_max if m_top is None else m_top
        k_top = self.lattice.k_max if k_top is None else k_top

        def rows():
            for t, Z in zip(self.times, self.Z):
                for m in range(m_top + 1):
                    for k in range(k_top + 1):
                        yield (float(t), m, k, Z[m, k].real, Z[m, k].imag)

        return csvio.write_csv(path, ["t", "m", "k", "re_Z", "im_Z"], rows())


def integrate_moments(lat: MomentLattice, t_end: float, dt: float, stride: int = 1,
                      blowup: float = 10.0) -> LatticeSeries:
    """RK4 on the k >= 1 columns; k = 0 held fixed, Z[0,0] pinned to 1.

    Raises LatticeBlowUpError as soon as any |Z| exceeds ``blowup``: a sign
    that the truncation is too coarse, not a solver bug.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n = n_steps(t_end, dt)
    col0 = lat.Z[:, :1].copy()
    if n == 0:
        return LatticeSeries(np.array([0.0]), lat.Z[None].copy(), lat)
    h = t_end / n
    idx = list(range(0, n + 1, stride))
    if idx[-1] != n:
        idx.append(n)
    times = h * np.asarray(idx, dtype=float)
    times[-1] = t_end
    pad = lat.coupling.max_harmonic
    ks = np.arange(1, lat.k_max + 1)

    def f(t, Y):
        return _two_sided_rhs(lat.with_Z(np.hstack([col0, Y])), ks)

    def check(t, Y):
        top = float(np.max(np.abs(Y), initial=0.0))
        if top > blowup:
            raise LatticeBlowUpError(t, top, blowup)

    snaps = march(f, lat.Z[:, 1:], times, h, check=check)
    Z = np.stack([np.hstack([col0, Y]) for Y in snaps])
    return LatticeSeries(times, Z, lat)


@dataclass
class InvariantReport:
    k0_drift: float
    z00_error: float
    max_abs_z0k: float
    m0_excess: float
    conjugacy_defect: float
    max_abs: float

    def ok(self, drift_tol=1e-10, excess_tol=1e-6, conj_tol=1e-12) -> bool:
        return (self.k0_drift < drift_tol and self.z00_error < drift_tol
                and self.m0_excess <= excess_tol and self.conjugacy_defect < conj_tol)


def invariant_report(series: LatticeSeries, n_conj_samples: int = 5) -> InvariantReport:
    """k = 0 drift, |Z^0_0 - 1|, excess of |Z^0_k| over 1, and rhs conjugacy consistency."""
    Z = series.Z
    drift = float(np.max(np.abs(Z[:, :, 0] - Z[0, :, 0])))
    z00 = float(np.max(np.abs(Z[:, 0, 0] - 1.0)))
    z0k = float(np.max(np.abs(Z[:, 0, :])))
    picks = np.unique(np.linspace(0, len(series) - 1, min(n_conj_samples, len(series))).astype(int))
    conj = max(conjugacy_defect(series.at(i)) for i in picks)
    return InvariantReport(drift, z00, z0k, max(0.0, z0k - 1.0), conj, float(np.max(np.abs(Z))))
