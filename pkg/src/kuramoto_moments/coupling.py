"""Coupling functions with finite Fourier support.

A coupling function f(theta) = sum_l f_l e^{i l theta} is stored by its
nonnegative harmonics only; f_{-l} = conj(f_l) keeps f real.  The mean-field
velocity needs only the generalized order parameters sum_q w_q e^{i l x_q},
so a force evaluation costs O(N * len(harmonics)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np


@dataclass(frozen=True)
class CouplingFunction:
    """Real trigonometric polynomial, given by coefficients for l >= 0.

    ``harmonics`` is a tuple of (l, f_l) with distinct l >= 0; f_0 must be real.
    """

    harmonics: tuple

    def __post_init__(self):
        seen = set()
        clean = []
        for l, c in self.harmonics:
            l = int(l)
            c = complex(c)
            if l < 0:
                raise ValueError("store only l >= 0; negative modes follow by conjugation")
            if l in seen:
                raise ValueError(f"duplicate harmonic l={l}")
            if l == 0 and abs(c.imag) > 0:
                raise ValueError("f_0 must be real for a real coupling function")
            seen.add(l)
            if c != 0:
                clean.append((l, c))
        object.__setattr__(self, "harmonics", tuple(sorted(clean)))

    @classmethod
    def sine(cls) -> "CouplingFunction":
        # sin(theta) = (e^{i theta} - e^{-i theta}) / (2i)
        return cls(((1, 1 / 2j),))

    @classmethod
    def from_fourier(cls, coeffs: Mapping[int, complex]) -> "CouplingFunction":
        """Build from a full map l -> f_l; negative l must be conjugates of positive ones."""
        pos = {}
        for l, c in coeffs.items():
            l, c = int(l), complex(c)
            if l >= 0:
                pos[l] = pos.get(l, 0) + c
        for l, c in coeffs.items():
            l, c = int(l), complex(c)
            if l < 0 and not np.isclose(c, np.conj(pos.get(-l, 0)), rtol=1e-12, atol=1e-15):
                raise ValueError(f"f_{{{l}}} must equal conj(f_{{{-l}}}) for a real coupling")
        return cls(tuple(pos.items()))

    @classmethod
    def from_sin_cos(cls, sin: Optional[Mapping[int, float]] = None,
                     cos: Optional[Mapping[int, float]] = None) -> "CouplingFunction":
        """f = sum_l s_l sin(l theta) + c_l cos(l theta)."""
        coef = {}
        for l, s in (sin or {}).items():
            if int(l) <= 0:
                raise ValueError("sine harmonics need l >= 1")
            coef[int(l)] = coef.get(int(l), 0) + s / 2j
        for l, c in (cos or {}).items():
            l = int(l)
            coef[l] = coef.get(l, 0) + (c if l == 0 else c / 2)
        return cls(tuple(coef.items()))

    @property
    def max_harmonic(self) -> int:
        return max((l for l, _ in self.harmonics), default=0)

    def fourier(self) -> dict:
        """Full two-sided coefficient map."""
        out = {}
        for l, c in self.harmonics:
            out[l] = c
            if l:
                out[-l] = np.conj(c)
        return out

    def is_sine(self) -> bool:
        return len(self.harmonics) == 1 and self.harmonics[0][0] == 1 and \
            np.isclose(self.harmonics[0][1], 1 / 2j, rtol=0, atol=1e-15)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for l, c in self.harmonics:
            term = c * np.exp(1j * l * theta)
            out += term.real if l == 0 else 2.0 * term.real
        return out

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for l, c in self.harmonics:
            if l:
                out += 2.0 * (1j * l * c * np.exp(1j * l * theta)).real
        return out

    def sup_norm(self, n_grid: int = 1 << 14) -> float:
        """max |f| (exact for sin; dense-grid value otherwise)."""
        grid = np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False)
        return float(np.max(np.abs(self(grid))))

    def lipschitz(self, n_grid: int = 1 << 14) -> float:
        """max |f'|, the Lipschitz constant of f."""
        grid = np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False)
        return float(np.max(np.abs(self.derivative(grid))))


def order_parameters(x: np.ndarray, weights: Optional[np.ndarray], lmax: int) -> np.ndarray:
    """Generalized order parameters Z_l = sum_q w_q e^{i l x_q} for l = 0..lmax.

    ``x`` may carry leading batch axes; the reduction is over the last axis.
    ``weights=None`` means equal weights 1/N.  Returns shape (lmax+1, *batch, 1).
    """
    z = np.exp(1j * x)
    out = []
    power = np.ones_like(z)
    for _ in range(lmax + 1):
        if weights is None:
            out.append(power.mean(axis=-1, keepdims=True))
        else:
            out.append((power @ weights)[..., None])
        power = power * z
    return np.stack(out)


def mean_field_velocity(
    x: np.ndarray,
    omega: np.ndarray,
    K: float,
    coupling: CouplingFunction,
    weights: Optional[np.ndarray] = None,
) -> np.ndarray:
    """omega_q + K * sum_l f_l Z_l e^{-i l x_q}, the mean-field form of the pairwise sum.

    Equal to omega_i + K * sum_j w_j f(x_j - x_i) without forming the N x N matrix.
    """
    v = np.array(omega, dtype=float, copy=True)
    if K == 0 or not coupling.harmonics:
        return np.broadcast_to(v, np.shape(x)).copy()
    z = np.exp(1j * x)
    zc = np.conj(z)
    if weights is None:
        def reduce(a):
            return a.mean(axis=-1, keepdims=True)
    else:
        def reduce(a):
            return (a @ weights)[..., None]
    force = np.zeros(np.shape(x))
    lmax = coupling.max_harmonic
    coef = dict(coupling.harmonics)
    zl = np.ones_like(z)
    zcl = np.ones_like(zc)
    for l in range(lmax + 1):
        if l in coef:
            if l == 0:
                force += coef[0].real
            else:
                force += 2.0 * (coef[l] * reduce(zl) * zcl).real
        if l < lmax:
            zl = zl * z
            zcl = zcl * zc
    return v + K * force


def pairwise_velocity(x, omega, K, coupling: CouplingFunction, weights=None):
    """O(N^2) reference: omega_i + K * sum_j w_j f(x_j - x_i).  Test oracle only."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    diff = x[..., None, :] - x[..., :, None]
    return np.asarray(omega, dtype=float) + K * (coupling(diff) * w).sum(axis=-1)
