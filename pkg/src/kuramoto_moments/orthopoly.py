"""Orthonormal polynomials of a frequency law g via the Stieltjes procedure.

The polynomials obey

    omega P_n = b_n P_{n+1} + a_n P_n + b_{n-1} P_{n-1},   P_0 = 1,  b_{-1} = 0,

and the symmetric tridiagonal matrix with diagonal a and off-diagonal b is the
Jacobi matrix of g.  Its truncations give Gauss rules (Golub-Welsch).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DegenerateMeasureError, MomentsDoNotExistError


@dataclass(frozen=True, eq=False)
class RecurrenceCoefficients:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        b = np.array(self.b, dtype=float).reshape(-1)
        if a.size == 0 or b.size != a.size - 1:
            raise ValueError("need len(b) == len(a) - 1 >= 0")
        if np.any(b <= 0):
            raise ValueError("off-diagonal coefficients b_n must be positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m_max(self) -> int:
        return self.a.size - 1

    def b_ext(self, n: int) -> float:
        """b_n with b_{-1} = 0 and zero beyond the stored range (truncation closure)."""
        if n < 0 or n >= self.b.size:
            return 0.0
        return float(self.b[n])

    def jacobi_matrix(self, n: int = None) -> np.ndarray:
        n = self.a.size if n is None else n
        return np.diag(self.a[:n]) + np.diag(self.b[:n - 1], 1) + np.diag(self.b[:n - 1], -1)

    def truncate(self, m_max: int) -> "RecurrenceCoefficients":
        if m_max > self.m_max:
            raise IndexError(f"only {self.m_max} available, asked for {m_max}")
        return RecurrenceCoefficients(self.a[:m_max + 1], self.b[:m_max])


def stieltjes(nodes: np.ndarray, weights: np.ndarray, m_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Discretized Stieltjes procedure for the measure sum_i weights_i delta(nodes_i).

    Returns a[0..m_max], b[0..m_max-1].  Works with weighted values of the
    normalized polynomials at the nodes, so no monomial Gram matrix is formed.
    """
    x = np.asarray(nodes, dtype=float)
    w = np.asarray(weights, dtype=float)
    keep = w > 0
    x, w = x[keep], w[keep] / w[keep].sum()
    scale = max(1.0, float(np.max(np.abs(x))))
    a = np.empty(m_max + 1)
    b = np.empty(m_max)
    # q_n = sqrt(w) * P_n(x) are unit vectors, so nothing overflows at tiny-weight nodes
    q_prev = np.zeros_like(x)
    q = np.sqrt(w)
    b_prev = 0.0
    for n in range(m_max + 1):
        a[n] = np.dot(x * q, q)
        if n == m_max:
            break
        r = (x - a[n]) * q - b_prev * q_prev
        bn = np.sqrt(np.dot(r, r))
        if not bn > 1e-13 * scale:
            raise DegenerateMeasureError(
                f"measure support too small: L^2(g) has dimension {n + 1}, "
                f"cannot build {m_max + 1} orthonormal polynomials"
            )
        b[n] = bn
        q_prev, q, b_prev = q, r / bn, bn
    return a, b


def recurrence_coefficients(g, m_max: int) -> RecurrenceCoefficients:
    """a_n, b_n of the orthonormal family of g, n <= m_max.

    The bootstrap rule is an analytic Gauss rule of g (Hermite for gaussian,
    Legendre for uniform) with 4*m_max + 2 nodes, or the atoms themselves.
    """
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    if not getattr(g, "has_all_moments", False):
        raise MomentsDoNotExistError(g)
    if g.support_size < m_max + 1:
        raise DegenerateMeasureError(
            f"measure support too small: g has {g.support_size} support points, "
            f"L^2(g) cannot hold {m_max + 1} orthonormal polynomials"
        )
    if m_max > getattr(g, "max_order", np.inf):
        raise ValueError(f"m_max={m_max} exceeds the reliable range {g.max_order} for {g.law!r}")
    nodes, weights = g.quadrature(4 * m_max + 2)
    a, b = stieltjes(nodes, weights, m_max)
    return RecurrenceCoefficients(a, b)


def eval_polys(coeffs: RecurrenceCoefficients, omega, m_max: int = None) -> np.ndarray:
    """P_0..P_{m_max} at omega by upward recurrence; shape (m_max+1, *omega.shape)."""
    m_max = coeffs.m_max if m_max is None else m_max
    if m_max < 0 or m_max > coeffs.m_max:
        raise IndexError(f"polynomial index {m_max} outside 0..{coeffs.m_max}")
    omega = np.asarray(omega, dtype=float)
    out = np.empty((m_max + 1,) + omega.shape)
    out[0] = 1.0
    if m_max >= 1:
        out[1] = (omega - coeffs.a[0]) / coeffs.b[0]
    for n in range(1, m_max):
        out[n + 1] = ((omega - coeffs.a[n]) * out[n] - coeffs.b[n - 1] * out[n - 1]) / coeffs.b[n]
    return out


def eval_poly(coeffs: RecurrenceCoefficients, m: int, omega):
    if m < 0 or m > coeffs.m_max:
        raise IndexError(f"polynomial index {m} outside 0..{coeffs.m_max}")
    val = eval_polys(coeffs, omega, m)[m]
    return float(val) if np.ndim(val) == 0 else val


def gauss_nodes(coeffs: RecurrenceCoefficients, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """n-point Gauss rule of g from the leading n x n Jacobi block.

    Nodes are the eigenvalues; weights are squared first eigenvector
    components (total mass 1).  Exact for polynomials of degree <= 2n - 1.
    """
    if n < 1 or n > coeffs.m_max + 1:
        raise IndexError(f"{n}-point rule needs a_0..a_{n - 1}; have up to a_{coeffs.m_max}")
    if n == 1:
        return np.array([coeffs.a[0]]), np.array([1.0])
    nodes, vecs = eigh_tridiagonal(coeffs.a[:n], coeffs.b[:n - 1])
    weights = vecs[0] ** 2
    return nodes, weights / weights.sum()


def orthonormality_residual(coeffs: RecurrenceCoefficients, g, m_max: int = None) -> np.ndarray:
    """|(P_i, P_j) - delta_ij| for i, j <= m_max, with inner products by quadrature of g."""
    m_max = coeffs.m_max if m_max is None else m_max
    nodes, weights = g.quadrature(2 * m_max + 2)
    P = eval_polys(coeffs, nodes, m_max)
    gram = (P * weights) @ P.T
    return np.abs(gram - np.eye(m_max + 1))
