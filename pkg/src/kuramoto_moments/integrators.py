"""Fixed-step classical Runge-Kutta marching.

The right-hand side is a plain callable ``f(t, y) -> dy/dt`` on numpy arrays
(real or complex).  Interval ends are always hit exactly: an interval of
length T is split into ``ceil(T / dt)`` equal steps.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .errors import NonFiniteStateError

Rhs = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, y + (0.5 * h) * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def n_steps(span: float, dt: float) -> int:
    if dt <= 0 or not math.isfinite(dt):
        raise ValueError(f"dt must be positive and finite, got {dt}")
    if span < 0:
        raise ValueError(f"cannot integrate backwards (span={span})")
    if span == 0:
        return 0
    # tolerate t_end being an integer multiple of dt up to roundoff
    return max(1, math.ceil(span / dt - 1e-9))


def first_nonfinite(y: np.ndarray) -> Optional[int]:
    bad = ~np.isfinite(y)
    if not bad.any():
        return None
    flat = np.flatnonzero(bad.reshape(-1))
    return int(flat[0])


def march(
    f: Rhs,
    y0: np.ndarray,
    times,
    dt: float,
    post_step: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    check: Optional[Callable[[float, np.ndarray], None]] = None,
    step_offset: int = 0,
):
    """Integrate from ``times[0]`` and return the states at every entry of ``times``.

    ``post_step`` is applied after every step (used to reduce phases mod 2*pi);
    ``check`` can raise to abort (used for lattice blow-up detection).
    Raises NonFiniteStateError with the global step index on NaN/inf.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-d sequence")
    if np.any(np.diff(times) <= 0) and times.size > 1:
        raise ValueError("times must be strictly increasing")
    y = np.array(y0, copy=True)
    out = [y.copy()]
    step = step_offset
    for t0, t1 in zip(times[:-1], times[1:]):
        n = n_steps(t1 - t0, dt)
        h = (t1 - t0) / n
        for i in range(n):
            t = t0 + i * h
            y = rk4_step(f, t, y, h)
            step += 1
            if post_step is not None:
                y = post_step(y)
            bad = first_nonfinite(y)
            if bad is not None:
                raise NonFiniteStateError(step, index=bad, time=t + h)
            if check is not None:
                check(t + h, y)
        out.append(y.copy())
    return out
