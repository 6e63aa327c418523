"""Initial measures h(theta, omega) = phase law x frequency law on S^1 x R.

Phase laws live on [0, 2*pi); frequency laws on the real line.  Every
frequency law accepted by :class:`MeasureSpec` must have finite absolute
moments of all orders, because the orthonormal-polynomial machinery needs
them.  The Lorentzian is kept only so that this requirement can be checked
and reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, special

from .errors import MomentsDoNotExistError, UnsupportedOperationError
from .rng import SeedLike, make_rng

TWO_PI = 2.0 * np.pi


def _atoms(points, weights, name):
    points = np.asarray(points, dtype=float).reshape(-1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if points.size == 0 or points.shape != weights.shape:
        raise ValueError(f"{name}: need matching, nonempty point and weight lists")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)) or not np.all(np.isfinite(points)):
        raise ValueError(f"{name}: weights must be finite and nonnegative")
    total = weights.sum()
    if not np.isclose(total, 1.0, rtol=0, atol=1e-12):
        raise ValueError(f"{name}: weights must sum to 1 (got {total!r})")
    return tuple(points.tolist()), tuple((weights / total).tolist())


# ---------------------------------------------------------------- phase laws


@dataclass(frozen=True)
class UniformPhase:
    law = "uniform"

    has_density = True

    def sample(self, rng, n):
        return rng.uniform(0.0, TWO_PI, size=n)

    def nodes(self, n_theta):
        theta = TWO_PI * np.arange(n_theta) / n_theta
        return theta, np.full(n_theta, 1.0 / n_theta)

    def density(self, theta):
        return np.full(np.shape(theta), 1.0 / TWO_PI)

    def fourier(self, k: int) -> complex:
        return 1.0 + 0j if k == 0 else 0j

    def to_dict(self):
        return {"law": self.law}


@dataclass(frozen=True)
class WrappedGaussianPhase:
    """Normal(center, 1/concentration) wrapped onto the circle.

    E[e^{ik theta}] = e^{ik center} exp(-k^2 / (2 concentration)).
    """

    center: float = 0.0
    concentration: float = 1.0
    law = "wrapped-gaussian"
    has_density = True

    def __post_init__(self):
        if not (self.concentration > 0 and np.isfinite(self.concentration)):
            raise ValueError("wrapped-gaussian concentration must be positive and finite")
        if not np.isfinite(self.center):
            raise ValueError("wrapped-gaussian center must be finite")

    @property
    def sigma(self) -> float:
        return float(np.sqrt(1.0 / self.concentration))

    def sample(self, rng, n):
        return np.mod(self.center + self.sigma * rng.standard_normal(n), TWO_PI)

    def fourier(self, k: int) -> complex:
        return complex(np.exp(1j * k * self.center - 0.5 * k * k / self.concentration))

    def density(self, theta):
        theta = np.asarray(theta, dtype=float)
        # Fourier series, truncated where exp(-k^2 sigma^2 / 2) < 1e-18
        kmax = int(np.ceil(np.sqrt(2 * 41.5 * self.concentration))) + 1
        k = np.arange(1, kmax + 1)
        decay = np.exp(-0.5 * k * k / self.concentration)
        phase = np.multiply.outer(theta - self.center, k)
        return (1.0 + 2.0 * (decay * np.cos(phase)).sum(axis=-1)) / TWO_PI

    def nodes(self, n_theta):
        theta = TWO_PI * np.arange(n_theta) / n_theta
        w = self.density(theta) * (TWO_PI / n_theta)
        return theta, w / w.sum()

    def to_dict(self):
        return {"law": self.law, "center": self.center, "concentration": self.concentration}


@dataclass(frozen=True)
class PointMassPhase:
    theta0: float = 0.0
    law = "point-mass"
    has_density = False

    def sample(self, rng, n):
        return np.full(n, np.mod(self.theta0, TWO_PI))

    def nodes(self, n_theta):
        return np.array([np.mod(self.theta0, TWO_PI)]), np.array([1.0])

    def fourier(self, k: int) -> complex:
        return complex(np.exp(1j * k * self.theta0))

    def density(self, theta):
        raise UnsupportedOperationError("a point-mass phase law has no density")

    def to_dict(self):
        return {"law": self.law, "theta0": self.theta0}


@dataclass(frozen=True)
class PhaseAtoms:
    """Weighted atoms [(theta, weight)]; weights must sum to 1."""

    thetas: Tuple[float, ...]
    weights: Tuple[float, ...]
    law = "atoms"
    has_density = False

    def __post_init__(self):
        t, w = _atoms(self.thetas, self.weights, "phase atoms")
        object.__setattr__(self, "thetas", tuple(np.mod(t, TWO_PI).tolist()))
        object.__setattr__(self, "weights", w)

    def sample(self, rng, n):
        idx = rng.choice(len(self.thetas), size=n, p=np.asarray(self.weights))
        return np.asarray(self.thetas)[idx]

    def nodes(self, n_theta):
        return np.asarray(self.thetas), np.asarray(self.weights)

    def fourier(self, k: int) -> complex:
        return complex(np.dot(self.weights, np.exp(1j * k * np.asarray(self.thetas))))

    def density(self, theta):
        raise UnsupportedOperationError("an atomic phase law has no density")

    def to_dict(self):
        return {"law": self.law, "atoms": [[t, w] for t, w in zip(self.thetas, self.weights)]}


# ------------------------------------------------------------ frequency laws


def _gaussian_abs_moment(mean, sd, n):
    if n == 0:
        return 1.0
    if sd == 0:
        return abs(mean) ** n
    central = sd ** n * np.exp(0.5 * n * np.log(2.0) + special.gammaln(0.5 * (n + 1))) / np.sqrt(np.pi)
    if mean == 0:
        return float(central)
    # E|X|^n for X ~ N(mean, sd^2): Kummer function form
    return float(central * special.hyp1f1(-0.5 * n, 0.5, -0.5 * (mean / sd) ** 2))


@dataclass(frozen=True)
class GaussianFrequency:
    mean: float = 0.0
    sd: float = 1.0
    law = "gaussian"
    has_all_moments = True
    # Hermite bootstrap weights underflow past |x| ~ 37.7, corrupting b_n beyond ~340
    max_order = 320
    compact_support = False
    support_size = np.inf

    def __post_init__(self):
        if not (self.sd > 0 and np.isfinite(self.sd) and np.isfinite(self.mean)):
            raise ValueError("gaussian frequency law needs finite mean and sd > 0")

    @property
    def support(self):
        return (-np.inf, np.inf)

    def sample(self, rng, n):
        return self.mean + self.sd * rng.standard_normal(n)

    def quadrature(self, n):
        x, w = special.roots_hermitenorm(n)
        return self.mean + self.sd * x, w / w.sum()

    def absolute_moment(self, n):
        return _gaussian_abs_moment(self.mean, self.sd, n)

    def pdf(self, x):
        return np.exp(-0.5 * ((np.asarray(x) - self.mean) / self.sd) ** 2) / (self.sd * np.sqrt(TWO_PI))

    def effective_support(self, n_sd=9.0):
        return (self.mean - n_sd * self.sd, self.mean + n_sd * self.sd)

    def to_dict(self):
        return {"law": self.law, "mean": self.mean, "sd": self.sd}


@dataclass(frozen=True)
class UniformFrequency:
    lo: float = -1.0
    hi: float = 1.0
    law = "uniform"
    has_all_moments = True
    compact_support = True
    support_size = np.inf

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.hi > self.lo):
            raise ValueError("uniform frequency law needs finite lo < hi")

    @property
    def support(self):
        return (self.lo, self.hi)

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=n)

    def quadrature(self, n):
        x, w = special.roots_legendre(n)
        half = 0.5 * (self.hi - self.lo)
        return self.lo + half * (x + 1.0), w / w.sum()

    def absolute_moment(self, n):
        if n == 0:
            return 1.0

        def prim(x):
            return np.sign(x) * abs(x) ** (n + 1) / (n + 1)

        return float((prim(self.hi) - prim(self.lo)) / (self.hi - self.lo))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def effective_support(self, n_sd=None):
        return (self.lo, self.hi)

    def to_dict(self):
        return {"law": self.law, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class FrequencyAtoms:
    """Discrete law [(omega, weight)]."""

    omegas: Tuple[float, ...]
    weights: Tuple[float, ...]
    law = "discrete"
    has_all_moments = True
    compact_support = True

    def __post_init__(self):
        o, w = _atoms(self.omegas, self.weights, "frequency atoms")
        object.__setattr__(self, "omegas", o)
        object.__setattr__(self, "weights", w)

    @property
    def support(self):
        return (min(self.omegas), max(self.omegas))

    @property
    def support_size(self):
        pts = {o for o, w in zip(self.omegas, self.weights) if w > 0}
        return len(pts)

    def sample(self, rng, n):
        idx = rng.choice(len(self.omegas), size=n, p=np.asarray(self.weights))
        return np.asarray(self.omegas)[idx]

    def quadrature(self, n=None):
        # the atoms are an exact rule for every polynomial degree
        keep = np.asarray(self.weights) > 0
        return np.asarray(self.omegas)[keep], np.asarray(self.weights)[keep]

    def absolute_moment(self, n):
        return float(np.dot(self.weights, np.abs(self.omegas) ** n))

    def to_dict(self):
        return {"law": self.law, "atoms": [[o, w] for o, w in zip(self.omegas, self.weights)]}


@dataclass(frozen=True)
class BimodalGaussianFrequency:
    """Equal mixture of N(-omega0, sd^2) and N(+omega0, sd^2)."""

    omega0: float = 1.0
    sd: float = 0.5
    law = "bimodal-gaussian"
    has_all_moments = True
    max_order = 320
    compact_support = False
    support_size = np.inf

    def __post_init__(self):
        if not (self.sd > 0 and np.isfinite(self.sd) and np.isfinite(self.omega0)):
            raise ValueError("bimodal-gaussian needs finite omega0 and sd > 0")

    @property
    def support(self):
        return (-np.inf, np.inf)

    def sample(self, rng, n):
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return sign * self.omega0 + self.sd * rng.standard_normal(n)

    def quadrature(self, n):
        x, w = special.roots_hermitenorm(n)
        w = w / w.sum()
        return (np.concatenate([-self.omega0 + self.sd * x, self.omega0 + self.sd * x]),
                np.concatenate([0.5 * w, 0.5 * w]))

    def absolute_moment(self, n):
        # symmetric mixture: |omega| has the same law under both components
        return _gaussian_abs_moment(self.omega0, self.sd, n)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (np.exp(-0.5 * ((x - self.omega0) / self.sd) ** 2)
                      + np.exp(-0.5 * ((x + self.omega0) / self.sd) ** 2)) / (self.sd * np.sqrt(TWO_PI))

    def effective_support(self, n_sd=9.0):
        reach = abs(self.omega0) + n_sd * self.sd
        return (-reach, reach)

    def to_dict(self):
        return {"law": self.law, "omega0": self.omega0, "sd": self.sd}


@dataclass(frozen=True)
class LorentzianFrequency:
    """Cauchy law.  Only its zeroth absolute moment exists; rejected by MeasureSpec."""

    center: float = 0.0
    width: float = 1.0
    law = "lorentzian"
    has_all_moments = False
    compact_support = False
    support_size = np.inf

    @property
    def support(self):
        return (-np.inf, np.inf)

    def sample(self, rng, n):
        return self.center + self.width * rng.standard_cauchy(n)

    def quadrature(self, n):
        raise MomentsDoNotExistError(self)

    def absolute_moment(self, n):
        if n == 0:
            return 1.0
        raise MomentsDoNotExistError(self, order=n)

    def to_dict(self):
        return {"law": self.law, "center": self.center, "width": self.width}


PhaseLaw = Union[UniformPhase, WrappedGaussianPhase, PointMassPhase, PhaseAtoms]
FrequencyLaw = Union[GaussianFrequency, UniformFrequency, FrequencyAtoms,
                     BimodalGaussianFrequency, LorentzianFrequency]


@dataclass(frozen=True)
class MeasureSpec:
    """Product measure h = phase law x frequency law."""

    phase: PhaseLaw = field(default_factory=UniformPhase)
    frequency: FrequencyLaw = field(default_factory=GaussianFrequency)

    def __post_init__(self):
        if not getattr(self.frequency, "has_all_moments", False):
            raise MomentsDoNotExistError(self.frequency)

    @property
    def has_density(self) -> bool:
        return self.phase.has_density

    def density(self) -> Callable:
        """h as a density w.r.t. d(theta) x dg(omega), i.e. the phase density."""
        if not self.phase.has_density:
            raise UnsupportedOperationError(
                f"phase law {self.phase.law!r} has no density; density reconstruction needs one"
            )
        phase = self.phase
        return lambda theta, omega: phase.density(theta)

    def to_dict(self):
        return {"phase": self.phase.to_dict(), "frequency": self.frequency.to_dict()}

    @classmethod
    def from_dict(cls, d) -> "MeasureSpec":
        return cls(phase=phase_law_from_dict(d["phase"]),
                   frequency=frequency_law_from_dict(d["frequency"]))


def phase_law_from_dict(d) -> PhaseLaw:
    d = dict(d)
    law = d.pop("law")
    if law == "uniform":
        return UniformPhase(**d)
    if law == "wrapped-gaussian":
        return WrappedGaussianPhase(**d)
    if law == "point-mass":
        return PointMassPhase(**d)
    if law == "atoms":
        atoms = d.pop("atoms")
        if d:
            raise TypeError(f"unexpected keys {sorted(d)}")
        return PhaseAtoms(tuple(a[0] for a in atoms), tuple(a[1] for a in atoms))
    raise ValueError(f"unknown phase law {law!r}")


def frequency_law_from_dict(d) -> FrequencyLaw:
    d = dict(d)
    law = d.pop("law")
    if law == "gaussian":
        return GaussianFrequency(**d)
    if law == "uniform":
        return UniformFrequency(**d)
    if law == "bimodal-gaussian":
        return BimodalGaussianFrequency(**d)
    if law == "lorentzian":
        return LorentzianFrequency(**d)
    if law == "discrete":
        atoms = d.pop("atoms")
        if d:
            raise TypeError(f"unexpected keys {sorted(d)}")
        return FrequencyAtoms(tuple(a[0] for a in atoms), tuple(a[1] for a in atoms))
    raise ValueError(f"unknown frequency law {law!r}")


# ------------------------------------------------------- discretized measure


@dataclass(frozen=True, eq=False)
class DiscretizedMeasure:
    """Weighted nodes (theta_q, omega_q, w_q) standing in for integrals against h.

    For tensor-product discretizations ``grid_shape == (n_omega, n_theta)`` and
    node q sits at omega index q // n_theta, theta index q % n_theta.
    """

    theta: np.ndarray
    omega: np.ndarray
    weights: np.ndarray
    source: Optional[MeasureSpec] = None
    grid_shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        for name in ("theta", "omega", "weights"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.theta.shape == self.omega.shape == self.weights.shape):
            raise ValueError("theta, omega and weights must have the same length")
        if np.any(self.weights < 0):
            raise ValueError("discretization weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"discretization weights sum to {self.weights.sum()!r}, not 1")

    @classmethod
    def from_atoms(cls, theta, omega, weights=None) -> "DiscretizedMeasure":
        """Arbitrary (possibly non-product) atomic measure; equal weights by default."""
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if weights is None:
            weights = np.full(theta.size, 1.0 / theta.size)
        return cls(theta, omega, weights)

    def __len__(self):
        return self.theta.size

    def integrate(self, fn) -> complex:
        """sum_q w_q fn(theta_q, omega_q)."""
        return np.dot(self.weights, fn(self.theta, self.omega))


def composite_rule(g, n_omega: int, order: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """Density-weighted composite Gauss-Legendre rule on the effective support of g.

    ``n_omega // order`` equal panels.  Node spacing is nearly uniform and
    fine, which pushes the discrete-spectrum recurrence time 2*pi / spacing
    far beyond what a Gauss rule of g reaches.  Used for long runs.
    """
    if not hasattr(g, "pdf"):
        raise UnsupportedOperationError(f"composite rule needs a density; {g.law!r} has none")
    panels = max(1, n_omega // order)
    lo, hi = g.effective_support()
    edges = np.linspace(lo, hi, panels + 1)
    x, w = special.roots_legendre(order)
    half = 0.5 * np.diff(edges)
    nodes = (edges[:-1, None] + half[:, None] * (x + 1.0)).reshape(-1)
    weights = (half[:, None] * w).reshape(-1) * g.pdf(nodes)
    return nodes, weights / weights.sum()


def build_discretization(spec: MeasureSpec, n_omega: int = 40, n_theta: int = 128,
                         omega_rule: str = "gauss") -> DiscretizedMeasure:
    """Tensor grid: Gauss nodes of g in omega times equispaced phase nodes.

    Atomic laws (point-mass / atom phase laws, discrete g) use their own atoms
    and ignore the corresponding resolution argument.  ``omega_rule="composite"``
    swaps the Gauss rule for :func:`composite_rule` (long-time runs).
    """
    from .orthopoly import gauss_nodes, recurrence_coefficients

    if n_omega < 1 or n_theta < 1:
        raise ValueError("n_omega and n_theta must be >= 1")
    g = spec.frequency
    if not g.has_all_moments:
        raise MomentsDoNotExistError(g)
    theta_n, theta_w = spec.phase.nodes(n_theta)
    if isinstance(g, FrequencyAtoms):
        omega_n, omega_w = g.quadrature()
    elif omega_rule == "composite":
        omega_n, omega_w = composite_rule(g, n_omega)
    elif omega_rule != "gauss":
        raise ValueError(f"unknown omega_rule {omega_rule!r}")
    else:
        omega_n, omega_w = gauss_nodes(recurrence_coefficients(g, n_omega - 1), n_omega)
    theta_w = theta_w / theta_w.sum()
    omega_w = omega_w / omega_w.sum()
    theta = np.tile(theta_n, omega_n.size)
    omega = np.repeat(omega_n, theta_n.size)
    w = np.outer(omega_w, theta_w).reshape(-1)
    w = w / w.sum()
    return DiscretizedMeasure(theta, omega, w, source=spec,
                              grid_shape=(omega_n.size, theta_n.size))


def sample_pairs(spec: MeasureSpec, N: int, seed: SeedLike) -> Tuple[np.ndarray, np.ndarray]:
    """N i.i.d. draws (theta_j, omega_j) from h; a pure function of (spec, N, seed)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    rng = make_rng(seed)
    theta = spec.phase.sample(rng, N)
    omega = spec.frequency.sample(rng, N)
    return np.asarray(theta, dtype=float), np.asarray(omega, dtype=float)


def _frequency(law_or_spec):
    return law_or_spec.frequency if isinstance(law_or_spec, MeasureSpec) else law_or_spec


def absolute_moment(law_or_spec, n: int) -> float:
    """M^n_0 = integral |omega|^n dg."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    return _frequency(law_or_spec).absolute_moment(n)


def absolute_moment_quad(law, n: int) -> float:
    """Adaptive-quadrature value of E|omega|^n for laws with a density (cross-check path)."""
    if isinstance(law, GaussianFrequency):
        pdf = lambda x: np.exp(-0.5 * ((x - law.mean) / law.sd) ** 2) / (law.sd * np.sqrt(TWO_PI))
    elif isinstance(law, BimodalGaussianFrequency):
        def pdf(x):
            return 0.5 * (np.exp(-0.5 * ((x - law.omega0) / law.sd) ** 2)
                          + np.exp(-0.5 * ((x + law.omega0) / law.sd) ** 2)) / (law.sd * np.sqrt(TWO_PI))
    elif isinstance(law, UniformFrequency):
        val, _ = integrate.quad(lambda x: abs(x) ** n / (law.hi - law.lo), law.lo, law.hi,
                                points=[0.0] if law.lo < 0 < law.hi else None)
        return val
    elif isinstance(law, LorentzianFrequency):
        raise MomentsDoNotExistError(law, order=n)
    else:
        raise UnsupportedOperationError(f"no density for {law!r}")
    lo, _ = integrate.quad(lambda x: abs(x) ** n * pdf(x), -np.inf, 0.0, limit=200)
    hi, _ = integrate.quad(lambda x: abs(x) ** n * pdf(x), 0.0, np.inf, limit=200)
    return lo + hi


@dataclass(frozen=True)
class CarlemanResult:
    partial_sum: float
    verdict: str
    terms: np.ndarray
    slope: Optional[float] = None


def carleman_check(law_or_spec, n_terms: int = 40) -> CarlemanResult:
    """Evidence for M-determinacy from Carleman's series sum_n (M^n_0 + 1)^{-1/n}.

    Verdicts: "determinate" for compactly supported g (a theorem, not a
    heuristic); "consistent-with-determinate" when the terms decay no faster
    than c/n over the tail; "inconclusive" otherwise.  A finite partial sum
    can never decide divergence, so the middle verdict is evidence only.
    """
    if n_terms < 2:
        raise ValueError("n_terms must be >= 2")
    g = _frequency(law_or_spec)
    if not g.has_all_moments:
        raise MomentsDoNotExistError(g)
    n = np.arange(1, n_terms + 1)
    moments = np.array([absolute_moment(g, int(k)) for k in n], dtype=float)
    terms = np.exp(-np.log1p(moments) / n)
    partial = float(terms.sum())
    if g.compact_support:
        return CarlemanResult(partial, "determinate", terms)
    tail = slice(n_terms // 2, None)
    slope = float(np.polyfit(np.log(n[tail]), np.log(terms[tail]), 1)[0])
    verdict = "consistent-with-determinate" if slope >= -1.0 else "inconclusive"
    return CarlemanResult(partial, verdict, terms, slope)
