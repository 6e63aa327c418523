"""Experiment configuration: YAML file <-> frozen dataclasses.

Grammar (every section optional except where marked)::

    measure:                      # required
      phase:     {law: ..., <law parameters>}      # required
      frequency: {law: ..., <law parameters>}      # required
    coupling:
      K: 1.0                                       # required, >= 0
      function: sin                                # or:
      harmonics: [[l, re, im], ...]                # l >= 0, f_{-l} = conj(f_l)
    integrator:     {dt: 0.01, t_end: 10.0, stride: 10}
    truncation:     {m_max: 24, k_max: 24}
    discretization: {n_omega: 40, n_theta: 128, omega_rule: gauss}
    experiment:
      n_list: [100, 400, 1600, 6400]   # strictly increasing
      trials: 20
      observe_times: [0.0, 2.0, 5.0]
      moments: [[0, 1]]                # (m, k) pairs to track
      delta: 0.05                      # quantile level for C = quantile_{1-delta}(sqrt(N) err)
      seed: 0
    simulate: {n: 1000}
    output_dir: out

Phase laws: uniform | wrapped-gaussian(center, concentration) |
point-mass(theta0) | atoms(atoms: [[theta, w], ...]).
Frequency laws: gaussian(mean, sd) | uniform(lo, hi) | bimodal-gaussian(omega0, sd)
| discrete(atoms: [[omega, w], ...]).

Unknown keys are errors; so are missing required keys.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple

import yaml

from .coupling import CouplingFunction
from .errors import ConfigError
from .measures import (BimodalGaussianFrequency, FrequencyAtoms, GaussianFrequency,
                       LorentzianFrequency, MeasureSpec, PhaseAtoms, PointMassPhase,
                       UniformFrequency, UniformPhase, WrappedGaussianPhase)

PHASE_LAWS = {
    "uniform": UniformPhase,
    "wrapped-gaussian": WrappedGaussianPhase,
    "point-mass": PointMassPhase,
    "atoms": PhaseAtoms,
}
FREQUENCY_LAWS = {
    "gaussian": GaussianFrequency,
    "uniform": UniformFrequency,
    "bimodal-gaussian": BimodalGaussianFrequency,
    "discrete": FrequencyAtoms,
    "lorentzian": LorentzianFrequency,
}


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.01
    t_end: float = 10.0
    stride: int = 10


@dataclass(frozen=True)
class TruncationConfig:
    m_max: int = 24
    k_max: int = 24


@dataclass(frozen=True)
class DiscretizationConfig:
    n_omega: int = 40
    n_theta: int = 128
    omega_rule: str = "gauss"


@dataclass(frozen=True)
class ExperimentConfig:
    n_list: Tuple[int, ...] = (100, 400, 1600, 6400)
    trials: int = 20
    observe_times: Tuple[float, ...] = (0.0, 2.0, 5.0)
    moments: Tuple[Tuple[int, int], ...] = ((0, 1),)
    delta: float = 0.05
    seed: int = 0


@dataclass(frozen=True)
class SimulateConfig:
    n: int = 1000


@dataclass(frozen=True)
class SimConfig:
    measure: MeasureSpec
    K: float
    coupling: CouplingFunction = field(default_factory=CouplingFunction.sine)
    integrator: IntegratorConfig = IntegratorConfig()
    truncation: TruncationConfig = TruncationConfig()
    discretization: DiscretizationConfig = DiscretizationConfig()
    experiment: ExperimentConfig = ExperimentConfig()
    simulate: SimulateConfig = SimulateConfig()
    output_dir: str = "out"

    def __post_init__(self):
        validate(self)


def _finite(name, value):
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")


def validate(cfg: SimConfig) -> None:
    _finite("coupling.K", cfg.K)
    if cfg.K < 0:
        raise ConfigError("coupling.K must be >= 0")
    it = cfg.integrator
    _finite("integrator.dt", it.dt)
    _finite("integrator.t_end", it.t_end)
    if it.dt <= 0 or it.t_end < 0 or it.stride < 1:
        raise ConfigError("integrator needs dt > 0, t_end >= 0, stride >= 1")
    if cfg.truncation.m_max < 0 or cfg.truncation.k_max < 1:
        raise ConfigError("truncation needs m_max >= 0 and k_max >= 1")
    d = cfg.discretization
    if d.n_omega < 1 or d.n_theta < 1 or d.omega_rule not in ("gauss", "composite"):
        raise ConfigError("discretization needs n_omega, n_theta >= 1 and omega_rule gauss|composite")
    ex = cfg.experiment
    if len(ex.n_list) == 0 or any(n < 1 for n in ex.n_list):
        raise ConfigError("experiment.n_list must hold positive integers")
    if any(b <= a for a, b in zip(ex.n_list, ex.n_list[1:])):
        raise ConfigError("experiment.n_list must be strictly increasing")
    if ex.trials < 1:
        raise ConfigError("experiment.trials must be >= 1")
    for t in ex.observe_times:
        _finite("experiment.observe_times", t)
    if not ex.observe_times or min(ex.observe_times) < 0:
        raise ConfigError("experiment.observe_times must be nonempty and >= 0")
    if any(b <= a for a, b in zip(ex.observe_times, ex.observe_times[1:])):
        raise ConfigError("experiment.observe_times must be strictly increasing")
    if not ex.moments or any(m < 0 for m, _ in ex.moments):
        raise ConfigError("experiment.moments must list (m, k) pairs with m >= 0")
    if not (0 < ex.delta < 1):
        raise ConfigError("experiment.delta must lie in (0, 1)")
    if not 0 <= ex.seed < 2 ** 64:
        raise ConfigError("experiment.seed must be an unsigned 64-bit integer")
    if cfg.simulate.n < 1:
        raise ConfigError("simulate.n must be >= 1")


# ------------------------------------------------------------------ parsing


def _check_keys(section: str, given: Dict[str, Any], allowed, required=()):
    if not isinstance(given, dict):
        raise ConfigError(f"section {section or '<top>'} must be a mapping")
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        where = f"{section}." if section else ""
        raise ConfigError("unknown config key(s): " + ", ".join(where + k for k in unknown))
    missing = [k for k in required if k not in given]
    return missing


def _law(section, d, table):
    if not isinstance(d, dict) or "law" not in d:
        raise ConfigError(f"missing required config key(s): {section}.law")
    law = d["law"]
    if law not in table:
        raise ConfigError(f"{section}.law: unknown law {law!r} (choose from {', '.join(table)})")
    cls = table[law]
    params = {k: v for k, v in d.items() if k != "law"}
    if cls in (PhaseAtoms, FrequencyAtoms):
        _check_keys(section, params, ["atoms"])
        if "atoms" not in params:
            raise ConfigError(f"missing required config key(s): {section}.atoms")
        atoms = params["atoms"]
        try:
            return cls(tuple(float(a[0]) for a in atoms), tuple(float(a[1]) for a in atoms))
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(f"{section}.atoms: {exc}") from exc
    names = [f.name for f in dataclasses.fields(cls)]
    _check_keys(section, params, names)
    try:
        return cls(**{k: float(v) for k, v in params.items()})
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def _coupling(d) -> CouplingFunction:
    if "function" in d and "harmonics" in d:
        raise ConfigError("coupling: give either function or harmonics, not both")
    if "harmonics" in d:
        try:
            return CouplingFunction(tuple((int(h[0]), complex(float(h[1]), float(h[2])))
                                          for h in d["harmonics"]))
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(f"coupling.harmonics: {exc}") from exc
    fn = d.get("function", "sin")
    if fn != "sin":
        raise ConfigError(f"coupling.function: only 'sin' is built in, got {fn!r}")
    return CouplingFunction.sine()


def _section(cls, name, d):
    names = [f.name for f in dataclasses.fields(cls)]
    _check_keys(name, d, names)
    out = {}
    for f in dataclasses.fields(cls):
        if f.name not in d:
            continue
        v = d[f.name]
        try:
            if f.name == "moments":
                v = tuple((int(p[0]), int(p[1])) for p in v)
            elif f.name == "n_list":
                v = tuple(int(x) for x in v)
            elif f.name == "observe_times":
                v = tuple(float(x) for x in v)
            elif f.type == "int":
                if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
                    raise ValueError(f"expected an integer, got {v!r}")
                v = int(v)
            elif f.type == "float":
                v = float(v)
            else:
                v = str(v)
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(f"{name}.{f.name}: {exc}") from exc
        out[f.name] = v
    return cls(**out)


TOP_KEYS = ["measure", "coupling", "integrator", "truncation", "discretization",
            "experiment", "simulate", "output_dir"]


def config_from_dict(raw: Dict[str, Any]) -> SimConfig:
    if raw is None:
        raw = {}
    missing = _check_keys("", raw, TOP_KEYS)
    measure = raw.get("measure", {}) or {}
    missing += ["measure." + k for k in _check_keys("measure", measure, ["phase", "frequency"],
                                                       ["phase", "frequency"])]
    coupling = raw.get("coupling", {}) or {}
    missing += ["coupling." + k for k in _check_keys("coupling", coupling,
                                                        ["K", "function", "harmonics"], ["K"])]
    for sub in ("phase", "frequency"):
        if sub in measure and (not isinstance(measure[sub], dict) or "law" not in measure[sub]):
            missing.append(f"measure.{sub}.law")
    if missing:
        raise ConfigError("missing required config key(s): " + ", ".join(missing))
    phase = _law("measure.phase", measure["phase"], PHASE_LAWS)
    freq = _law("measure.frequency", measure["frequency"], FREQUENCY_LAWS)
    spec = MeasureSpec(phase, freq)
    try:
        K = float(coupling["K"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"coupling.K: {exc}") from exc
    return SimConfig(
        measure=spec,
        K=K,
        coupling=_coupling(coupling),
        integrator=_section(IntegratorConfig, "integrator", raw.get("integrator", {}) or {}),
        truncation=_section(TruncationConfig, "truncation", raw.get("truncation", {}) or {}),
        discretization=_section(DiscretizationConfig, "discretization",
                                raw.get("discretization", {}) or {}),
        experiment=_section(ExperimentConfig, "experiment", raw.get("experiment", {}) or {}),
        simulate=_section(SimulateConfig, "simulate", raw.get("simulate", {}) or {}),
        output_dir=str(raw.get("output_dir", "out")),
    )


def load_config(path) -> SimConfig:
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    return config_from_dict(raw)


def config_to_dict(cfg: SimConfig) -> Dict[str, Any]:
    if cfg.coupling.is_sine():
        coupling = {"K": cfg.K, "function": "sin"}
    else:
        coupling = {"K": cfg.K,
                    "harmonics": [[l, c.real, c.imag] for l, c in cfg.coupling.harmonics]}
    ex = cfg.experiment
    return {
        "measure": cfg.measure.to_dict(),
        "coupling": coupling,
        "integrator": dataclasses.asdict(cfg.integrator),
        "truncation": dataclasses.asdict(cfg.truncation),
        "discretization": dataclasses.asdict(cfg.discretization),
        "experiment": {
            "n_list": list(ex.n_list),
            "trials": ex.trials,
            "observe_times": list(ex.observe_times),
            "moments": [list(p) for p in ex.moments],
            "delta": ex.delta,
            "seed": ex.seed,
        },
        "simulate": dataclasses.asdict(cfg.simulate),
        "output_dir": cfg.output_dir,
    }


def dump_config(cfg: SimConfig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
    return path
