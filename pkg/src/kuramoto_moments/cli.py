"""Command-line entry point.

    kuramoto-moments {simulate,continuum,moments,converge,orthopoly} --config PATH [--seed U64] [--out DIR]

Exit status: 0 on success; otherwise a category-specific code with a
one-line ``error[<category>]: ...`` diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import csvio
from .config import SimConfig, dump_config, load_config
from .continuum import integrate_characteristics
from .errors import ConfigError, KuramotoMomentsError
from .harness import emit_report, run_convergence_experiment
from .measures import build_discretization, sample_pairs
from .momentsys import init_lattice, integrate_moments
from .oscillators import OscillatorState, integrate
from .orthopoly import recurrence_coefficients
from .rng import substream

EXIT_CODES = {
    "config": 2,
    "measure": 3,
    "numerical": 4,
    "unsupported": 5,
    "io": 6,
    "error": 1,
}


def _apply_overrides(cfg: SimConfig, args) -> SimConfig:
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, experiment=dataclasses.replace(cfg.experiment, seed=args.seed))
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=str(args.out))
    return cfg


def cmd_simulate(cfg: SimConfig, out: Path):
    n = cfg.simulate.n
    theta, omega = sample_pairs(cfg.measure, n, substream(cfg.experiment.seed, n, 0))
    it = cfg.integrator
    traj = integrate(OscillatorState(theta, omega, cfg.K, cfg.coupling), it.t_end, it.dt, it.stride)
    return [traj.to_csv(out / "trajectory.csv")]


def cmd_continuum(cfg: SimConfig, out: Path):
    d, it = cfg.discretization, cfg.integrator
    h_disc = build_discretization(cfg.measure, d.n_omega, d.n_theta, d.omega_rule)
    traj = integrate_characteristics(h_disc, cfg.K, cfg.coupling, it.t_end, it.dt, it.stride)
    return [traj.to_csv(out / "continuum.csv")]


def cmd_moments(cfg: SimConfig, out: Path):
    d, it, tr = cfg.discretization, cfg.integrator, cfg.truncation
    coeffs = recurrence_coefficients(cfg.measure.frequency, tr.m_max)
    h_disc = build_discretization(cfg.measure, d.n_omega, d.n_theta, d.omega_rule)
    lat = init_lattice(h_disc, coeffs, tr.m_max, tr.k_max, cfg.K, cfg.coupling)
    series = integrate_moments(lat, it.t_end, it.dt, it.stride)
    return [series.to_csv(out / "lattice.csv")]


def cmd_converge(cfg: SimConfig, out: Path):
    report = run_convergence_experiment(cfg)
    paths = emit_report(report, out)
    return list(paths.values())


def cmd_orthopoly(cfg: SimConfig, out: Path):
    coeffs = recurrence_coefficients(cfg.measure.frequency, cfg.truncation.m_max)
    rows = ((n, coeffs.a[n], coeffs.b[n] if n < coeffs.b.size else "")
            for n in range(coeffs.m_max + 1))
    return [csvio.write_csv(out / "coefficients.csv", ["n", "a", "b"], rows)]


COMMANDS = {
    "simulate": (cmd_simulate, "integrate one finite-N system, write trajectory.csv"),
    "continuum": (cmd_continuum, "integrate the continuum reference, write continuum.csv"),
    "moments": (cmd_moments, "integrate the truncated moments system, write lattice.csv"),
    "converge": (cmd_converge, "finite-N vs continuum convergence study"),
    "orthopoly": (cmd_orthopoly, "dump recurrence coefficients a_n, b_n"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kuramoto-moments", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="YAML config file")
        p.add_argument("--seed", type=int, default=None, help="override experiment.seed")
        p.add_argument("--out", type=Path, default=None, help="override output_dir")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.seed is not None and not (0 <= args.seed < 2 ** 64):
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        cfg = _apply_overrides(load_config(args.config), args)
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        dump_config(cfg, out / "effective_config.yaml")
        fn, _ = COMMANDS[args.command]
        for path in fn(cfg, out):
            print(path)
    except KuramotoMomentsError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_CODES["io"]
    return 0


if __name__ == "__main__":
    sys.exit(main())
