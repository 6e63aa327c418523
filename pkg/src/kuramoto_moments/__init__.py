"""Finite-N Kuramoto oscillators, their continuum limit, and the shared moments system."""

from .coupling import CouplingFunction
from .errors import (ConfigError, DegenerateMeasureError, KuramotoMomentsError,
                     LatticeBlowUpError, MomentsDoNotExistError, NonFiniteStateError,
                     UnsupportedOperationError)
from .measures import (BimodalGaussianFrequency, DiscretizedMeasure, FrequencyAtoms,
                       GaussianFrequency, LorentzianFrequency, MeasureSpec, PhaseAtoms,
                       PointMassPhase, UniformFrequency, UniformPhase, WrappedGaussianPhase,
                       absolute_moment, build_discretization, carleman_check, sample_pairs)
from .orthopoly import (RecurrenceCoefficients, eval_poly, eval_polys, gauss_nodes,
                        orthonormality_residual, recurrence_coefficients)
from .oscillators import (OscillatorState, Trajectory, empirical_moment, integrate,
                          moment_identity_residual, order_parameter, rhs)
from .continuum import (CharacteristicEnsemble, continuum_moment, density_along_characteristics,
                        initial_continuity_probe, integrate_characteristics, picard_iterate)
from .momentsys import (MomentLattice, init_lattice, integrate_moments, invariant_report,
                        moments_rhs)

__version__ = "0.1.0"
