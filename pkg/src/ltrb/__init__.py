"""Laplace-transform reduced-basis solver for the 2D linear wave equation."""

from .errors import (ConfigError, IncompatibleBasis, InvalidArgument, InvalidMesh, InvalidOperator, LTRBError,
                     NumericalFailure)
from .fem import OperatorSet, assemble_operators, gaussian_field, l2_project, load_vector
from .laplace import (QuadratureRule, SeparableForcing, SnapshotSet, TimeProfile, compute_snapshots,
                      make_quadrature, solve_laplace)
from .mesh import Mesh, QualityReport, build_structured_mesh, mesh_quality, read_mesh, write_mesh
from .metrics import (TimingReport, reduced_relative_error, relative_error, singular_value_report,
                      timing_report)
from .newmark import NewmarkConfig, ReducedSystem, Trajectory, energy, lift, newmark_solve, reduce_system
from .pod import ReducedBasis, build_reduced_basis, cholesky_gram, pod_projection_error
from .spectral import BetaSelection, max_generalized_eigenvalue, optimal_beta

__version__ = "0.1.0"
