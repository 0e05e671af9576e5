"""Largest generalized eigenvalue of (stiffness, mass) and the optimal
Laplace-sampling parameter derived from it."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .fem import OperatorSet
from .linalg import CholeskyFactor

__all__ = ["BetaSelection", "PowerIterationResult", "max_generalized_eigenvalue", "optimal_beta"]


@dataclass(frozen=True)
class PowerIterationResult:
    lambda_max: float
    iterations: int
    converged: bool

    def __iter__(self):
        # allows ``lam, its = max_generalized_eigenvalue(...)``
        yield self.lambda_max
        yield self.iterations


@dataclass(frozen=True)
class BetaSelection:
    alpha: float
    lambda_max: float
    beta_opt: float
    eta: float

    def lines(self) -> list[str]:
        return [
            f"alpha      {self.alpha:.16g}",
            f"lambda_max {self.lambda_max:.16g}",
            f"beta_opt   {self.beta_opt:.16g}",
            f"eta        {self.eta:.16g}",
        ]


def max_generalized_eigenvalue(
    ops: OperatorSet,
    tol: float = 1e-6,
    max_iter: int = 5000,
    mass_factor: CholeskyFactor | None = None,
) -> PowerIterationResult:
    """Power iteration on ``M^{-1} A`` with Rayleigh-quotient estimates.

    Stops once successive estimates differ by at most ``tol * lambda``. On
    hitting ``max_iter`` the last estimate is returned with
    ``converged=False`` and a ``RuntimeWarning``.
    """
    if not tol > 0:
        raise InvalidArgument(f"tol must be positive, got {tol}")
    A, M = ops.stiffness, ops.mass
    factor = mass_factor if mass_factor is not None else CholeskyFactor(M)

    x = np.full(ops.n_dofs, 1.0 / np.sqrt(ops.n_dofs))
    Ax = A @ x
    lam = float(x @ Ax) / float(x @ (M @ x))
    for it in range(1, max_iter + 1):
        y = factor.solve(Ax)
        x = y / np.linalg.norm(y)
        Ax = A @ x
        new = float(x @ Ax) / float(x @ (M @ x))
        if abs(new - lam) <= tol * abs(new):
            return PowerIterationResult(new, it, True)
        lam = new
    warnings.warn(
        f"power iteration did not converge in {max_iter} iterations; returning best estimate",
        RuntimeWarning,
        stacklevel=2,
    )
    return PowerIterationResult(lam, max_iter, False)


def optimal_beta(alpha: float, lambda_max: float) -> BetaSelection:
    """``beta_opt = sqrt(alpha^2 + lambda_max)`` and the predicted convergence
    factor ``eta = |(i sqrt(lmax) - alpha - beta)/(i sqrt(lmax) - alpha + beta)|``."""
    if not alpha > 0 or not lambda_max > 0:
        raise InvalidArgument(f"alpha and lambda_max must be positive, got {alpha}, {lambda_max}")
    beta = float(np.sqrt(alpha * alpha + lambda_max))
    pole = 1j * np.sqrt(lambda_max)
    eta = float(abs((pole - alpha - beta) / (pole - alpha + beta)))
    return BetaSelection(alpha=float(alpha), lambda_max=float(lambda_max), beta_opt=beta, eta=eta)
