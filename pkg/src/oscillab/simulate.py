"""Time stepping for the five PDE kinds, steady states, and the modal solution.

Linear kinds advance by ``u <- M u + B``.  Nonlinear kinds use the frozen
update ``u <- (M - dt N(u)) u + B`` where M treats diffusion through the
scheme's rational function and ``N(u)`` is the diagonal reaction matrix
evaluated at the current state; the reaction factors keep the signs exactly
as the model equations below are written.

    heat          u_t = delta u_xx
    linear_rd     u_t = delta u_xx - rho u
    nonlinear_rd  u_t = delta u_xx - rho u^2
    fisher_kpp    u_t = delta u_xx - rho u (1 - u)
    cubic_rd      u_t = delta u_xx - rho u (1 - u)(a - u)

Note the fisher_kpp sign: with the minus sign in front of rho the constant
state 0 attracts and 1 repels, the mirror image of the usual convention.
The reaction factors are exposed as data (``reaction_factor`` and
``reaction_slope``) so callers can see exactly which sign they get.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .lattice import analytic_eigenvalues, sine_basis
from .schemes import (
    BoundaryData,
    Discretization,
    RationalScheme,
    SingularSchemeError,
    amplification_array,
    step_operator,
)

DIVERGENCE_GUARD = 1e12


class ConvergenceError(RuntimeError):
    """An iteration hit its cap before reaching the requested tolerance."""


class Kind(enum.Enum):
    HEAT = "heat"
    LINEAR_RD = "linear_rd"
    NONLINEAR_RD = "nonlinear_rd"
    FISHER_KPP = "fisher_kpp"
    CUBIC_RD = "cubic_rd"

    @property
    def linear(self) -> bool:
        return self in (Kind.HEAT, Kind.LINEAR_RD)


@dataclass(frozen=True)
class Problem:
    """A PDE instance on a fixed grid: coefficients, boundary data, initial state."""

    kind: Kind
    disc: Discretization
    bc: BoundaryData
    initial: np.ndarray
    rho: float = 0.0
    a_param: float = 0.5

    def __post_init__(self):
        initial = np.ascontiguousarray(self.initial, dtype=float)
        if initial.shape != (self.disc.k,):
            raise ValueError(
                f"initial state must have length k={self.disc.k}, got shape {initial.shape}"
            )
        object.__setattr__(self, "initial", initial)
        if self.kind is Kind.HEAT and self.rho != 0.0:
            raise ValueError("heat equation has no reaction term; rho must be 0")
        if self.kind is Kind.LINEAR_RD and self.disc.rho != self.rho:
            raise ValueError(
                "linear reaction-diffusion needs disc.rho == rho so the shift "
                "sigma = rho*dt enters the operator"
            )
        if not self.kind.linear and self.disc.rho != 0.0:
            raise ValueError(
                "nonlinear kinds treat reaction explicitly; build the "
                "discretization with rho=0"
            )
        if self.kind is Kind.CUBIC_RD and not 0.0 <= self.a_param <= 1.0:
            raise ValueError(f"cubic parameter must be in [0, 1], got {self.a_param}")

    @property
    def delta(self) -> float:
        return self.disc.delta


def reaction_factor(kind: Kind, u: np.ndarray, a: float = 0.5) -> np.ndarray:
    """Diagonal factor f(u) with reaction term = -rho * f(u) * u."""
    u = np.asarray(u, dtype=float)
    if kind is Kind.HEAT:
        return np.zeros_like(u)
    if kind is Kind.LINEAR_RD:
        return np.ones_like(u)
    if kind is Kind.NONLINEAR_RD:
        return u
    if kind is Kind.FISHER_KPP:
        return 1.0 - u
    if kind is Kind.CUBIC_RD:
        return (1.0 - u) * (a - u)
    raise ValueError(f"unknown kind {kind!r}")


def reaction_slope(kind: Kind, u: np.ndarray, a: float = 0.5) -> np.ndarray:
    """Derivative factor c(u) of the reaction: linearizing about u gives the
    perturbation equation v_t = delta v_xx - rho c(u) v."""
    u = np.asarray(u, dtype=float)
    if kind is Kind.HEAT:
        return np.zeros_like(u)
    if kind is Kind.LINEAR_RD:
        return np.ones_like(u)
    if kind is Kind.NONLINEAR_RD:
        return 2.0 * u
    if kind is Kind.FISHER_KPP:
        return 1.0 - 2.0 * u
    if kind is Kind.CUBIC_RD:
        return a - 2.0 * (1.0 + a) * u + 3.0 * u * u
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class Trajectory:
    """States u_0 .. u_N (rows) from repeated stepping."""

    states: np.ndarray
    problem: Problem
    scheme: RationalScheme
    diverged: bool = False

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1


def step(problem: Problem, scheme: RationalScheme, u: np.ndarray) -> np.ndarray:
    """Advance one time step from state ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (problem.disc.k,):
        raise ValueError(f"state must have length {problem.disc.k}, got shape {u.shape}")
    op = step_operator(scheme, problem.disc, problem.bc)
    out = op.apply(u)
    if not problem.kind.linear:
        out = out - problem.disc.dt * problem.rho * reaction_factor(
            problem.kind, u, problem.a_param
        ) * u
    return out


def run(problem: Problem, scheme: RationalScheme, n_steps: int) -> Trajectory:
    """Step repeatedly from the initial state.

    A state with any entry above the divergence guard (or non-finite)
    truncates the run and flags the trajectory instead of raising: unstable
    runs are legitimate experiments.
    """
    if n_steps < 0:
        raise ValueError(f"step count must be nonnegative, got {n_steps}")
    states = [problem.initial.copy()]
    u = problem.initial
    diverged = False
    for _ in range(n_steps):
        u = step(problem, scheme, u)
        states.append(u.copy())
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > DIVERGENCE_GUARD:
            diverged = True
            break
    return Trajectory(states=np.array(states), problem=problem, scheme=scheme, diverged=diverged)


def steady_state(
    problem: Problem,
    scheme: RationalScheme,
    tol: float = 1e-12,
    max_iter: int = 10**6,
) -> np.ndarray:
    """Fixed point of the discrete update.

    Linear kinds solve ``(I - M) ubar = B`` directly; nonlinear kinds iterate
    the step map from the initial state until successive changes fall below
    ``tol`` in max-norm.
    """
    if problem.kind.linear:
        op = step_operator(scheme, problem.disc, problem.bc)
        m = op.matrix()
        try:
            return np.linalg.solve(np.eye(problem.disc.k) - m, op.boundary_term)
        except np.linalg.LinAlgError as exc:
            raise SingularSchemeError("I - M is singular; no unique steady state") from exc
    u = problem.initial
    for _ in range(max_iter):
        nxt = step(problem, scheme, u)
        if not np.all(np.isfinite(nxt)):
            raise ConvergenceError("steady-state iteration diverged")
        if np.max(np.abs(nxt - u)) <= tol:
            return nxt
        u = nxt
    raise ConvergenceError(f"steady-state iteration did not converge in {max_iter} steps")


def modal_solution(problem: Problem, scheme: RationalScheme, n: int) -> np.ndarray:
    """Closed-form state after n steps for the linear kinds.

    Evaluates ``(2/(k+1)) sum_j a_j R(r lambda_j - sigma)^n x_j + ubar`` with
    coefficients from the sine transform of ``u_0 - ubar``.  Shares no
    stepping code with :func:`run`, so the two are independent cross-checks.
    """
    if not problem.kind.linear:
        raise ValueError(f"modal solution is defined for linear kinds only, got {problem.kind}")
    if n < 0:
        raise ValueError(f"step count must be nonnegative, got {n}")
    disc = problem.disc
    ubar = steady_state(problem, scheme)
    basis = sine_basis(disc.k)
    coeffs = basis.transform(problem.initial - ubar)
    z = disc.r * analytic_eigenvalues(disc.k).lambdas - disc.sigma
    growth = amplification_array(scheme, z) ** n
    return basis.inverse(coeffs * growth) + ubar
