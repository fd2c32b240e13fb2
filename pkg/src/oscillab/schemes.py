"""Time-stepping schemes as rational functions of the diffusion operator.

A two-level scheme for ``u_t = delta u_xx - rho u`` advances the interior
vector by ``u <- M u + B`` with ``M = q(A)^{-1} p(A)``, where
``A = r T0 - sigma I``, ``r = delta dt / dx^2`` and ``sigma = rho dt``.
Because A shares its eigenvectors with the second-difference matrix, the
scheme's eigenvalues are just ``R(r lambda_j - sigma)`` with
``R(z) = p(z)/q(z)``; that transfer is what the rest of the library leans on.

The boundary vector is assembled so that the discrete steady state
``(I - M)^{-1} B`` solves the discrete boundary-value problem exactly: with
``g(z) = (p(z) - q(z))/z`` (a polynomial, since R(0) = 1), we use
``B = q(A)^{-1} g(A) (r b0)`` where ``b0`` has the Dirichlet values in its
first and last entries.  For every scheme this makes ``(I - M) ubar = B``
equivalent to ``A ubar + r b0 = 0``, the steady discrete equation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import kernels
from .lattice import Spectrum, analytic_eigenvalues, sine_basis

_TINY = 1e-300


class AmplificationPoleError(ArithmeticError):
    """The amplification function was evaluated at (or too near) a pole."""


class SingularSchemeError(ArithmeticError):
    """q(A) or I - M is numerically singular for this discretization."""


def _poly_eval(coeffs: tuple[float, ...], z: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _poly_eval_array(coeffs: tuple[float, ...], z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class RationalScheme:
    """Scheme with amplification R(z) = p(z)/q(z), coefficients ascending."""

    name: str
    p_coeffs: tuple[float, ...]
    q_coeffs: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(c) for c in self.p_coeffs)
        q = tuple(float(c) for c in self.q_coeffs)
        if not p or not q:
            raise ValueError("scheme polynomials must be non-empty")
        if abs(q[0]) < _TINY:
            raise ValueError(f"scheme {self.name!r}: q(0) must be nonzero")
        if not math.isclose(p[0], q[0], rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(
                f"scheme {self.name!r}: R(0) = p(0)/q(0) must equal 1 "
                f"(got p(0)={p[0]}, q(0)={q[0]})"
            )
        object.__setattr__(self, "p_coeffs", p)
        object.__setattr__(self, "q_coeffs", q)

    @property
    def explicit(self) -> bool:
        return len(self.q_coeffs) == 1

    def boundary_coeffs(self) -> tuple[float, ...]:
        """Coefficients of g(z) = (p(z) - q(z)) / z."""
        deg = max(len(self.p_coeffs), len(self.q_coeffs))
        p = self.p_coeffs + (0.0,) * (deg - len(self.p_coeffs))
        q = self.q_coeffs + (0.0,) * (deg - len(self.q_coeffs))
        g = tuple(p[i] - q[i] for i in range(1, deg))
        return g if g else (0.0,)


def forward_euler() -> RationalScheme:
    return RationalScheme("forward_euler", (1.0, 1.0), (1.0,))


def backward_euler() -> RationalScheme:
    return RationalScheme("backward_euler", (1.0,), (1.0, -1.0))


def crank_nicolson() -> RationalScheme:
    return RationalScheme("crank_nicolson", (1.0, 0.5), (1.0, -0.5))


def taylor(m: int) -> RationalScheme:
    """Degree-m truncation of the exponential, the amplification polynomial of
    the classical m-stage explicit methods on a linear autonomous system."""
    if not 1 <= m <= 12:
        raise ValueError(f"taylor order must be in 1..12, got {m}")
    p = tuple(1.0 / math.factorial(i) for i in range(m + 1))
    return RationalScheme(f"taylor{m}", p, (1.0,))


_TAYLOR_RE = re.compile(r"^taylor[:(]?(\d+)\)?$")


def builtin_scheme(name: str) -> RationalScheme:
    """Scheme by name: forward_euler, backward_euler, crank_nicolson, taylor:m."""
    key = name.strip().lower()
    if key == "forward_euler":
        return forward_euler()
    if key == "backward_euler":
        return backward_euler()
    if key == "crank_nicolson":
        return crank_nicolson()
    m = _TAYLOR_RE.match(key)
    if m:
        return taylor(int(m.group(1)))
    raise ValueError(f"unknown scheme {name!r}")


def parse_scheme(text: str) -> RationalScheme:
    """Parse a builtin name or a custom 'p: 1,1,0.5 / q: 1' description."""
    if "p:" in text or "q:" in text:
        parts = text.split("/")
        if len(parts) != 2:
            raise ValueError(f"custom scheme must look like 'p: 1,1 / q: 1', got {text!r}")
        coeffs: dict[str, tuple[float, ...]] = {}
        for part in parts:
            label, _, values = part.partition(":")
            label = label.strip().lower()
            if label not in ("p", "q"):
                raise ValueError(f"unknown polynomial label {label!r} in {text!r}")
            coeffs[label] = tuple(float(v) for v in values.split(",") if v.strip())
        if set(coeffs) != {"p", "q"}:
            raise ValueError(f"custom scheme needs both p and q parts, got {text!r}")
        return RationalScheme("custom", coeffs["p"], coeffs["q"])
    return builtin_scheme(text)


# Default sweep used by the CLI bounds table and the broad property tests.
def default_schemes() -> tuple[RationalScheme, ...]:
    return (forward_euler(), taylor(3), taylor(5), crank_nicolson())


def amplification(scheme: RationalScheme, z: float) -> float:
    """R(z) = p(z)/q(z) by Horner evaluation."""
    z = float(z)
    den = _poly_eval(scheme.q_coeffs, z)
    scale = max(abs(c) for c in scheme.q_coeffs) * max(1.0, abs(z)) ** (
        len(scheme.q_coeffs) - 1
    )
    if abs(den) <= 1e-14 * max(scale, 1.0):
        raise AmplificationPoleError(f"scheme {scheme.name!r} has a pole at z={z!r}")
    return _poly_eval(scheme.p_coeffs, z) / den


def amplification_array(scheme: RationalScheme, z: np.ndarray) -> np.ndarray:
    """Vectorized R(z); poles come out as inf/nan rather than raising."""
    z = np.asarray(z, dtype=float)
    num = _poly_eval_array(scheme.p_coeffs, z)
    den = _poly_eval_array(scheme.q_coeffs, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / den


@dataclass(frozen=True)
class Discretization:
    """Grid and step sizes; r and sigma are derived once and stored."""

    k: int
    dx: float
    dt: float
    delta: float = 1.0
    rho: float = 0.0
    r: float = field(init=False)
    sigma: float = field(init=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"invalid grid: k={self.k}")
        if not (self.dx > 0 and self.dt > 0 and self.delta > 0):
            raise ValueError("dx, dt and delta must all be positive")
        object.__setattr__(self, "r", self.delta * self.dt / self.dx**2)
        object.__setattr__(self, "sigma", self.rho * self.dt)

    @classmethod
    def from_r(
        cls, k: int, r: float, dx: float = 1.0, delta: float = 1.0, rho: float = 0.0
    ) -> "Discretization":
        if r <= 0:
            raise ValueError(f"mesh ratio must be positive, got r={r}")
        dt = r * dx**2 / delta
        return cls(k=k, dx=dx, dt=dt, delta=delta, rho=rho)


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet values held at the two ends of the domain."""

    left: float = 0.0
    right: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.left) and math.isfinite(self.right)):
            raise ValueError("boundary values must be finite")

    def stencil_vector(self, k: int) -> np.ndarray:
        # += so a single interior point (k=1) picks up both boundary values.
        b = np.zeros(k)
        b[0] += self.left
        b[-1] += self.right
        return b


def _check_poles(scheme: RationalScheme, disc: Discretization) -> np.ndarray:
    """Arguments r*lambda_j - sigma, verified away from the poles of q."""
    z = disc.r * analytic_eigenvalues(disc.k).lambdas - disc.sigma
    if not scheme.explicit:
        den = _poly_eval_array(scheme.q_coeffs, z)
        scale = max(abs(c) for c in scheme.q_coeffs) * np.maximum(1.0, np.abs(z)) ** (
            len(scheme.q_coeffs) - 1
        )
        bad = np.abs(den) <= 1e-12 * np.maximum(scale, 1.0)
        if np.any(bad):
            j = int(np.argmax(bad)) + 1
            raise SingularSchemeError(
                f"q(r*lambda_j - sigma) vanishes at mode j={j} for scheme "
                f"{scheme.name!r} (r={disc.r}, sigma={disc.sigma})"
            )
    return z


class StepOperator:
    """Applies u -> M u + B without materializing M.

    Polynomial parts act through tridiagonal matvecs on A = r T0 - sigma I;
    the q-solve is a Thomas sweep when q is linear and a cached dense LU
    factorization otherwise.
    """

    def __init__(self, scheme: RationalScheme, disc: Discretization, bc: BoundaryData):
        self.scheme = scheme
        self.disc = disc
        self.bc = bc
        _check_poles(scheme, disc)
        k = disc.k
        self._diag = np.full(k, -2.0 * disc.r - disc.sigma)
        self._off = np.full(max(k - 1, 0), disc.r)
        q = scheme.q_coeffs
        self._lu = None
        self._q_diag = None
        if len(q) == 2:
            self._q_diag = q[0] + q[1] * self._diag
            self._q_off = q[1] * self._off
        elif len(q) > 2:
            self._lu = lu_factor(self._poly_matrix(q))
        self._boundary = self._build_boundary()

    def _apply_a(self, v: np.ndarray) -> np.ndarray:
        return kernels.tridiag_matvec(self._off, self._diag, self._off, v)

    def _apply_poly(self, coeffs: tuple[float, ...], v: np.ndarray) -> np.ndarray:
        acc = coeffs[-1] * v
        for c in reversed(coeffs[:-1]):
            acc = self._apply_a(acc) + c * v
        return acc

    def _solve_q(self, v: np.ndarray) -> np.ndarray:
        q = self.scheme.q_coeffs
        if len(q) == 1:
            return v / q[0]
        if len(q) == 2:
            try:
                return kernels.thomas_solve(self._q_off, self._q_diag, self._q_off, v)
            except ZeroDivisionError as exc:
                raise SingularSchemeError(
                    f"singular q(A) for scheme {self.scheme.name!r}"
                ) from exc
        return lu_solve(self._lu, v)

    def _poly_matrix(self, coeffs: tuple[float, ...]) -> np.ndarray:
        k = self.disc.k
        a = np.diag(self._diag)
        if k > 1:
            idx = np.arange(k - 1)
            a[idx, idx + 1] = self._off
            a[idx + 1, idx] = self._off
        acc = coeffs[-1] * np.eye(k)
        for c in reversed(coeffs[:-1]):
            acc = acc @ a + c * np.eye(k)
        return acc

    def _build_boundary(self) -> np.ndarray:
        rb = self.disc.r * self.bc.stencil_vector(self.disc.k)
        return self._solve_q(self._apply_poly(self.scheme.boundary_coeffs(), rb))

    @property
    def boundary_term(self) -> np.ndarray:
        return self._boundary

    def apply_homogeneous(self, u: np.ndarray) -> np.ndarray:
        """M u, without the boundary contribution."""
        return self._solve_q(self._apply_poly(self.scheme.p_coeffs, u))

    def apply(self, u: np.ndarray) -> np.ndarray:
        """One step, M u + B."""
        return self.apply_homogeneous(u) + self._boundary

    def matrix(self) -> np.ndarray:
        """Dense M = q(A)^{-1} p(A)."""
        p_mat = self._poly_matrix(self.scheme.p_coeffs)
        q = self.scheme.q_coeffs
        if len(q) == 1:
            return p_mat / q[0]
        try:
            return np.linalg.solve(self._poly_matrix(q), p_mat)
        except np.linalg.LinAlgError as exc:
            raise SingularSchemeError(
                f"singular q(A) for scheme {self.scheme.name!r}"
            ) from exc


@lru_cache(maxsize=64)
def _cached_operator(
    scheme: RationalScheme, disc: Discretization, bc: BoundaryData
) -> StepOperator:
    return StepOperator(scheme, disc, bc)


def step_operator(
    scheme: RationalScheme, disc: Discretization, bc: BoundaryData
) -> StepOperator:
    """Cached step operator for (scheme, discretization, boundary data)."""
    return _cached_operator(scheme, disc, bc)


def time_step_matrix(scheme: RationalScheme, disc: Discretization) -> np.ndarray:
    """Dense time-step matrix M for the linear problem."""
    return step_operator(scheme, disc, BoundaryData(0.0, 0.0)).matrix()


def boundary_vector(
    scheme: RationalScheme, disc: Discretization, bc: BoundaryData
) -> np.ndarray:
    """Constant-in-time boundary contribution B of the update u <- M u + B."""
    return step_operator(scheme, disc, bc).boundary_term


def scheme_spectrum(scheme: RationalScheme, disc: Discretization) -> Spectrum:
    """Eigenvalues lambda_j together with the scheme values R(r lambda_j - sigma)."""
    base = analytic_eigenvalues(disc.k)
    z = _check_poles(scheme, disc)
    return base.with_scheme_values(amplification_array(scheme, z))


def modal_coefficients(u: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Sine coefficients of ``u - reference`` (typically state minus steady)."""
    u = np.asarray(u, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if u.shape != reference.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {reference.shape}")
    return sine_basis(u.size).transform(u - reference)
