"""Linearization of the nonlinear PDEs, frozen-Jacobian spectra, and the
positive-definiteness chain behind the nonlinear oscillation guarantee.

Two distinct frozen forms appear here, both exposed:

* ``nonlinear_nn_guarantee`` follows the secant algebra of the guarantee
  argument verbatim: the nonlinear step matrix differs from the linearized
  one by a diagonal matrix whose entries are a fixed polynomial of the state,
  and the guarantee holds when the linearized step matrix and that difference
  are both positive semidefinite over the assumed state range.

* ``frozen_jacobian`` freezes the true derivative of the reaction term at a
  state, which is what the eigenfunction structure (localization, pairing) is
  about.

The tabulated linearization coefficients (``effective_rho``) are kept exactly
as the guarantee algebra uses them.  For fisher_kpp about 1 and the cubic
rows they differ in sign from the true derivative, so the record also carries
``jacobian_rho``; consistency checks against frozen-Jacobian spectra must use
the latter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .schemes import Discretization, RationalScheme, amplification_array, time_step_matrix
from .simulate import ConvergenceError, Kind, Problem, reaction_factor, reaction_slope


@dataclass(frozen=True)
class Linearization:
    """Linear reaction-diffusion equation approximating a nonlinear kind near
    a constant steady value: v_t = delta v_xx - effective_rho v."""

    source_kind: Kind
    about: float
    effective_rho: float
    jacobian_rho: float


def _is_reaction_root(problem: Problem, about: float) -> bool:
    if problem.rho == 0.0:
        return True
    g = problem.rho * float(reaction_factor(problem.kind, np.array([about]), problem.a_param)[0]) * about
    return abs(g) <= 1e-12 * max(1.0, abs(problem.rho))


def linearize(problem: Problem, about: float) -> Linearization:
    """Tabulated linearization of the reaction about a constant steady value."""
    about = float(about)
    if not _is_reaction_root(problem, about):
        raise ValueError(
            f"{about} is not a root of the {problem.kind.value} reaction term"
        )
    rho, a = problem.rho, problem.a_param
    jac = rho * float(reaction_slope(problem.kind, np.array([about]), a)[0])
    table = None
    if problem.kind is Kind.NONLINEAR_RD and math.isclose(about, 0.0, abs_tol=1e-12):
        table = 0.0
    elif problem.kind is Kind.FISHER_KPP and math.isclose(about, 1.0, abs_tol=1e-12):
        table = rho
    elif problem.kind is Kind.CUBIC_RD and math.isclose(about, 0.0, abs_tol=1e-12):
        table = -rho * a
    elif problem.kind is Kind.CUBIC_RD and math.isclose(about, 1.0, abs_tol=1e-12):
        table = -rho * (1.0 - a)
    return Linearization(
        source_kind=problem.kind,
        about=about,
        effective_rho=table if table is not None else jac,
        jacobian_rho=jac,
    )


def frozen_bands(problem: Problem, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bands (diagonal, off-diagonal) of A(u) = r T0 - dt * rho * diag(c(u)),
    the generator with the reaction derivative frozen at state u."""
    u = np.asarray(u, dtype=float)
    disc = problem.disc
    if u.shape != (disc.k,):
        raise ValueError(f"state must have length {disc.k}, got shape {u.shape}")
    slope = reaction_slope(problem.kind, u, problem.a_param)
    diag = -2.0 * disc.r - disc.dt * problem.rho * slope
    off = np.full(max(disc.k - 1, 0), disc.r)
    return diag, off


def frozen_jacobian(problem: Problem, scheme: RationalScheme, u: np.ndarray) -> np.ndarray:
    """Dense time-step matrix q(A(u))^{-1} p(A(u)) with the reaction Jacobian
    frozen at state u."""
    diag, off = frozen_bands(problem, u)
    k = problem.disc.k
    a = np.diag(diag)
    if k > 1:
        idx = np.arange(k - 1)
        a[idx, idx + 1] = off
        a[idx + 1, idx] = off

    def horner(coeffs):
        acc = coeffs[-1] * np.eye(k)
        for c in reversed(coeffs[:-1]):
            acc = acc @ a + c * np.eye(k)
        return acc

    p_mat = horner(scheme.p_coeffs)
    if scheme.explicit:
        return p_mat / scheme.q_coeffs[0]
    return np.linalg.solve(horner(scheme.q_coeffs), p_mat)


@dataclass(frozen=True)
class EigenDecomposition:
    """Full eigenpairs of a symmetric matrix: values ascending, unit columns."""

    values: np.ndarray
    vectors: np.ndarray
    residual_norm: float

    @property
    def k(self) -> int:
        return self.values.size

    def orthogonality_defect(self) -> float:
        g = self.vectors.T @ self.vectors
        return float(np.max(np.abs(g - np.eye(self.k))))


def tridiag_eigen(diag: np.ndarray, offdiag: np.ndarray) -> EigenDecomposition:
    """Eigen decomposition of a symmetric tridiagonal matrix.

    Values by Sturm-sequence bisection, vectors by inverse iteration (see
    the kernel backends); the max eigen-residual is recorded on the result.
    """
    diag = np.ascontiguousarray(diag, dtype=float)
    offdiag = np.ascontiguousarray(offdiag, dtype=float)
    if diag.ndim != 1 or diag.size < 1:
        raise ValueError("diagonal must be a nonempty 1-D array")
    if offdiag.shape != (max(diag.size - 1, 0),):
        raise ValueError(
            f"off-diagonal must have length {diag.size - 1}, got shape {offdiag.shape}"
        )
    vals = kernels.tridiag_eigenvalues(diag, offdiag)
    try:
        vecs = kernels.tridiag_eigenvectors(diag, offdiag, vals)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    resid = 0.0
    for m in range(diag.size):
        rv = kernels.tridiag_matvec(offdiag, diag, offdiag, np.ascontiguousarray(vecs[:, m]))
        resid = max(resid, float(np.max(np.abs(rv - vals[m] * vecs[:, m]))))
    return EigenDecomposition(values=vals, vectors=vecs, residual_norm=resid)


def frozen_jacobian_eigen(
    problem: Problem, scheme: RationalScheme, u: np.ndarray
) -> tuple[EigenDecomposition, np.ndarray]:
    """Eigen decomposition of the frozen generator A(u) plus the matching
    time-step eigenvalues R(mu_j) (same eigenvectors)."""
    diag, off = frozen_bands(problem, u)
    decomp = tridiag_eigen(diag, off)
    return decomp, amplification_array(scheme, decomp.values)


def is_positive_definite(m: np.ndarray, tol: float = 1e-12) -> bool:
    """Nonnegative spectrum at tolerance (the non-strict reading used by the
    guarantee argument).  Rejects asymmetric input."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if float(np.max(np.abs(m - m.T))) > 1e-12:
        raise ValueError("matrix is not symmetric within 1e-12")
    return bool(np.min(np.linalg.eigvalsh(m)) > -tol)


_DEFAULT_ABOUT = {Kind.NONLINEAR_RD: 0.0, Kind.FISHER_KPP: 1.0, Kind.CUBIC_RD: 0.0}


def default_equilibrium(kind: Kind) -> float:
    """Canonical constant steady value used when no expansion point is given."""
    if kind.linear:
        return 0.0
    return _DEFAULT_ABOUT[kind]


def _difference_diagonal(kind: Kind, about: float, a: float, sigma: float, x: np.ndarray) -> np.ndarray:
    """Diagonal entries of [linearized step matrix difference] as a function
    of the state value x, per the secant algebra of the guarantee."""
    if kind is Kind.NONLINEAR_RD and math.isclose(about, 0.0, abs_tol=1e-12):
        return sigma * x
    if kind is Kind.FISHER_KPP and math.isclose(about, 1.0, abs_tol=1e-12):
        return sigma * x
    if kind is Kind.CUBIC_RD and math.isclose(about, 0.0, abs_tol=1e-12):
        return sigma * (2.0 * a - (1.0 + a) * x + x * x)
    if kind is Kind.CUBIC_RD and math.isclose(about, 1.0, abs_tol=1e-12):
        return sigma * (1.0 - (1.0 + a) * x + x * x)
    raise ValueError(f"no guarantee form for kind {kind.value} about {about}")


@dataclass(frozen=True)
class GuaranteeReport:
    """Outcome of the nonlinear non-negativity guarantee check."""

    guaranteed: bool
    linearization: Linearization
    lin_floor: float
    lin_ok: bool
    diff_floor: float
    diff_ok: bool
    witness: float | None

    def to_dict(self) -> dict:
        return {
            "guaranteed": self.guaranteed,
            "kind": self.linearization.source_kind.value,
            "about": self.linearization.about,
            "effective_rho": self.linearization.effective_rho,
            "jacobian_rho": self.linearization.jacobian_rho,
            "lin_floor": self.lin_floor,
            "lin_ok": self.lin_ok,
            "diff_floor": self.diff_floor,
            "diff_ok": self.diff_ok,
            "witness": self.witness,
        }


def nonlinear_nn_guarantee(
    problem: Problem,
    scheme: RationalScheme,
    disc: Discretization | None = None,
    about: float | None = None,
    tol: float = 1e-10,
    n_grid: int = 4097,
) -> GuaranteeReport:
    """Check the two positive-semidefiniteness legs of the nonlinear
    oscillation-freedom guarantee for states in [0, 1].

    Leg one: the tabulated linearization's time-step matrix has eigenvalue
    floor above ``-tol``.  Leg two: the diagonal difference between the
    linearized and state-frozen step matrices stays above ``-tol`` over the
    state range; the minimizing state value is reported as a witness when it
    does not.
    """
    if problem.kind.linear:
        raise ValueError("the guarantee applies to nonlinear kinds only")
    if about is None:
        about = _DEFAULT_ABOUT[problem.kind]
    if disc is None:
        disc = problem.disc
    lin = linearize(problem, about)
    lin_disc = replace(disc, rho=lin.effective_rho)
    m_lin = time_step_matrix(scheme, lin_disc)
    lin_floor = float(np.min(np.linalg.eigvalsh(m_lin)))
    lin_ok = lin_floor >= -tol

    x = np.linspace(0.0, 1.0, n_grid)
    dvals = _difference_diagonal(problem.kind, about, problem.a_param, problem.rho * disc.dt, x)
    i = int(np.argmin(dvals))
    diff_floor = float(dvals[i])
    diff_ok = diff_floor >= -tol
    witness = float(x[i]) if not diff_ok else None

    return GuaranteeReport(
        guaranteed=lin_ok and diff_ok,
        linearization=lin,
        lin_floor=lin_floor,
        lin_ok=lin_ok,
        diff_floor=diff_floor,
        diff_ok=diff_ok,
        witness=witness,
    )


def cubic_guarantee_interval(about: float = 0.0, n_grid: int = 8193) -> tuple[float, float]:
    """Admissible cubic-parameter interval for which the state-range leg of
    the guarantee holds, computed numerically rather than assumed."""
    x = np.linspace(0.0, 1.0, n_grid)

    def ok(a: float) -> bool:
        return float(np.min(_difference_diagonal(Kind.CUBIC_RD, about, a, 1.0, x))) >= 0.0

    if not ok(1.0):
        raise ValueError("guarantee fails even at a=1; no admissible interval")
    if ok(0.0):
        return 0.0, 1.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), 1.0


@dataclass(frozen=True)
class LocalizationRecord:
    index: int
    eigenvalue: float
    participation_ratio: float
    center_of_mass: float


def localization_metrics(decomp: EigenDecomposition) -> tuple[LocalizationRecord, ...]:
    """Participation ratio 1/sum(v^4) and center of mass sum(i v_i^2) per
    eigenvector (1-based grid indices).  Requires unit-norm columns."""
    k = decomp.k
    idx = np.arange(1, k + 1, dtype=float)
    records = []
    for m in range(k):
        v = decomp.vectors[:, m]
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > 1e-8:
            raise ValueError(f"eigenvector {m} is not unit-norm (|v| = {nrm})")
        v2 = v * v
        records.append(
            LocalizationRecord(
                index=m + 1,
                eigenvalue=float(decomp.values[m]),
                participation_ratio=float(1.0 / np.sum(v2 * v2)),
                center_of_mass=float(np.sum(idx * v2)),
            )
        )
    return tuple(records)


@dataclass(frozen=True)
class PairRecord:
    j: int
    partner: int
    magnitude_mismatch: float


def pairing_symmetry(decomp: EigenDecomposition) -> tuple[PairRecord, ...]:
    """Componentwise magnitude mismatch between eigenvector j and its mirror
    partner k+1-j, one record per pair ordered by j."""
    k = decomp.k
    records = []
    for j in range(1, (k + 1) // 2 + 1):
        partner = k + 1 - j
        mismatch = float(
            np.max(
                np.abs(
                    np.abs(decomp.vectors[:, j - 1]) - np.abs(decomp.vectors[:, partner - 1])
                )
            )
        )
        records.append(PairRecord(j=j, partner=partner, magnitude_mismatch=mismatch))
    return tuple(records)
