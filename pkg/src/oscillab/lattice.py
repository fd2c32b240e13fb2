"""Second-difference operator on a Dirichlet grid and its sine eigenstructure.

The tridiagonal (-2, 1) matrix that discretizes the second spatial derivative
has a fully explicit eigensystem: eigenvalues ``-4 sin^2(pi j / (2(k+1)))``
and sine eigenvectors ``sin(pi n j / (k+1))``.  Everything downstream (scheme
spectra, oscillation conditions, modal solutions) is built on these facts, so
this module keeps them as small, directly testable objects.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

# Dense sine-basis matrices above this size are refused rather than silently
# allocated; the transform here is a plain matrix-vector product by design.
DENSE_BASIS_CAP = 4096


def _check_k(k: int) -> int:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise TypeError(f"interior point count must be an integer, got {k!r}")
    if k < 1:
        raise ValueError(f"invalid grid: need at least one interior point, got k={k}")
    return int(k)


@dataclass(frozen=True)
class ToeplitzSecondDiff:
    """The k-by-k tridiagonal matrix with -2 on the diagonal and 1 beside it."""

    k: int

    def dense(self) -> np.ndarray:
        m = -2.0 * np.eye(self.k)
        idx = np.arange(self.k - 1)
        m[idx, idx + 1] = 1.0
        m[idx + 1, idx] = 1.0
        return m

    def bands(self) -> tuple[np.ndarray, np.ndarray]:
        """(diagonal, off-diagonal) arrays."""
        return np.full(self.k, -2.0), np.ones(self.k - 1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.k,):
            raise ValueError(f"expected vector of length {self.k}, got shape {v.shape}")
        y = -2.0 * v
        y[:-1] += v[1:]
        y[1:] += v[:-1]
        return y


@dataclass(frozen=True)
class SineBasis:
    """Matrix of sine eigenvectors, S[n, j] = sin(pi (n+1)(j+1) / (k+1)).

    Columns are the (unnormalized) eigenvectors of :class:`ToeplitzSecondDiff`;
    the matrix is symmetric and S @ S = ((k+1)/2) I, so the inverse transform
    is just a rescaled forward transform.
    """

    k: int
    matrix: np.ndarray

    def transform(self, v: np.ndarray) -> np.ndarray:
        """Forward sine transform, a = S v."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.k,):
            raise ValueError(
                f"length mismatch: basis is configured for k={self.k}, got shape {v.shape}"
            )
        return self.matrix @ v

    def inverse(self, a: np.ndarray) -> np.ndarray:
        """Inverse transform, v = (2/(k+1)) S a."""
        return (2.0 / (self.k + 1)) * self.transform(a)

    def column(self, j: int) -> np.ndarray:
        """Eigenvector for mode j (1-based)."""
        if not 1 <= j <= self.k:
            raise ValueError(f"mode index must be in 1..{self.k}, got {j}")
        return self.matrix[:, j - 1].copy()


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of the second-difference operator, optionally paired with
    the scheme's eigenvalues and the modal coefficients of a state."""

    k: int
    lambdas: np.ndarray
    scheme_values: np.ndarray | None = None
    modal_coeffs: np.ndarray | None = None

    def with_scheme_values(self, values: np.ndarray) -> "Spectrum":
        values = np.asarray(values, dtype=float)
        if values.shape != (self.k,):
            raise ValueError(f"expected {self.k} scheme values, got shape {values.shape}")
        return replace(self, scheme_values=values)

    def with_modal_coeffs(self, coeffs: np.ndarray) -> "Spectrum":
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.k,):
            raise ValueError(f"expected {self.k} modal coefficients, got shape {coeffs.shape}")
        return replace(self, modal_coeffs=coeffs)


def toeplitz_second_diff(k: int) -> ToeplitzSecondDiff:
    """Second-difference matrix on k interior points."""
    return ToeplitzSecondDiff(_check_k(k))


def analytic_eigenvalues(k: int) -> Spectrum:
    """Closed-form eigenvalues, decreasing with mode index j = 1..k."""
    k = _check_k(k)
    j = np.arange(1, k + 1)
    lambdas = -4.0 * np.sin(np.pi * j / (2.0 * (k + 1))) ** 2
    return Spectrum(k=k, lambdas=lambdas)


def sine_basis(k: int) -> SineBasis:
    """Dense sine eigenvector matrix for k interior points."""
    k = _check_k(k)
    if k > DENSE_BASIS_CAP:
        raise ValueError(
            f"k={k} exceeds the dense basis cap {DENSE_BASIS_CAP}; "
            "raise oscillab.lattice.DENSE_BASIS_CAP explicitly if you mean it"
        )
    n = np.arange(1, k + 1)
    matrix = np.sin(np.pi * np.outer(n, n) / (k + 1))
    matrix.flags.writeable = False
    return SineBasis(k=k, matrix=matrix)


@lru_cache(maxsize=8)
def _cached_basis(k: int) -> SineBasis:
    return sine_basis(k)


def dst(v: np.ndarray) -> np.ndarray:
    """Discrete finite sine transform of a grid vector (coefficients a_j).

    The inverse is ``inverse_dst``; round-tripping reproduces the input up to
    floating error because S @ S = ((k+1)/2) I.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D vector with at least one entry, got shape {v.shape}")
    return _cached_basis(v.size).transform(v)


def inverse_dst(a: np.ndarray) -> np.ndarray:
    """Grid vector with sine coefficients ``a``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError(f"expected a 1-D vector with at least one entry, got shape {a.shape}")
    return _cached_basis(a.size).inverse(a)
