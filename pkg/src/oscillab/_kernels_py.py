"""Pure NumPy implementations of the hot numerical kernels.

Same contract as the compiled backend in ``_kernels_cy.pyx``; selection
between the two happens in :mod:`oscillab.kernels`.  The bisection here is
batched over all eigenvalue brackets at once so the pure path stays usable
for moderate matrix sizes.
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(np.float64).eps
_SAFMIN = np.finfo(np.float64).tiny
_MASK64 = (1 << 64) - 1


def thomas_solve(dl: np.ndarray, d: np.ndarray, du: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a tridiagonal system without pivoting.

    ``dl``/``du`` are the sub/super diagonals (length n-1), ``d`` the main
    diagonal.  Raises ``ZeroDivisionError`` when a pivot collapses; callers
    translate that into their own singularity error.
    """
    n = d.size
    c = np.empty(n)
    x = np.empty(n)
    piv = d[0]
    if abs(piv) < _SAFMIN:
        raise ZeroDivisionError("zero pivot in tridiagonal solve at row 0")
    x[0] = b[0] / piv
    for i in range(1, n):
        c[i - 1] = du[i - 1] / piv
        piv = d[i] - dl[i - 1] * c[i - 1]
        if abs(piv) < _SAFMIN:
            raise ZeroDivisionError(f"zero pivot in tridiagonal solve at row {i}")
        x[i] = (b[i] - dl[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= c[i] * x[i + 1]
    return x


def tridiag_matvec(dl: np.ndarray, d: np.ndarray, du: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = d * x
    y[:-1] += du * x[1:]
    y[1:] += dl * x[:-1]
    return y


def _sturm_counts(d: np.ndarray, e2: np.ndarray, xs: np.ndarray, pivmin: float) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in ``xs``."""
    q = d[0] - xs
    q = np.where(np.abs(q) < pivmin, np.where(q < 0, -pivmin, pivmin), q)
    cnt = (q < 0).astype(np.int64)
    for i in range(1, d.size):
        q = d[i] - xs - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, np.where(q < 0, -pivmin, pivmin), q)
        cnt += q < 0
    return cnt


def tridiag_eigenvalues(d: np.ndarray, e: np.ndarray) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending.

    Bisection on Sturm sequence sign counts, run simultaneously for every
    eigenvalue index.
    """
    n = d.size
    if n == 1:
        return d.astype(np.float64).copy()
    e2 = e * e
    rad = np.zeros(n)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    gl = float(np.min(d - rad))
    gu = float(np.max(d + rad))
    span = max(abs(gl), abs(gu), 1.0)
    gl -= 2.0 * _EPS * span
    gu += 2.0 * _EPS * span
    pivmin = max(_SAFMIN * max(1.0, float(e2.max())), _SAFMIN)

    lo = np.full(n, gl)
    hi = np.full(n, gu)
    need = np.arange(1, n + 1)
    for _ in range(128):
        mid = 0.5 * (lo + hi)
        up = _sturm_counts(d, e2, mid, pivmin) >= need
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        tol = 2.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi)) + 2.0 * pivmin
        if np.all(hi - lo <= tol):
            break
    vals = 0.5 * (lo + hi)
    return np.maximum.accumulate(vals)


def _start_vector(n: int, index: int) -> np.ndarray:
    """Deterministic pseudo-random start for inverse iteration (splitmix64)."""
    x = (0x9E3779B97F4A7C15 * (index + 1)) & _MASK64
    out = np.empty(n)
    for i in range(n):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        out[i] = (z >> 11) / 9007199254740992.0 - 0.5
    return out


def _pivoted_solve(e: np.ndarray, diag_shifted: np.ndarray, b: np.ndarray, pivmin: float) -> np.ndarray:
    """Solve (T - shift I) x = b with partial pivoting.

    Plain Thomas elimination can blow up when the shifted diagonal is nearly
    zero everywhere (inverse iteration at an interior eigenvalue of a
    constant-diagonal matrix); row swaps keep every multiplier at most 1 in
    magnitude, at the cost of one fill-in superdiagonal.  Tiny final pivots
    are substituted, which is exactly the amplification inverse iteration
    wants.
    """
    n = diag_shifted.size
    d = diag_shifted.copy()
    u = e.copy()
    w = np.zeros(max(n - 2, 0))
    x = b.copy()
    for i in range(n - 1):
        if abs(d[i]) >= abs(e[i]):
            piv = d[i]
            if abs(piv) < pivmin:
                piv = pivmin if piv >= 0 else -pivmin
                d[i] = piv
            m = e[i] / piv
            d[i + 1] -= m * u[i]
            if i < n - 2:
                u[i + 1] -= m * w[i]
            x[i + 1] -= m * x[i]
        else:
            m = d[i] / e[i]
            u_old = u[i]
            w_old = w[i] if i < n - 2 else 0.0
            d[i] = e[i]
            u[i] = d[i + 1]
            d[i + 1] = u_old - m * d[i + 1]
            if i < n - 2:
                w[i] = u[i + 1]
                u[i + 1] = w_old - m * u[i + 1]
            x[i], x[i + 1] = x[i + 1], x[i] - m * x[i + 1]
    for i in range(n - 1, -1, -1):
        piv = d[i]
        if abs(piv) < pivmin:
            piv = pivmin if piv >= 0 else -pivmin
        acc = x[i]
        if i < n - 1:
            acc -= u[i] * x[i + 1]
        if i < n - 2:
            acc -= w[i] * x[i + 2]
        x[i] = acc / piv
    return x


def tridiag_eigenvectors(
    d: np.ndarray, e: np.ndarray, vals: np.ndarray, max_steps: int = 64
) -> np.ndarray:
    """Eigenvectors by inverse iteration with in-cluster reorthogonalization.

    Columns are unit-norm with a canonical sign (largest component positive).
    Raises ``RuntimeError`` naming the first vector that fails to converge
    within ``max_steps``.
    """
    n = d.size
    if n == 1:
        return np.ones((1, 1))
    tnorm = max(float(np.max(np.abs(d))) + 2.0 * float(np.max(np.abs(e))), _SAFMIN)
    pivmin = max(_SAFMIN * max(1.0, float((e * e).max())), _SAFMIN)
    gaptol = 1e-6 * tnorm
    restol = 100.0 * _EPS * tnorm

    vecs = np.empty((n, n))
    cluster_start = 0
    for m in range(n):
        if m > 0 and vals[m] - vals[m - 1] > gaptol:
            cluster_start = m
        # Offset shifts inside a cluster so repeated eigenvalues separate.
        shift = vals[m] + (m - cluster_start) * 10.0 * _EPS * tnorm
        shifted = d - shift
        v = _start_vector(n, m)
        v /= np.linalg.norm(v)
        ok = False
        for attempt in range(max_steps):
            v = _pivoted_solve(e, shifted, v, pivmin)
            mx = float(np.max(np.abs(v)))
            if not np.isfinite(mx) or mx == 0.0:
                v = _start_vector(n, m + (attempt + 1) * n)
                mx = float(np.max(np.abs(v)))
            v = v / mx
            for p in range(cluster_start, m):
                v -= np.dot(vecs[:, p], v) * vecs[:, p]
            nrm = np.linalg.norm(v)
            if nrm < 1e-3 / np.sqrt(n):
                # Mostly projected away: retry from a fresh direction.
                v = _start_vector(n, m + (attempt + 1) * n)
                nrm = np.linalg.norm(v)
            v /= nrm
            resid = tridiag_matvec(e, d, e, v) - vals[m] * v
            if float(np.max(np.abs(resid))) <= restol:
                ok = True
                break
        if not ok:
            raise RuntimeError(f"inverse iteration failed to converge for vector {m}")
        imax = int(np.argmax(np.abs(v)))
        if v[imax] < 0:
            v = -v
        vecs[:, m] = v
    return vecs
