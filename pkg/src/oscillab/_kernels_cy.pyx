# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot numerical kernels.

Mirrors the contract of ``_kernels_py``; see that module for semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef double _EPS = 2.220446049250313e-16
cdef double _SAFMIN = 2.2250738585072014e-308


def thomas_solve(double[::1] dl, double[::1] d, double[::1] du, double[::1] b):
    cdef Py_ssize_t n = d.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ca = np.empty(n)
    cdef double[::1] x = xa
    cdef double[::1] c = ca
    cdef double piv = d[0]
    cdef Py_ssize_t i
    if fabs(piv) < _SAFMIN:
        raise ZeroDivisionError("zero pivot in tridiagonal solve at row 0")
    x[0] = b[0] / piv
    for i in range(1, n):
        c[i - 1] = du[i - 1] / piv
        piv = d[i] - dl[i - 1] * c[i - 1]
        if fabs(piv) < _SAFMIN:
            raise ZeroDivisionError(f"zero pivot in tridiagonal solve at row {i}")
        x[i] = (b[i] - dl[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= c[i] * x[i + 1]
    return xa


def tridiag_matvec(double[::1] dl, double[::1] d, double[::1] du, double[::1] x):
    cdef Py_ssize_t n = d.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = np.empty(n)
    cdef double[::1] y = ya
    cdef Py_ssize_t i
    for i in range(n):
        y[i] = d[i] * x[i]
        if i > 0:
            y[i] += dl[i - 1] * x[i - 1]
        if i < n - 1:
            y[i] += du[i] * x[i + 1]
    return ya


cdef Py_ssize_t _sturm_count(double[::1] d, double[::1] e2, double x, double pivmin) nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t cnt = 0
    cdef double q = d[0] - x
    cdef Py_ssize_t i
    if fabs(q) < pivmin:
        q = -pivmin if q < 0 else pivmin
    if q < 0:
        cnt += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin if q < 0 else pivmin
        if q < 0:
            cnt += 1
    return cnt


def tridiag_eigenvalues(double[::1] d, double[::1] e):
    cdef Py_ssize_t n = d.shape[0]
    if n == 1:
        return np.array([d[0]])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e2a = np.empty(n - 1)
    cdef double[::1] e2 = e2a
    cdef Py_ssize_t i, m, it
    cdef double emax2 = 0.0
    for i in range(n - 1):
        e2[i] = e[i] * e[i]
        if e2[i] > emax2:
            emax2 = e2[i]
    cdef double gl = d[0], gu = d[0], lo_i, hi_i
    for i in range(n):
        lo_i = d[i]
        hi_i = d[i]
        if i > 0:
            lo_i -= fabs(e[i - 1])
            hi_i += fabs(e[i - 1])
        if i < n - 1:
            lo_i -= fabs(e[i])
            hi_i += fabs(e[i])
        if lo_i < gl:
            gl = lo_i
        if hi_i > gu:
            gu = hi_i
    cdef double span = max(fabs(gl), fabs(gu), 1.0)
    gl -= 2.0 * _EPS * span
    gu += 2.0 * _EPS * span
    cdef double pivmin = _SAFMIN * (emax2 if emax2 > 1.0 else 1.0)
    if pivmin < _SAFMIN:
        pivmin = _SAFMIN

    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.empty(n)
    cdef double lo, hi, mid, tol
    for m in range(n):
        lo = gl
        hi = gu
        for it in range(128):
            mid = 0.5 * (lo + hi)
            if _sturm_count(d, e2, mid, pivmin) >= m + 1:
                hi = mid
            else:
                lo = mid
            tol = 2.0 * _EPS * max(fabs(lo), fabs(hi)) + 2.0 * pivmin
            if hi - lo <= tol:
                break
        vals[m] = 0.5 * (lo + hi)
    for m in range(1, n):
        if vals[m] < vals[m - 1]:
            vals[m] = vals[m - 1]
    return vals


cdef void _fill_start_vector(double[::1] out, Py_ssize_t index):
    cdef unsigned long long x = 0x9E3779B97F4A7C15ULL * (<unsigned long long> index + 1ULL)
    cdef unsigned long long z
    cdef Py_ssize_t i
    for i in range(out.shape[0]):
        x = x + 0x9E3779B97F4A7C15ULL
        z = x
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
        z = z ^ (z >> 31)
        out[i] = <double> (z >> 11) / 9007199254740992.0 - 0.5


cdef void _pivoted_solve(double[::1] e, double[::1] shifted, double[::1] x,
                         double[::1] d, double[::1] u, double[::1] w,
                         double pivmin) nogil:
    # Solve (T - shift I) x = b in place with partial pivoting; row swaps keep
    # multipliers bounded by 1, at the cost of one fill-in superdiagonal w.
    cdef Py_ssize_t n = shifted.shape[0]
    cdef Py_ssize_t i
    cdef double piv, m, u_old, w_old, tmp, acc
    for i in range(n):
        d[i] = shifted[i]
    for i in range(n - 1):
        u[i] = e[i]
    for i in range(n - 2):
        w[i] = 0.0
    for i in range(n - 1):
        if fabs(d[i]) >= fabs(e[i]):
            piv = d[i]
            if fabs(piv) < pivmin:
                piv = -pivmin if piv < 0 else pivmin
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
            tmp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = tmp - m * x[i + 1]
    for i in range(n - 1, -1, -1):
        piv = d[i]
        if fabs(piv) < pivmin:
            piv = -pivmin if piv < 0 else pivmin
        acc = x[i]
        if i < n - 1:
            acc -= u[i] * x[i + 1]
        if i < n - 2:
            acc -= w[i] * x[i + 2]
        x[i] = acc / piv


def tridiag_eigenvectors(double[::1] d, double[::1] e, double[::1] vals, int max_steps=64):
    cdef Py_ssize_t n = d.shape[0]
    if n == 1:
        return np.ones((1, 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] vecs = np.empty((n, n), order="F")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] va = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lua = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lu_ua = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lu_wa = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sha = np.empty(n)
    cdef double[::1] v = va
    cdef double[::1] lu_d = lua
    cdef double[::1] lu_u = lu_ua
    cdef double[::1] lu_w = lu_wa
    cdef double[::1] shifted = sha
    cdef Py_ssize_t m, i, p, step, imax
    cdef double tnorm = 0.0, emax = 0.0, emax2 = 0.0
    for i in range(n):
        if fabs(d[i]) > tnorm:
            tnorm = fabs(d[i])
    for i in range(n - 1):
        if fabs(e[i]) > emax:
            emax = fabs(e[i])
    tnorm += 2.0 * emax
    if tnorm < _SAFMIN:
        tnorm = _SAFMIN
    emax2 = emax * emax
    cdef double pivmin = _SAFMIN * (emax2 if emax2 > 1.0 else 1.0)
    cdef double gaptol = 1e-6 * tnorm
    cdef double restol = 100.0 * _EPS * tnorm
    cdef double reseed_tol
    cdef double shift, nrm, dot, resid, r_i, mx
    cdef Py_ssize_t cluster_start = 0
    cdef bint ok

    reseed_tol = 1e-3 / (<double> n) ** 0.5
    for m in range(n):
        if m > 0 and vals[m] - vals[m - 1] > gaptol:
            cluster_start = m
        shift = vals[m] + (m - cluster_start) * 10.0 * _EPS * tnorm
        for i in range(n):
            shifted[i] = d[i] - shift
        _fill_start_vector(v, m)
        nrm = 0.0
        for i in range(n):
            nrm += v[i] * v[i]
        nrm = nrm ** 0.5
        for i in range(n):
            v[i] /= nrm
        ok = False
        for step in range(max_steps):
            _pivoted_solve(e, shifted, v, lu_d, lu_u, lu_w, pivmin)
            mx = 0.0
            for i in range(n):
                if fabs(v[i]) > mx:
                    mx = fabs(v[i])
            if mx != mx or mx == 0.0 or mx - mx != 0.0:  # nan, zero, or inf
                _fill_start_vector(v, m + (step + 1) * n)
                mx = 0.0
                for i in range(n):
                    if fabs(v[i]) > mx:
                        mx = fabs(v[i])
            for i in range(n):
                v[i] /= mx
            for p in range(cluster_start, m):
                dot = 0.0
                for i in range(n):
                    dot += vecs[i, p] * v[i]
                for i in range(n):
                    v[i] -= dot * vecs[i, p]
            nrm = 0.0
            for i in range(n):
                nrm += v[i] * v[i]
            nrm = nrm ** 0.5
            if nrm < reseed_tol:
                _fill_start_vector(v, m + (step + 1) * n)
                nrm = 0.0
                for i in range(n):
                    nrm += v[i] * v[i]
                nrm = nrm ** 0.5
            for i in range(n):
                v[i] /= nrm
            resid = 0.0
            for i in range(n):
                r_i = d[i] * v[i] - vals[m] * v[i]
                if i > 0:
                    r_i += e[i - 1] * v[i - 1]
                if i < n - 1:
                    r_i += e[i] * v[i + 1]
                if fabs(r_i) > resid:
                    resid = fabs(r_i)
            if resid <= restol:
                ok = True
                break
        if not ok:
            raise RuntimeError(f"inverse iteration failed to converge for vector {m}")
        imax = 0
        for i in range(1, n):
            if fabs(v[i]) > fabs(v[imax]):
                imax = i
        if v[imax] < 0:
            for i in range(n):
                v[i] = -v[i]
        for i in range(n):
            vecs[i, m] = v[i]
    return np.ascontiguousarray(vecs)
