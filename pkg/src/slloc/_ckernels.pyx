# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Mirrors ``_pykernels`` function for function."""

import numpy as np

from libc.math cimport fabs, fabsl
from libc.stdlib cimport malloc, calloc, free


cdef inline Py_ssize_t _count(const double[::1] diag, const double[::1] off2,
                              double sigma, double pivmin) noexcept nogil:
    cdef Py_ssize_t m = diag.shape[0]
    cdef Py_ssize_t i, neg = 0
    cdef double q = diag[0] - sigma
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        neg += 1
    for i in range(1, m):
        q = diag[i] - sigma - off2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            neg += 1
    return neg


def sturm_count(const double[::1] diag, const double[::1] off2, double sigma, double pivmin):
    return _count(diag, off2, sigma, pivmin)


def bisect_eigenvalues(const double[::1] diag, const double[::1] off2,
                       Py_ssize_t first, Py_ssize_t count,
                       double lo, double hi, double pivmin):
    cdef double[::1] out = np.empty(count, dtype=np.float64)
    cdef Py_ssize_t k, it
    cdef double a, b, mid, floor = lo
    cdef double eps = np.finfo(np.float64).eps
    with nogil:
        for k in range(count):
            a = floor
            b = hi
            for it in range(400):
                mid = 0.5 * (a + b)
                if mid <= a or mid >= b:
                    break
                if b - a <= 2.0 * eps * (fabs(a) if fabs(a) > fabs(b) else fabs(b)) + pivmin:
                    break
                if _count(diag, off2, mid, pivmin) > first + k:
                    b = mid
                else:
                    a = mid
            out[k] = 0.5 * (a + b)
            floor = a
    return np.asarray(out)


def gepp_solve(const double[::1] diag, const double[::1] off, double sigma,
               const double[::1] rhs, double pivmin):
    """Solve (T - sigma I) x = rhs by Gaussian elimination with partial pivoting.

    Elimination runs in extended precision; returns (x, number of replaced pivots).
    """
    cdef Py_ssize_t m = diag.shape[0]
    cdef long double *d = <long double *> malloc(m * sizeof(long double))
    cdef long double *du = <long double *> calloc(m, sizeof(long double))
    cdef long double *dl = <long double *> calloc(m, sizeof(long double))
    cdef long double *du2 = <long double *> calloc(m, sizeof(long double))
    cdef long double *b = <long double *> malloc(m * sizeof(long double))
    cdef char *swapped = <char *> calloc(m, sizeof(char))
    cdef double[::1] out = np.empty(m)
    cdef Py_ssize_t i, replaced = 0
    cdef long double fact, temp
    if d == NULL or du == NULL or dl == NULL or du2 == NULL or b == NULL or swapped == NULL:
        free(d); free(du); free(dl); free(du2); free(b); free(swapped)
        raise MemoryError()
    with nogil:
        for i in range(m):
            d[i] = <long double> diag[i] - <long double> sigma
            b[i] = rhs[i]
        for i in range(m - 1):
            du[i] = off[i]
            dl[i] = off[i]
        for i in range(m - 1):
            if fabsl(d[i]) >= fabsl(dl[i]):
                if fabsl(d[i]) < pivmin:
                    d[i] = pivmin
                    replaced += 1
                fact = dl[i] / d[i]
                dl[i] = fact
                d[i + 1] -= fact * du[i]
            else:
                swapped[i] = 1
                fact = d[i] / dl[i]
                d[i] = dl[i]
                dl[i] = fact
                temp = du[i]
                du[i] = d[i + 1]
                d[i + 1] = temp - fact * d[i + 1]
                if i < m - 2:
                    du2[i] = du[i + 1]
                    du[i + 1] = -fact * du[i + 1]
        if fabsl(d[m - 1]) < pivmin:
            d[m - 1] = pivmin
            replaced += 1
        for i in range(m - 1):
            if swapped[i]:
                temp = b[i]
                b[i] = b[i + 1]
                b[i + 1] = temp - dl[i] * b[i]
            else:
                b[i + 1] -= dl[i] * b[i]
        b[m - 1] /= d[m - 1]
        if m > 1:
            b[m - 2] = (b[m - 2] - du[m - 2] * b[m - 1]) / d[m - 2]
        for i in range(m - 3, -1, -1):
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]
        for i in range(m):
            out[i] = <double> b[i]
    free(d); free(du); free(dl); free(du2); free(b); free(swapped)
    return np.asarray(out), replaced


def ldl_factor(const double[::1] diag, const double[::1] off, double tiny):
    cdef Py_ssize_t m = diag.shape[0]
    cdef double[::1] piv = np.empty(m)
    cdef double[::1] mult = np.zeros(m)
    cdef Py_ssize_t i, bad = -1
    with nogil:
        piv[0] = diag[0]
        if fabs(piv[0]) <= tiny:
            bad = 0
        else:
            for i in range(1, m):
                mult[i] = off[i - 1] / piv[i - 1]
                piv[i] = diag[i] - mult[i] * off[i - 1]
                if fabs(piv[i]) <= tiny:
                    bad = i
                    break
    return np.asarray(piv), np.asarray(mult), bad


def ldl_solve(const double[::1] piv, const double[::1] mult, const double[::1] off,
              const double[::1] rhs):
    cdef Py_ssize_t m = piv.shape[0]
    cdef double[::1] x = np.array(rhs, dtype=np.float64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(1, m):
            x[i] -= mult[i] * x[i - 1]
        x[m - 1] /= piv[m - 1]
        for i in range(m - 2, -1, -1):
            x[i] = (x[i] - off[i] * x[i + 1]) / piv[i]
    return np.asarray(x)


def volterra_apply(const double[::1] g, const double[::1] sines, double h):
    """out[j] = sum_i c_i(j) g[i] sines[j - i], prefix Simpson weights c(j)."""
    cdef Py_ssize_t n = g.shape[0]
    cdef double[::1] out = np.zeros(n)
    cdef Py_ssize_t i, j, top
    cdef double acc
    with nogil:
        for j in range(1, n):
            if j == 1:
                out[j] = 0.5 * h * g[0] * sines[1]
                continue
            top = j if j % 2 == 0 else j - 1
            # Simpson over [0, top]
            acc = g[0] * sines[j] + g[top] * sines[j - top]
            for i in range(1, top):
                if i % 2 == 1:
                    acc += 4.0 * g[i] * sines[j - i]
                else:
                    acc += 2.0 * g[i] * sines[j - i]
            acc *= h / 3.0
            if top != j:
                # trapezoid on the last interval; sines[0] == 0 kills the g[j] term
                acc += 0.5 * h * g[top] * sines[1]
            out[j] = acc
    return np.asarray(out)
