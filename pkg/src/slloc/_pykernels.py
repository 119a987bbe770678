"""Pure numpy fallback for the compiled kernels in ``_ckernels.pyx``.

Every function here has the same signature and return convention as its
compiled twin; the test suite runs both against each other.
"""

import numpy as np


def _count_many(diag, off2, sigmas, pivmin):
    # Sturm recurrence advanced over the matrix index, vectorized over shifts.
    sigmas = np.asarray(sigmas, dtype=np.float64)
    q = diag[0] - sigmas
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    neg = (q < 0.0).astype(np.int64)
    for i in range(1, diag.shape[0]):
        q = diag[i] - sigmas - off2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        neg += q < 0.0
    return neg


def sturm_count(diag, off2, sigma, pivmin):
    return int(_count_many(np.asarray(diag), np.asarray(off2), [sigma], pivmin)[0])


def bisect_eigenvalues(diag, off2, first, count, lo, hi, pivmin):
    diag = np.asarray(diag, dtype=np.float64)
    off2 = np.asarray(off2, dtype=np.float64)
    eps = np.finfo(np.float64).eps
    target = first + np.arange(count)
    a = np.full(count, float(lo))
    b = np.full(count, float(hi))
    for _ in range(400):
        mid = 0.5 * (a + b)
        width_ok = b - a <= 2.0 * eps * np.maximum(np.abs(a), np.abs(b)) + pivmin
        stuck = (mid <= a) | (mid >= b)
        active = ~(width_ok | stuck)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        above = _count_many(diag, off2, mid[idx], pivmin) > target[idx]
        b[idx[above]] = mid[idx[above]]
        a[idx[~above]] = mid[idx[~above]]
    return 0.5 * (a + b)


def gepp_solve(diag, off, sigma, rhs, pivmin):
    # extended precision keeps the residual of the computed eigenvector near the
    # rounding floor of the stored vector
    ld = np.longdouble
    m = len(diag)
    d = list(np.asarray(diag, dtype=ld) - ld(sigma))
    du = list(np.asarray(off, dtype=ld)) + [ld(0)]
    dl = list(du)
    du2 = [ld(0)] * max(m, 1)
    b = list(np.asarray(rhs, dtype=ld))
    swapped = [False] * max(m, 1)
    replaced = 0
    for i in range(m - 1):
        if abs(d[i]) >= abs(dl[i]):
            if abs(d[i]) < pivmin:
                d[i] = ld(pivmin)
                replaced += 1
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] -= fact * du[i]
        else:
            swapped[i] = True
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < m - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    if abs(d[m - 1]) < pivmin:
        d[m - 1] = ld(pivmin)
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
    return np.array(b, dtype=np.float64), replaced


def ldl_factor(diag, off, tiny):
    m = len(diag)
    piv = np.empty(m)
    mult = np.zeros(m)
    piv[0] = diag[0]
    if abs(piv[0]) <= tiny:
        return piv, mult, 0
    prev = float(piv[0])
    for i in range(1, m):
        e = float(off[i - 1])
        mi = e / prev
        prev = float(diag[i]) - mi * e
        mult[i] = mi
        piv[i] = prev
        if abs(prev) <= tiny:
            return piv, mult, i
    return piv, mult, -1


def ldl_solve(piv, mult, off, rhs):
    m = len(piv)
    x = [float(v) for v in rhs]
    mu = mult.tolist()
    pv = piv.tolist()
    of = list(off)
    for i in range(1, m):
        x[i] -= mu[i] * x[i - 1]
    x[m - 1] /= pv[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = (x[i] - of[i] * x[i + 1]) / pv[i]
    return np.array(x)


def volterra_apply(g, sines, h):
    g = np.asarray(g, dtype=np.float64)
    sines = np.asarray(sines, dtype=np.float64)
    n = g.shape[0]
    out = np.zeros(n)
    if n > 1:
        out[1] = 0.5 * h * g[0] * sines[1]
    base = np.where(np.arange(n) % 2 == 1, 4.0, 2.0)
    for j in range(2, n):
        top = j if j % 2 == 0 else j - 1
        w = base[: top + 1].copy()
        w[0] = w[top] = 1.0
        acc = h / 3.0 * np.dot(w * g[: top + 1], sines[j - top : j + 1][::-1])
        if top != j:
            acc += 0.5 * h * g[top] * sines[1]
        out[j] = acc
    return out
