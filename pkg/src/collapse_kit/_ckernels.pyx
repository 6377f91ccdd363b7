# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot numerical kernels (see ``_pykernels``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, isfinite, pow

from ._pykernels import fd_weights

cnp.import_array()

cdef enum:
    STATUS_OK = 0
    STATUS_BLOW_UP = 1
    STATUS_MINIMAL_SPHERE = 2
    STATUS_UNDERFLOW = 3

cdef double[7] C_ = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
cdef double[7][6] A_ = [
    [0, 0, 0, 0, 0, 0],
    [1.0 / 5, 0, 0, 0, 0, 0],
    [3.0 / 40, 9.0 / 40, 0, 0, 0, 0],
    [44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0],
    [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0],
    [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0],
    [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84],
]
cdef double[7] B5_ = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0]
cdef double[7] B4_ = [5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200,
                      187.0 / 2100, 1.0 / 40]


def diff1(x, y):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double h1, h2
    for i in range(1, n - 1):
        h1 = xv[i] - xv[i - 1]
        h2 = xv[i + 1] - xv[i]
        o[i] = (-h2 / (h1 * (h1 + h2)) * yv[i - 1]
                + (h2 - h1) / (h1 * h2) * yv[i]
                + h1 / (h2 * (h1 + h2)) * yv[i + 1])
    xa = np.asarray(xv)
    ya = np.asarray(yv)
    o[0] = fd_weights(xa[0], xa[:3], 1) @ ya[:3]
    o[n - 1] = fd_weights(xa[n - 1], xa[n - 3:], 1) @ ya[n - 3:]
    return out


def diff2(x, y):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double h1, h2
    for i in range(1, n - 1):
        h1 = xv[i] - xv[i - 1]
        h2 = xv[i + 1] - xv[i]
        o[i] = 2.0 * (yv[i - 1] / (h1 * (h1 + h2)) - yv[i] / (h1 * h2)
                      + yv[i + 1] / (h2 * (h1 + h2)))
    xa = np.asarray(xv)
    ya = np.asarray(yv)
    o[0] = fd_weights(xa[0], xa[:4], 2) @ ya[:4]
    o[n - 1] = fd_weights(xa[n - 1], xa[n - 4:], 2) @ ya[n - 4:]
    return out


def cumtrapz(x, y):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.zeros(n)
    cdef double[::1] o = out
    cdef double acc = 0.0
    for i in range(1, n):
        acc += 0.5 * (yv[i] + yv[i - 1]) * (xv[i] - xv[i - 1])
        o[i] = acc
    return out


def cumsimpson(x, y):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.zeros(n)
    cdef double[::1] o = out
    cdef double h = (xv[n - 1] - xv[0]) / (n - 1)
    cdef double acc = 0.0
    for i in range(2, n, 2):
        acc += h / 3.0 * (yv[i - 2] + 4.0 * yv[i - 1] + yv[i])
        o[i] = acc
    for i in range(1, n, 2):
        if i + 1 < n:
            o[i] = o[i - 1] + h / 12.0 * (5.0 * yv[i - 1] + 8.0 * yv[i] - yv[i + 1])
        else:
            o[i] = o[i - 1] + h / 12.0 * (-yv[i - 2] + 8.0 * yv[i - 1] + 5.0 * yv[i])
    return out


def running_min(y):
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0], i
    out = np.empty(n)
    cdef double[::1] o = out
    if n == 0:
        return out
    o[0] = yv[0]
    for i in range(1, n):
        o[i] = yv[i] if yv[i] < o[i - 1] else o[i - 1]
    return out


cdef inline void _coef(const double[::1] r, const double[:, ::1] f, Py_ssize_t n,
                       double x, double* c) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n - 1, mid, i, j0, j, k, q
    cdef double w
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if r[mid] <= x:
            lo = mid
        else:
            hi = mid
    i = lo
    j0 = i - 1
    if j0 < 0:
        j0 = 0
    if j0 > n - 4:
        j0 = n - 4
    for q in range(7):
        c[q] = 0.0
    for j in range(4):
        w = 1.0
        for k in range(4):
            if k != j:
                w *= (x - r[j0 + k]) / (r[j0 + j] - r[j0 + k])
        for q in range(7):
            c[q] += w * f[q, j0 + j]


cdef inline void _rhs(double v, const double* c, double* out) noexcept nogil:
    cdef double sg = sqrt(c[0])
    cdef double w = 1.0 - v * v
    cdef double d = 2.0 * c[3] / (sg * c[2])
    cdef double e = c[4] / c[3] - 0.5 * c[1] / c[0]
    out[0] = sg * c[5] + sg * (2.0 * c[6] - d * v) / w - v * e
    out[1] = sg / sqrt(w)


def jang_tabulated(r_nodes, fields, Py_ssize_t i_start, double r0, double v0, double s0,
                   double rtol, double atol, double eps_blow):
    cdef const double[::1] r = np.ascontiguousarray(r_nodes, dtype=np.float64)
    cdef const double[:, ::1] f = np.ascontiguousarray(fields, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0]
    v_arr = np.full(n - i_start, np.nan)
    s_arr = np.full(n - i_start, np.nan)
    cdef double[::1] vo = v_arr
    cdef double[::1] so = s_arr
    vo[0] = v0
    so[0] = s0
    cdef double x = r0, yv = v0, ys = s0
    cdef double h = -1.0, hmin, r_end, err, ev, es, sv, ss, vn, sn, fac, tv, ts
    cdef double c[7]
    cdef double k[7][2]
    cdef bint have_f0 = False, ok, bad_rho_r
    cdef Py_ssize_t i, st, j
    cdef Py_ssize_t done = 1
    cdef int status = STATUS_OK
    with nogil:
        for i in range(i_start, n - 1):
            r_end = r[i + 1]
            if h < 0:
                h = 0.01 * (r_end - x)
            hmin = 1e-14 * (fabs(r_end) if fabs(r_end) > 1.0 else 1.0)
            _coef(r, f, n, r_end, c)
            if c[3] <= 0.0:
                status = STATUS_MINIMAL_SPHERE
                break
            bad_rho_r = False
            while x < r_end:
                if h > r_end - x:
                    h = r_end - x
                if not have_f0:
                    _coef(r, f, n, x, c)
                    if c[3] <= 0.0:
                        status = STATUS_MINIMAL_SPHERE
                        break
                    _rhs(yv, c, k[0])
                    have_f0 = True
                ok = True
                for st in range(1, 7):
                    tv = yv
                    ts = ys
                    for j in range(st):
                        tv += h * A_[st][j] * k[j][0]
                        ts += h * A_[st][j] * k[j][1]
                    _coef(r, f, n, x + C_[st] * h, c)
                    if c[3] <= 0.0:
                        bad_rho_r = True
                        ok = False
                        break
                    if not (1.0 - tv * tv > 0.0) or not isfinite(tv):
                        ok = False
                        break
                    _rhs(tv, c, k[st])
                if ok:
                    vn = yv
                    sn = ys
                    ev = 0.0
                    es = 0.0
                    for j in range(7):
                        vn += h * B5_[j] * k[j][0]
                        sn += h * B5_[j] * k[j][1]
                        ev += h * (B5_[j] - B4_[j]) * k[j][0]
                        es += h * (B5_[j] - B4_[j]) * k[j][1]
                    sv = atol + rtol * (fabs(yv) if fabs(yv) > fabs(vn) else fabs(vn))
                    ss = atol + rtol * (fabs(ys) if fabs(ys) > fabs(sn) else fabs(sn))
                    err = sqrt(0.5 * ((ev / sv) * (ev / sv) + (es / ss) * (es / ss)))
                    if not isfinite(err) or not (1.0 - vn * vn > 0.0):
                        ok = False
                if not ok:
                    h *= 0.25
                    if h < hmin:
                        status = STATUS_MINIMAL_SPHERE if bad_rho_r else STATUS_UNDERFLOW
                        break
                    continue
                if err <= 1.0:
                    if r_end - (x + h) <= 1e-15 * fabs(r_end):
                        x = r_end
                    else:
                        x = x + h
                    yv = vn
                    ys = sn
                    k[0][0] = k[6][0]
                    k[0][1] = k[6][1]
                    if 1.0 - vn * vn < eps_blow:
                        status = STATUS_BLOW_UP
                        break
                    if err == 0.0:
                        fac = 5.0
                    else:
                        fac = 0.9 * pow(err, -0.2)
                        if fac > 5.0:
                            fac = 5.0
                        if fac < 0.2:
                            fac = 0.2
                else:
                    fac = 0.9 * pow(err, -0.2)
                    if fac < 0.2:
                        fac = 0.2
                h *= fac
                if h < hmin:
                    status = STATUS_UNDERFLOW
                    break
            if status != STATUS_OK:
                break
            vo[done] = yv
            so[done] = ys
            done += 1
    return v_arr, s_arr, done, status, x, yv
