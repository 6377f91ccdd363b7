"""Pure-Python/numpy versions of the numerical kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same results up to floating-point reassociation. ``kernels`` picks
one of the two at import time.
"""

from __future__ import annotations

import math

import numpy as np

STATUS_OK = 0
STATUS_BLOW_UP = 1
STATUS_MINIMAL_SPHERE = 2
STATUS_UNDERFLOW = 3

# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def fd_weights(x0, xs, m):
    """Fornberg weights for the m-th derivative at ``x0`` from nodes ``xs``."""
    n = len(xs)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def diff1(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    out[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * y[:-2]
        + (h2 - h1) / (h1 * h2) * y[1:-1]
        + h1 / (h2 * (h1 + h2)) * y[2:]
    )
    out[0] = fd_weights(x[0], x[:3], 1) @ y[:3]
    out[-1] = fd_weights(x[-1], x[-3:], 1) @ y[-3:]
    return out


def diff2(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    out[1:-1] = 2.0 * (
        y[:-2] / (h1 * (h1 + h2)) - y[1:-1] / (h1 * h2) + y[2:] / (h2 * (h1 + h2))
    )
    out[0] = fd_weights(x[0], x[:4], 2) @ y[:4]
    out[-1] = fd_weights(x[-1], x[-4:], 2) @ y[-4:]
    return out


def cumtrapz(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def cumsimpson(x, y):
    """Cumulative Simpson integral on a uniform grid, exact for quadratics.

    Even nodes use composite Simpson over node pairs; odd nodes add one cell
    integrated through the quadratic on the neighbouring three nodes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    h = (x[-1] - x[0]) / (n - 1)
    out = np.zeros(n)
    pairs = h / 3.0 * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(pairs)
    odd = np.arange(1, n, 2)
    fwd = odd + 1 < n
    i = odd[fwd]
    out[i] = out[i - 1] + h / 12.0 * (5.0 * y[i - 1] + 8.0 * y[i] - y[i + 1])
    i = odd[~fwd]
    out[i] = out[i - 1] + h / 12.0 * (-y[i - 2] + 8.0 * y[i - 1] + 5.0 * y[i])
    return out


def running_min(y):
    return np.minimum.accumulate(np.asarray(y, dtype=float))


def _lagrange4(xs, ys, x):
    total = 0.0
    for j in range(4):
        w = 1.0
        for k in range(4):
            if k != j:
                w *= (x - xs[k]) / (xs[j] - xs[k])
        total += w * ys[j]
    return total


def jang_rhs(v, g11, g11_r, rho, rho_r, rho_rr, ka, kb):
    """Right-hand side (dv/dr, ds/dr) of the reduced generalized Jang ODE."""
    sg = math.sqrt(g11)
    w = 1.0 - v * v
    d = 2.0 * rho_r / (sg * rho)
    e = rho_rr / rho_r - 0.5 * g11_r / g11
    dv = sg * ka + sg * (2.0 * kb - d * v) / w - v * e
    return dv, sg / math.sqrt(w)


def dopri_nodes(coef, r_nodes, i_start, r0, v0, s0, rtol, atol, eps_blow):
    """Integrate the Jang ODE from ``r0`` through the nodes after ``i_start``.

    ``coef(r)`` returns the seven coefficient fields (g11, g11_r, rho, rho_r,
    rho_rr, ka, kb) at a scalar radius. Steps are adaptive inside every cell and
    always land on the nodes. Returns ``(v, s, n_done, status, r_stop, v_stop)``
    where ``v``/``s`` hold values at nodes ``i_start .. i_start + n_done - 1``.
    """
    n = len(r_nodes)
    v_out = np.full(n - i_start, np.nan)
    s_out = np.full(n - i_start, np.nan)
    v_out[0] = v0
    s_out[0] = s0
    r = r0
    y = [v0, s0]
    h = None
    status = STATUS_OK
    f0 = None
    done = 1
    for i in range(i_start, n - 1):
        r_end = r_nodes[i + 1]
        if h is None:
            h = 0.01 * (r_end - r)
        hmin = 1e-14 * max(1.0, abs(r_end))
        if coef(r_end)[3] <= 0.0:
            return v_out, s_out, done, STATUS_MINIMAL_SPHERE, r, y[0]
        bad_rho_r = False
        while r < r_end:
            h = min(h, r_end - r)
            if f0 is None:
                c0 = coef(r)
                if c0[3] <= 0.0:
                    return v_out, s_out, done, STATUS_MINIMAL_SPHERE, r, y[0]
                f0 = jang_rhs(y[0], *c0)
            k = [f0]
            ok = True
            for st in range(1, 7):
                yv = y[0] + h * sum(a * kk[0] for a, kk in zip(_A[st], k))
                cs = coef(r + _C[st] * h)
                if cs[3] <= 0.0:
                    bad_rho_r = True
                    ok = False
                    break
                if not (1.0 - yv * yv > 0.0) or not math.isfinite(yv):
                    ok = False
                    break
                k.append(jang_rhs(yv, *cs))
            if ok:
                vn = y[0] + h * sum(b * kk[0] for b, kk in zip(_B5, k))
                sn = y[1] + h * sum(b * kk[1] for b, kk in zip(_B5, k))
                ev = h * sum(e * kk[0] for e, kk in zip(_E, k))
                es = h * sum(e * kk[1] for e, kk in zip(_E, k))
                sv = atol + rtol * max(abs(y[0]), abs(vn))
                ss = atol + rtol * max(abs(y[1]), abs(sn))
                err = math.sqrt(0.5 * ((ev / sv) ** 2 + (es / ss) ** 2))
                if not math.isfinite(err) or not (1.0 - vn * vn > 0.0):
                    ok = False
            if not ok:
                h *= 0.25
                if h < hmin:
                    code = STATUS_MINIMAL_SPHERE if bad_rho_r else STATUS_UNDERFLOW
                    return v_out, s_out, done, code, r, y[0]
                continue
            if err <= 1.0:
                r = r_end if r_end - (r + h) <= 1e-15 * abs(r_end) else r + h
                y = [vn, sn]
                f0 = k[6]
                if 1.0 - vn * vn < eps_blow:
                    return v_out, s_out, done, STATUS_BLOW_UP, r, vn
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            else:
                fac = max(0.2, 0.9 * err ** -0.2)
            h *= fac
            if h < hmin:
                return v_out, s_out, done, STATUS_UNDERFLOW, r, y[0]
        v_out[done] = y[0]
        s_out[done] = y[1]
        done += 1
    return v_out, s_out, done, status, r, y[0]


def jang_tabulated(r_nodes, fields, i_start, r0, v0, s0, rtol, atol, eps_blow):
    """Jang integration with coefficients interpolated from nodal samples.

    ``fields`` has shape (7, n); each field is interpolated by the cubic
    through the four nodes surrounding the current cell.
    """
    r_nodes = np.asarray(r_nodes, dtype=float)
    fields = np.asarray(fields, dtype=float)
    n = len(r_nodes)
    rl = r_nodes.tolist()
    fl = fields.tolist()

    def coef(x):
        i = int(np.searchsorted(r_nodes, x, side="right")) - 1
        i = min(max(i, 0), n - 2)
        j0 = min(max(i - 1, 0), n - 4)
        xs = rl[j0:j0 + 4]
        return tuple(_lagrange4(xs, row[j0:j0 + 4], x) for row in fl)

    return dopri_nodes(coef, r_nodes, i_start, r0, v0, s0, rtol, atol, eps_blow)
