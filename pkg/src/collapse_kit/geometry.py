"""Pointwise geometry of spherically symmetric data.

Proper-radius derivative: ``d/dt = g11**-0.5 d/dr``. With ``P = rho_t``:

* scalar curvature ``R = -4 P_t / rho + 2 (1 - P**2) / rho**2``
* ``16 pi mu = R + (ka + 2 kb)**2 - (ka**2 + 2 kb**2)``
* ``8 pi Jn = 2 (P / rho) (ka - kb) - 2 d_t kb``
* ``H = 2 P / rho``, ``Tr_S k = 2 kb``, ``theta_pm = H +- Tr_S k``

The sign of ``Jn`` is fixed so that Painleve-Gullstrand slices are vacuum.
Quantities with ``rho`` in a denominator are evaluated for ``r > 0`` only; at
a ball centre ``R``, ``mu`` and ``Jn`` take their one-sided limits and the
expansions are reported as absent (NaN).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .radial_data import MIN_POINTS, InitialData, subsample

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)

PROFILE_COLUMNS = ("r", "R", "mu", "Jn", "H", "TrSk", "thetaP", "thetaM", "Rad", "Vol")
CONVENTIONS = {
    "J_sign": "8piJn = 2(rho_t/rho)(ka-kb) - 2 d_t kb (vacuum on Painleve-Gullstrand)",
    "kb_sign": "kb < 0 is collapsing (future-trapping)",
    "MO_measure": "proper (sqrt(g11) dr); coordinate dr also emitted when they differ",
    "center": "R, mu, Jn at r=0 are one-sided limits; H and theta are absent there",
}


def pointwise(prim):
    """All local geometric quantities from a primitives dict (r > 0)."""
    g = prim["g11"]
    rho = prim["rho"]
    rho_r = prim["rho_r"]
    sg = np.sqrt(g)
    ka = prim["ka"]
    kb = prim["kb"]
    with np.errstate(divide="ignore", invalid="ignore"):
        P = rho_r / sg
        P_t = prim["rho_rr"] / g - 0.5 * rho_r * prim["g11_r"] / g**2
        R = -4.0 * P_t / rho + 2.0 * (1.0 - P**2) / rho**2
        H = 2.0 * P / rho
        Jn = (2.0 * (P / rho) * (ka - kb) - 2.0 * prim["kb_r"] / sg) / (8.0 * math.pi)
    tr_g = ka + 2.0 * kb
    k_sq = ka**2 + 2.0 * kb**2
    mu = (R + tr_g**2 - k_sq) / (16.0 * math.pi)
    tr_s = 2.0 * kb
    return {
        "R": R, "mu": mu, "Jn": Jn, "H": H, "TrSk": tr_s,
        "thetaP": H + tr_s, "thetaM": H - tr_s,
        "TrGk": tr_g, "kNormSq": k_sq, "rho_t": P,
    }


def evaluate_at(data, r):
    """Pointwise quantities at arbitrary radii (analytic data only)."""
    return pointwise(data.primitives(np.atleast_1d(np.asarray(r, dtype=float))))


def _extrapolate_to_zero(x, y):
    # quadratic through three points, evaluated at 0
    x0, x1, x2 = x
    l0 = x1 * x2 / ((x0 - x1) * (x0 - x2))
    l1 = x0 * x2 / ((x1 - x0) * (x1 - x2))
    l2 = x0 * x1 / ((x2 - x0) * (x2 - x1))
    return l0 * y[0] + l1 * y[1] + l2 * y[2]


def center_limits(data, values=None):
    """One-sided r -> 0 limits of R, mu and Jn for ball data."""
    if data.is_analytic:
        d = data.r[1] / 8.0
        x = np.array([d, 2.0 * d, 3.0 * d])
        vals = evaluate_at(data, x)
    else:
        x = data.r[1:4]
        vals = {k: v[1:4] for k, v in values.items()}
    return {k: float(_extrapolate_to_zero(x, vals[k])) for k in ("R", "mu", "Jn")}


def _cumulative(data, integrand_fn, nodal):
    r = data.r
    if data.is_analytic:
        a = r[:-1, None]
        h = np.diff(r)[:, None]
        pts = a + 0.5 * h * (1.0 + _GL_X[None, :])
        cells = 0.5 * h[:, 0] * (integrand_fn(pts.ravel()).reshape(pts.shape) @ _GL_W)
        return np.concatenate([[0.0], np.cumsum(cells)])
    if data.grid.uniform:
        return kernels.cumsimpson(r, nodal)
    return kernels.cumtrapz(r, nodal)


def radius_volume(data):
    """Proper radius and volume measured from the inner boundary of the domain.

    Analytic data use 8-point Gauss-Legendre per cell; tabulated data use
    cumulative Simpson on uniform grids and trapezoid otherwise.
    """
    sg = np.sqrt(data.sample("g11"))
    rho = data.sample("rho")

    def rad_fn(x):
        return np.sqrt(data.g11(x))

    def vol_fn(x):
        return 4.0 * math.pi * np.sqrt(data.g11(x)) * data.rho(x) ** 2

    rad = _cumulative(data, rad_fn, sg)
    vol = _cumulative(data, vol_fn, 4.0 * math.pi * sg * rho**2)
    return rad, vol


@dataclass(frozen=True, eq=False)
class GeometryProfile:
    data: InitialData
    r: np.ndarray
    R: np.ndarray
    mu: np.ndarray
    Jn: np.ndarray
    H: np.ndarray
    TrSk: np.ndarray
    thetaP: np.ndarray
    thetaM: np.ndarray
    Rad: np.ndarray
    Vol: np.ndarray
    TrGk: np.ndarray
    kNormSq: np.ndarray
    rho_t: np.ndarray

    @property
    def has_center(self):
        return self.data.domain == "ball"

    @property
    def mu_minus_J(self):
        return self.mu - self.Jn

    @property
    def mu_plus_J(self):
        return self.mu + self.Jn

    @property
    def rho(self):
        return self.data.sample("rho")

    def column(self, name):
        return getattr(self, name)


def geometry_profile(data):
    """Evaluate every geometric field on the grid of ``data``."""
    vals = pointwise(data.primitives())
    if data.domain == "ball":
        lim = center_limits(data, vals)
        for key in ("R", "mu", "Jn"):
            vals[key][0] = lim[key]
        for key in ("H", "thetaP", "thetaM"):
            vals[key][0] = np.nan
    rad, vol = radius_volume(data)
    arrays = {k: np.asarray(v, dtype=float) for k, v in vals.items()}
    for a in arrays.values():
        a.setflags(write=False)
    return GeometryProfile(data=data, r=data.r, Rad=rad, Vol=vol, **arrays)


def scalar_curvature(data):
    return geometry_profile(data).R


def constraint_densities(data):
    """Energy density ``mu`` and radial momentum density ``Jn`` on the grid."""
    prof = geometry_profile(data)
    return prof.mu, prof.Jn


def expansions(data):
    prof = geometry_profile(data)
    return {k: getattr(prof, k) for k in ("H", "TrSk", "thetaP", "thetaM")}


def difference_error(data, fn):
    """Per-node bound on the difference error of ``fn(data)`` for samples.

    The change against the every-other-node subgrid bounds the error of any
    scheme of order one or more; odd nodes take the larger neighbouring
    value. The grid runs along the last axis. Analytic data and grids too
    short to halve get zeros.
    """
    fine = np.asarray(fn(data), dtype=float)
    out = np.zeros_like(fine)
    if data.is_analytic or len(data.r) < 2 * MIN_POINTS:
        return out
    coarse_data = subsample(data)
    coarse = np.asarray(fn(coarse_data), dtype=float)
    idx = np.searchsorted(data.r, coarse_data.r)
    est = np.nan_to_num(np.abs(fine[..., idx] - coarse), nan=0.0)
    out[..., idx] = est
    for j in range(len(idx) - 1):
        a, b = idx[j], idx[j + 1]
        out[..., a + 1:b] = np.maximum(est[..., j], est[..., j + 1])[..., None]
    return out


@dataclass(frozen=True)
class DecReport:
    margin: np.ndarray
    allowance: np.ndarray
    holds: bool
    worst_index: int
    worst_r: float
    worst_margin: float
    tol: float


def _dec_margin(data):
    prof = geometry_profile(data)
    return prof.mu - np.abs(prof.Jn)


def dec_check(profile, tol=None):
    """Dominant energy condition ``mu >= |Jn|`` with a relative tolerance.

    ``tol`` defaults to ``1e-10`` times the largest of ``max|mu|``,
    ``max|Jn|`` and ``1/r_max**2``. On tabulated data each node also gets an
    allowance for its estimated difference error.
    """
    margin = profile.mu - np.abs(profile.Jn)
    if tol is None:
        scale = max(np.nanmax(np.abs(profile.mu)), np.nanmax(np.abs(profile.Jn)),
                    1.0 / profile.r[-1] ** 2)
        tol = 1e-10 * scale
    allowance = difference_error(profile.data, _dec_margin)
    slack = margin + allowance
    i = int(np.nanargmin(slack))
    return DecReport(
        margin=margin,
        allowance=allowance,
        holds=bool(slack[i] >= -tol),
        worst_index=i,
        worst_r=float(profile.r[i]),
        worst_margin=float(margin[i]),
        tol=float(tol),
    )


def _fmt(x):
    return "" if not np.isfinite(x) else format(float(x), ".17g")


def write_profile_csv(profile, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PROFILE_COLUMNS)
        cols = [profile.column(c) for c in PROFILE_COLUMNS]
        for row in zip(*cols):
            w.writerow([_fmt(x) for x in row])


def profile_to_dict(profile):
    data = profile.data
    meta = {
        "label": data.label,
        "domain": data.domain,
        "n": len(data.r),
        "providers": "analytic" if data.is_analytic else "tabulated",
        "family": data.family.to_dict() if data.family else None,
        "rad_vol_origin": "center" if data.domain == "ball" else "annulus-based (inner boundary)",
        "conventions": CONVENTIONS,
    }
    cols = {c: [None if not np.isfinite(x) else float(x) for x in profile.column(c)]
            for c in PROFILE_COLUMNS}
    return {"meta": meta, "columns": cols}


def write_profile_json(profile, path):
    with open(path, "w") as fh:
        json.dump(profile_to_dict(profile), fh, indent=1, sort_keys=True)
        fh.write("\n")
