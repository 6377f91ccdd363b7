"""Misner-Sharp energy: profile, derivative identity, positivity, monotonicity, bounds.

``E = (rho/2)(1 - (rho^2/4) theta+ theta-) = (rho/2)(1 - P^2 + rho^2 kb^2)``,
with ``P = rho_r / sqrt(g11)``. Along proper radius the constraints give

    dE/dt = 4 pi rho^2 (mu P - Jn kb rho),

which is nonnegative wherever the dominant energy condition holds and both
expansions are positive (``P > rho |kb|``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .convergence import IdentityReport, ladder, max_abs, study
from .geometry import dec_check, difference_error, geometry_profile
from .horizon import scan

MONOTONE_TOL = 1e-10
RIGIDITY_TOL = 1e-8
ENERGY_COLUMNS = ("r", "E", "dE_numeric", "dE_identity", "untrapped", "monotone_ok",
                  "bound_ok", "rigidity_flag")

_FAMILY_RIGIDITY = {
    "minkowski": "minkowski",
    "schwarzschild_ts": "schwarzschild",
    "painleve_gullstrand": "schwarzschild",
}


@dataclass(frozen=True, eq=False)
class EnergyProfile:
    r: np.ndarray
    E: np.ndarray
    E_closed: np.ndarray
    dE_numeric: np.ndarray
    dE_identity: np.ndarray


def _dE_exact(prim):
    g, rho, rho_r, kb = prim["g11"], prim["rho"], prim["rho_r"], prim["kb"]
    sg = np.sqrt(g)
    P = rho_r / sg
    P_r = prim["rho_rr"] / sg - 0.5 * rho_r * prim["g11_r"] / g**1.5
    dE_dr = (0.5 * rho_r * (1.0 - P**2 + rho**2 * kb**2)
             + rho * (-P * P_r + rho * rho_r * kb**2 + rho**2 * kb * prim["kb_r"]))
    return dE_dr / sg


def misner_sharp(profile):
    """Energy of every sphere, its proper-radius derivative and the identity value."""
    data = profile.data
    prim = data.primitives()
    rho, kb = prim["rho"], prim["kb"]
    P = profile.rho_t
    with np.errstate(invalid="ignore"):
        E = 0.5 * rho * (1.0 - rho**2 * profile.thetaP * profile.thetaM / 4.0)
    E_closed = 0.5 * rho * (1.0 - P**2 + rho**2 * kb**2)
    if profile.has_center:
        E = E.copy()
        E[0] = 0.0
    if data.is_analytic:
        dE = _dE_exact(prim)
    else:
        dE = kernels.diff1(data.r, E_closed) / np.sqrt(prim["g11"])
    ident = 4.0 * math.pi * rho**2 * (profile.mu * P - profile.Jn * kb * rho)
    for a in (E, E_closed, dE, ident):
        a.setflags(write=False)
    return EnergyProfile(profile.r, E, E_closed, dE, ident)


def _identity_values(data):
    return misner_sharp(geometry_profile(data)).dE_identity


def dE_residual(data):
    en = misner_sharp(geometry_profile(data))
    return en.dE_numeric - en.dE_identity


def verify_dE_identity(data, refinements=3, analytic_tol=1e-8):
    """``dE/dt`` against the constraint identity; analytic residual and order study."""
    residual = max_abs(dE_residual(data)) if data.is_analytic else None
    table = study("dE", ladder(data, refinements), dE_residual) if refinements >= 2 else None
    return IdentityReport("dE", residual, analytic_tol if residual is not None else None, table)


@dataclass(frozen=True)
class IntervalVerdict:
    a: float
    b: float
    kind: str
    direction: str
    worst: float
    tol: float

    @property
    def ok(self):
        return self.worst >= -self.tol


@dataclass(frozen=True, eq=False)
class EnergyReport:
    energy: EnergyProfile
    dec_holds: bool
    untrapped: np.ndarray
    monotone_ok: np.ndarray
    intervals: tuple
    positivity_ok: bool | None
    outermost_root: float | None
    bound: float | None
    bound_ok: np.ndarray
    rigidity_flags: tuple
    rigidity: str | None
    rigidity_confirmed: bool | None

    @property
    def advisory(self):
        return not self.dec_holds

    @property
    def monotone_holds(self):
        return all(v.ok for v in self.intervals)

    @property
    def bound_holds(self):
        return bool(np.all(self.bound_ok[np.isfinite(self.bound_ok)] == 1.0))

    @property
    def holds(self):
        return self.monotone_holds and self.positivity_ok is not False and self.bound_holds

    def to_dict(self):
        return {
            "dec_holds": self.dec_holds,
            "advisory": self.advisory,
            "intervals": [{**v.__dict__, "ok": v.ok} for v in self.intervals],
            "positivity_ok": self.positivity_ok,
            "outermost_root": self.outermost_root,
            "bound": self.bound,
            "bound_holds": self.bound_holds,
            "rigidity": self.rigidity,
            "rigidity_confirmed": self.rigidity_confirmed,
            "holds": self.holds,
        }


def _untrapped_mask(profile, hscan):
    """Nodes with theta+ theta- > 0 (or the centre), minus one cell around each root."""
    prod = profile.thetaP * profile.thetaM
    mask = np.nan_to_num(prod, nan=0.0) > 0
    if profile.has_center:
        mask[0] = True
    r = profile.r
    for x in hscan.roots():
        i = int(np.searchsorted(r, x))
        mask[max(i - 1, 0):i + 1] = False
    return mask


def _runs(mask):
    out, start = [], None
    for i, m in enumerate(np.append(mask, False)):
        if m and start is None:
            start = i
        elif not m and start is not None:
            out.append((start, i - 1))
            start = None
    return out


def _rho_at(data, x):
    if data.is_analytic:
        return float(data.rho(np.array([x]))[0])
    return float(np.interp(x, data.r, data.sample("rho")))


def theorem3_check(profile, hscan=None, energy=None):
    """Positivity, monotonicity, the outermost-horizon bound and rigidity flags.

    Monotonicity is read off the sign of the identity value of ``dE/dt``
    on each untrapped run of nodes: nondecreasing when both expansions are
    positive, nonincreasing when both are negative.
    """
    data = profile.data
    hscan = hscan or scan(profile)
    energy = energy or misner_sharp(profile)
    E, ident, r = energy.E, energy.dE_identity, profile.r
    dec = dec_check(profile)
    mask = _untrapped_mask(profile, hscan)
    with np.errstate(divide="ignore", invalid="ignore"):
        e_over_rho = E / profile.rho
    # dE/dt is dimensionless; E/rho supplies a floor on vacuum data
    tol_mono = MONOTONE_TOL * max(max_abs(ident), max_abs(energy.dE_numeric), max_abs(e_over_rho))
    allowance = difference_error(data, _identity_values)
    monotone_ok = np.full(len(r), np.nan)
    intervals = []
    for i, j in _runs(mask):
        theta = profile.thetaP[i:j + 1]
        expanding = bool(np.nanmax(theta) > 0) if np.isfinite(theta).any() else True
        signed = (ident[i:j + 1] if expanding else -ident[i:j + 1]) + allowance[i:j + 1]
        monotone_ok[i:j + 1] = signed >= -tol_mono
        intervals.append(IntervalVerdict(float(r[i]), float(r[j]),
                                         "expanding" if expanding else "contracting",
                                         "nondecreasing" if expanding else "nonincreasing",
                                         float(np.min(signed)), tol_mono))
    e_tol = RIGIDITY_TOL * 0.5 * np.abs(profile.rho)
    positivity = None
    if profile.has_center:
        roots = hscan.roots()
        free = r < roots[0] if roots else np.ones(len(r), bool)
        positivity = bool(np.all(E[free] >= -MONOTONE_TOL * max(max_abs(E), 1.0 / r[-1])))
    r0 = hscan.outermost
    bound = None
    bound_ok = np.full(len(r), np.nan)
    flags = ["minkowski" if abs(E[i]) <= e_tol[i] else "" for i in range(len(r))]
    if r0 is not None:
        bound = 0.5 * _rho_at(data, r0)
        beyond = r > r0
        tol_b = MONOTONE_TOL * max(max_abs(E[beyond]), bound)
        bound_ok[beyond] = E[beyond] >= bound - tol_b
        for i in np.flatnonzero(beyond):
            if abs(E[i] - bound) <= RIGIDITY_TOL * bound:
                flags[i] = "schwarzschild"
    rigidity = None
    if all(f == "minkowski" for f in flags):
        rigidity = "minkowski"
    elif any(f == "schwarzschild" for f in flags):
        rigidity = "schwarzschild"
    elif r0 is None and not profile.has_center and E.min() > 0 and \
            np.ptp(E) <= RIGIDITY_TOL * E.max():
        # vacuum annulus outside the horizon with constant positive energy
        rigidity = "schwarzschild"
        flags = ["schwarzschild"] * len(r)
    confirmed = None
    if rigidity is not None and data.family is not None:
        confirmed = _FAMILY_RIGIDITY.get(data.family.name) == rigidity
    return EnergyReport(
        energy=energy, dec_holds=dec.holds, untrapped=mask, monotone_ok=monotone_ok,
        intervals=tuple(intervals), positivity_ok=positivity, outermost_root=r0, bound=bound,
        bound_ok=bound_ok, rigidity_flags=tuple(flags), rigidity=rigidity,
        rigidity_confirmed=confirmed,
    )


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, str):
        return x
    return "" if not np.isfinite(x) else format(float(x), ".17g")


def write_energy_csv(report, path):
    en = report.energy
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ENERGY_COLUMNS)
        for i in range(len(en.r)):
            mono = report.monotone_ok[i]
            bok = report.bound_ok[i]
            w.writerow([
                _cell(en.r[i]), _cell(en.E[i]), _cell(en.dE_numeric[i]), _cell(en.dE_identity[i]),
                _cell(bool(report.untrapped[i])),
                "" if np.isnan(mono) else _cell(bool(mono)),
                "" if np.isnan(bok) else _cell(bool(bok)),
                report.rigidity_flags[i],
            ])
