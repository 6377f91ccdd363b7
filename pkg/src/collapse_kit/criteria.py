"""Sufficient conditions for trapped surfaces in centred balls.

``trapped_surface_criterion`` evaluates, for every ball ``B_r``,

    min_{B_r}(mu -+ Jn) + (3/32pi) theta+ theta-(r)  >  (3/2) Rad(B_r) / Vol(B_r)

(upper sign: future, lower sign: past). ``malec_omurchadha_criterion`` is the
older maximal-slice condition ``4pi int (mu -+ Jn) rho^2 > Rad(B_r)``.
Both are checked against a horizon scan: a firing row whose ball holds no
horizon and no trapped sphere would contradict the theorem.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .geometry import _cumulative, dec_check, evaluate_at, geometry_profile
from .horizon import contains_horizon, scan
from .radial_data import FamilySpec, build_family

MODES = ("future", "past")
CRITERION_COLUMNS = ("r", "lhs_matter", "lhs_bending", "rhs", "margin", "fires", "horizon_in_ball")


class CriterionError(ValueError):
    pass


def _check_mode(mode):
    if mode not in MODES:
        raise CriterionError(f"mode must be 'future' or 'past', got {mode!r}")


def _density(profile, mode):
    return profile.mu - profile.Jn if mode == "future" else profile.mu + profile.Jn


def horizon_in_ball(profile, hscan, mode):
    """Per node: a horizon root or a trapped sphere of the given kind in B_r."""
    theta = profile.thetaP if mode == "future" else profile.thetaM
    trapped = np.maximum.accumulate(np.nan_to_num(theta, nan=1.0) < 0)
    roots = np.array([contains_horizon(hscan, x) for x in profile.r])
    return roots | trapped


@dataclass(frozen=True, eq=False)
class CriterionReport:
    mode: str
    r: np.ndarray
    lhs_matter: np.ndarray
    lhs_bending: np.ndarray
    rhs: np.ndarray
    margin: np.ndarray
    fires: np.ndarray
    horizon_in_ball: np.ndarray
    dec_holds: bool
    label: str = ""

    @property
    def lhs(self):
        return self.lhs_matter + self.lhs_bending

    @property
    def first_firing_radius(self):
        i = np.flatnonzero(self.fires)
        return float(self.r[i[0]]) if i.size else None

    @property
    def violations(self):
        return np.flatnonzero(self.fires & ~self.horizon_in_ball)

    @property
    def consistency(self):
        return "violated" if self.violations.size else "ok"

    def row_at(self, r, tol=1e-12):
        i = int(np.argmin(np.abs(self.r - r)))
        if abs(self.r[i] - r) > tol * max(1.0, abs(r)):
            raise KeyError(f"no grid node at r={r} (nearest {self.r[i]})")
        return {c: getattr(self, c)[i].item() for c in CRITERION_COLUMNS}


def trapped_surface_criterion(profile, mode="future", hscan=None):
    """Evaluate the ball criterion at every grid radius r > 0.

    The minimum over ``B_r`` is the running minimum over grid nodes, including
    the centre limit of ``mu -+ Jn``. Margins of exactly zero do not fire.
    """
    _check_mode(mode)
    if profile.data.domain != "ball":
        raise CriterionError("the trapped-surface criterion needs a ball domain (centred balls B_r)")
    if hscan is None:
        hscan = scan(profile)
    matter = kernels.running_min(_density(profile, mode))
    bending = 3.0 / (32.0 * math.pi) * profile.thetaP * profile.thetaM
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = 1.5 * profile.Rad / profile.Vol
    margin = matter + bending - rhs
    sl = slice(1, None)
    fires = margin[sl] > 0
    return CriterionReport(
        mode=mode,
        r=profile.r[sl],
        lhs_matter=matter[sl],
        lhs_bending=bending[sl],
        rhs=rhs[sl],
        margin=margin[sl],
        fires=fires,
        horizon_in_ball=horizon_in_ball(profile, hscan, mode)[sl],
        dec_holds=dec_check(profile).holds,
        label=profile.data.label,
    )


@dataclass(frozen=True, eq=False)
class MOReport:
    mode: str
    r: np.ndarray
    lhs: np.ndarray
    lhs_coordinate: np.ndarray
    rhs: np.ndarray
    fires: np.ndarray
    fires_coordinate: np.ndarray
    measures_differ: bool
    maximal: bool
    max_trace: float
    horizon_in_ball: np.ndarray

    @property
    def banner(self):
        return "" if self.maximal else "hypothesis violated: data not maximal (|Tr_g k| above tolerance)"

    @property
    def violations(self):
        return np.flatnonzero(self.fires & ~self.horizon_in_ball)


def malec_omurchadha_criterion(profile, mode="future", tol_max=None, hscan=None):
    """Maximal-slice criterion with both the proper and coordinate measure."""
    _check_mode(mode)
    data = profile.data
    if data.domain != "ball":
        raise CriterionError("the Malec-O'Murchadha criterion needs a ball domain")
    if hscan is None:
        hscan = scan(profile)
    knorm = float(np.max(np.sqrt(profile.kNormSq)))
    if tol_max is None:
        tol_max = 1e-8 * knorm
    max_trace = float(np.max(np.abs(profile.TrGk)))
    sign = -1.0 if mode == "future" else 1.0
    dens = _density(profile, mode)
    rho = data.sample("rho")
    sg = np.sqrt(data.sample("g11"))

    def proper(x):
        q = evaluate_at(data, x)
        return 4.0 * math.pi * (q["mu"] + sign * q["Jn"]) * data.rho(x) ** 2 * np.sqrt(data.g11(x))

    def coordinate(x):
        q = evaluate_at(data, x)
        return 4.0 * math.pi * (q["mu"] + sign * q["Jn"]) * data.rho(x) ** 2

    lhs = _cumulative(data, proper, 4.0 * math.pi * dens * rho**2 * sg)
    lhs_c = _cumulative(data, coordinate, 4.0 * math.pi * dens * rho**2)
    rhs = profile.Rad
    sl = slice(1, None)
    differ = bool(np.any(np.abs(lhs - lhs_c) > 1e-3 * np.abs(lhs)))
    return MOReport(
        mode=mode,
        r=profile.r[sl],
        lhs=lhs[sl],
        lhs_coordinate=lhs_c[sl],
        rhs=rhs[sl],
        fires=lhs[sl] > rhs[sl],
        fires_coordinate=lhs_c[sl] > rhs[sl],
        measures_differ=differ,
        maximal=max_trace <= tol_max,
        max_trace=max_trace,
        horizon_in_ball=horizon_in_ball(profile, hscan, mode)[sl],
    )


def firing_threshold(r, lhs, rhs):
    """First radius where ``lhs - rhs`` turns positive (linear in the cell)."""
    d = np.asarray(lhs) - np.asarray(rhs)
    i = np.flatnonzero(d > 0)
    if not i.size:
        return None
    i = int(i[0])
    if i == 0:
        return float(r[0])
    return float(r[i - 1] - d[i - 1] * (r[i] - r[i - 1]) / (d[i] - d[i - 1]))


def write_criterion_csv(reports, path):
    """CSV of one or more reports; a ``mode`` column is added for several."""
    many = len(reports) > 1
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow((("mode",) if many else ()) + CRITERION_COLUMNS)
        for rep in reports:
            for i in range(len(rep.r)):
                row = [format(float(getattr(rep, c)[i]), ".17g") for c in CRITERION_COLUMNS[:5]]
                row += [str(bool(rep.fires[i])).lower(), str(bool(rep.horizon_in_ball[i])).lower()]
                w.writerow(([rep.mode] if many else []) + row)


# --------------------------------------------------------------------------
# soundness sweep
# --------------------------------------------------------------------------

DEFAULT_SWEEP = {
    "seed": 20091021,
    "trials": 200,
    "n": 129,
    "families": {
        # compactness = (8pi/3) mu0 r_star^2; grid extends to rmax_factor * r_star
        "constant_density_star": {"compactness": [0.05, 0.95], "r_star": [0.5, 5.0],
                                  "rmax_factor": [1.0, 3.0]},
        # beta = beta_frac * (3/2) k0 scale keeps the dominant energy condition
        "uniform_collapse": {"k0": [0.5, 6.0], "beta_frac": [0.0, 1.0], "scale": [0.5, 2.0],
                             "rmax_factor": [0.5, 2.0]},
    },
}


def threads():
    """Worker count from COLLAPSE_KIT_THREADS (default: CPU count)."""
    env = os.environ.get("COLLAPSE_KIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _draw(family, ranges, rng, n):
    def u(key):
        lo, hi = ranges[key]
        return float(rng.uniform(lo, hi))

    if family == "constant_density_star":
        comp, r_star = u("compactness"), u("r_star")
        mu0 = 3.0 * comp / (8.0 * math.pi * r_star**2)
        return FamilySpec(family, {"mu0": mu0, "r_star": r_star}, n=n, r_min=0.0,
                          r_max=u("rmax_factor") * r_star)
    if family == "uniform_collapse":
        k0, scale = u("k0"), u("scale")
        beta = u("beta_frac") * 1.5 * k0 * scale
        return FamilySpec(family, {"k0": k0, "beta": beta, "scale": scale}, n=n, r_min=0.0,
                          r_max=u("rmax_factor") * scale)
    if family == "gaussian_blob":
        return FamilySpec(family, {"amplitude": u("amplitude"), "width": u("width")}, n=n,
                          r_min=0.0, r_max=u("rmax_factor") * ranges["width"][1])
    raise CriterionError(f"sweep does not support family {family!r}")


@dataclass
class TrialResult:
    index: int
    family: str
    params: dict
    discarded: int
    fired_rows: int
    violations: int
    max_margin_unfired: float
    min_margin_fired: float | None


def _run_trial(index, seed_seq, families, config):
    rng = np.random.default_rng(seed_seq)
    names = sorted(families)
    discarded = 0
    for _ in range(100):
        family = names[int(rng.integers(len(names)))]
        spec = _draw(family, families[family], rng, config["n"])
        data = build_family(spec)
        prof = geometry_profile(data)
        if dec_check(prof).holds:
            break
        discarded += 1
    else:
        raise CriterionError(f"trial {index}: no DEC-satisfying draw in 100 attempts")
    hs = scan(prof)
    fired = viol = 0
    unfired, fired_margins = [], []
    for mode in MODES:
        rep = trapped_surface_criterion(prof, mode, hs)
        fired += int(rep.fires.sum())
        viol += int(rep.violations.size)
        m = rep.margin[np.isfinite(rep.margin)]
        f = rep.fires[np.isfinite(rep.margin)]
        unfired.extend(m[~f].tolist())
        fired_margins.extend(m[f].tolist())
    return TrialResult(
        index=index,
        family=spec.name,
        params=dict(spec.params),
        discarded=discarded,
        fired_rows=fired,
        violations=viol,
        max_margin_unfired=max(unfired) if unfired else float("-inf"),
        min_margin_fired=min(fired_margins) if fired_margins else None,
    )


@dataclass
class SweepSummary:
    seed: int
    trials: int
    discarded: int
    fired_rows: int
    violations: int
    per_family: dict
    near_miss: float
    results: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "seed": self.seed, "trials": self.trials, "discarded": self.discarded,
            "fired_rows": self.fired_rows, "violations": self.violations,
            "per_family": self.per_family, "near_miss_margin": self.near_miss,
        }


def soundness_sweep(config=None, trials=None, seed=None, workers=None):
    """Random DEC-satisfying draws; counts rows that fire without a horizon.

    Trial ``i`` draws from its own child of ``SeedSequence(seed)``, so the
    summary does not depend on the number of worker threads.
    """
    cfg = {**DEFAULT_SWEEP, **(config or {})}
    if trials is not None:
        cfg["trials"] = int(trials)
    if seed is not None:
        cfg["seed"] = int(seed)
    families = cfg["families"]
    children = np.random.SeedSequence(cfg["seed"]).spawn(cfg["trials"])
    workers = workers or threads()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda i: _run_trial(i, children[i], families, cfg),
                                range(cfg["trials"])))
    per_family = {}
    for res in results:
        d = per_family.setdefault(res.family, {"trials": 0, "fired_rows": 0, "violations": 0})
        d["trials"] += 1
        d["fired_rows"] += res.fired_rows
        d["violations"] += res.violations
    return SweepSummary(
        seed=cfg["seed"],
        trials=cfg["trials"],
        discarded=sum(r.discarded for r in results),
        fired_rows=sum(r.fired_rows for r in results),
        violations=sum(r.violations for r in results),
        per_family=per_family,
        near_miss=max(r.max_margin_unfired for r in results),
        results=results,
    )
