"""Apparent-horizon location: roots of the null expansions on the grid."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .geometry import evaluate_at


@dataclass(frozen=True)
class Root:
    r: float
    bracket: tuple
    slope: int
    refined: bool


@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    kind: str

    def as_list(self):
        return [self.a, self.b]


@dataclass(frozen=True)
class HorizonScan:
    r_inner: float
    r_outer: float
    future_roots: list = field(default_factory=list)
    past_roots: list = field(default_factory=list)
    untrapped_intervals: list = field(default_factory=list)
    trapped_intervals: list = field(default_factory=list)
    degenerate: list = field(default_factory=list)

    @property
    def outermost_future(self):
        return max((x.r for x in self.future_roots), default=None)

    @property
    def outermost_past(self):
        return max((x.r for x in self.past_roots), default=None)

    @property
    def outermost(self):
        radii = [x for x in (self.outermost_future, self.outermost_past) if x is not None]
        return max(radii, default=None)

    @property
    def horizon_free(self):
        return not self.future_roots and not self.past_roots

    def roots(self):
        return sorted(x.r for x in self.future_roots + self.past_roots)

    def to_dict(self):
        def root(x):
            return {"r": x.r, "bracket": list(x.bracket), "slope": x.slope, "refined": x.refined}

        return {
            "future_roots": [root(x) for x in self.future_roots],
            "past_roots": [root(x) for x in self.past_roots],
            "outermost": {"future": self.outermost_future, "past": self.outermost_past},
            "untrapped": [x.as_list() for x in self.untrapped_intervals],
            "untrapped_kind": [x.kind for x in self.untrapped_intervals],
            "trapped": [x.as_list() for x in self.trapped_intervals],
            "trapped_kind": [x.kind for x in self.trapped_intervals],
            "degenerate": [{"expansion": w, "r": r} for w, r in self.degenerate],
        }


def _cubic_root(r, theta, idx, j):
    """Zero inside cell ``idx[j], idx[j+1]`` of the cubic through four finite nodes."""
    lo = min(max(j - 1, 0), max(len(idx) - 4, 0))
    nodes = idx[lo:lo + 4]
    i, k = idx[j], idx[j + 1]
    if len(nodes) < 4:
        return float(r[i] - theta[i] * (r[k] - r[i]) / (theta[k] - theta[i]))
    xs, ys = r[nodes], theta[nodes]

    def p(x):
        total = 0.0
        for a in range(4):
            w = 1.0
            for b in range(4):
                if b != a:
                    w *= (x - xs[b]) / (xs[a] - xs[b])
            total += w * ys[a]
        return total

    return brentq(p, r[i], r[k], xtol=1e-15, rtol=1e-15)


def _roots(profile, which, analytic):
    r = profile.r
    theta = getattr(profile, which)
    finite = np.isfinite(theta)
    idx = np.flatnonzero(finite)
    roots, degenerate = [], []
    scale = np.nanmax(np.abs(theta)) if idx.size else 1.0
    data = profile.data

    def fn(x):
        return float(evaluate_at(data, x)[which][0])

    for j in range(len(idx) - 1):
        i, k = idx[j], idx[j + 1]
        a, b = theta[i], theta[k]
        if a == 0.0:
            prev = theta[idx[j - 1]] if j > 0 else np.nan
            if prev * b < 0:
                roots.append(Root(float(r[i]), (float(r[i]), float(r[i])), int(np.sign(b)), True))
            elif j > 0:
                degenerate.append((which, float(r[i])))
            continue
        if a * b < 0:
            if analytic:
                x = brentq(fn, r[i], r[k], xtol=1e-14, rtol=1e-13)
                refined = True
            else:
                x = _cubic_root(r, theta, idx, j)
                refined = False
            roots.append(Root(float(x), (float(r[i]), float(r[k])), int(np.sign(b - a)), refined))
        elif b != 0.0 and j > 0:
            prev = theta[idx[j - 1]]
            if abs(a) <= 1e-12 * scale and prev * b > 0 and abs(a) < abs(prev) and abs(a) < abs(b):
                degenerate.append((which, float(r[i])))
    return roots, degenerate


def _classify(profile):
    tp, tm = profile.thetaP, profile.thetaM
    out = []
    for i in range(len(profile.r)):
        a, b = tp[i], tm[i]
        if not (np.isfinite(a) and np.isfinite(b)):
            # ball centre: H -> +infinity dominates
            out.append(("untrapped", "expanding") if i == 0 and profile.has_center else None)
        elif a * b > 0:
            out.append(("untrapped", "expanding" if a > 0 else "contracting"))
        elif a * b < 0:
            out.append(("trapped", "future" if a < 0 else "past"))
        else:
            out.append(None)
    return out


def scan(profile):
    """Locate every sign change of theta+ and theta- and split the domain.

    Roots of analytic data are refined with Brent's method; tabulated roots
    are zeros of the cubic through the four nodes around the bracketing cell. Untrapped
    intervals are maximal node runs with theta+ theta- > 0 (tagged
    ``expanding`` or ``contracting``), trapped ones have theta+ theta- < 0
    (tagged ``future`` or ``past``).
    """
    analytic = profile.data.is_analytic
    fut, deg_f = _roots(profile, "thetaP", analytic)
    past, deg_p = _roots(profile, "thetaM", analytic)
    classes = _classify(profile)
    r = profile.r
    untrapped, trapped = [], []
    start = 0
    for i in range(1, len(r) + 1):
        if i == len(r) or classes[i] != classes[start]:
            c = classes[start]
            if c is not None:
                iv = Interval(float(r[start]), float(r[i - 1]), c[1])
                (untrapped if c[0] == "untrapped" else trapped).append(iv)
            start = i
    return HorizonScan(
        r_inner=float(r[0]),
        r_outer=float(r[-1]),
        future_roots=fut,
        past_roots=past,
        untrapped_intervals=untrapped,
        trapped_intervals=trapped,
        degenerate=deg_f + deg_p,
    )


def contains_horizon(hscan, r):
    """True iff a root of theta+ or theta- lies in (inner boundary, r]."""
    if not hscan.r_inner <= r <= hscan.r_outer:
        raise ValueError(f"r={r} outside domain [{hscan.r_inner}, {hscan.r_outer}]")
    return any(hscan.r_inner < x <= r for x in hscan.roots())


def write_scan_json(hscan, path):
    with open(path, "w") as fh:
        json.dump(hscan.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
