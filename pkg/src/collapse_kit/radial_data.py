"""Spherically symmetric initial data: grids, field providers, exact families, I/O.

An initial data set is a radial grid plus four profiles: the radial metric
component ``g11``, the areal radius ``rho`` and the two eigenvalues ``ka``
(radial) and ``kb`` (tangential) of the extrinsic curvature. Profiles are
either analytic (value and two exact derivatives) or tabulated on the grid.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import gammainc

from . import kernels

SCHEMA = "collapse-kit/v1"
FIELDS = ("g11", "rho", "ka", "kb")
UNITS = {"g11": "dimensionless", "rho": "length", "ka": "1/length", "kb": "1/length"}
MIN_POINTS = 16
ANALYTIC_CENTER_TOL = 1e-8


class DataError(ValueError):
    """Raised for malformed grids, files or family specifications."""


# --------------------------------------------------------------------------
# grid and providers
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RadialGrid:
    r: np.ndarray
    domain: str

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        if self.domain not in ("ball", "annulus"):
            raise DataError(f"domain must be 'ball' or 'annulus', got {self.domain!r}")
        check_grid(r, self.domain)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    def __len__(self):
        return len(self.r)

    @property
    def uniform(self):
        d = np.diff(self.r)
        return bool(np.all(np.abs(d - d[0]) <= 1e-12 * d[0] * len(d)))

    @property
    def spacing(self):
        return float(np.max(np.diff(self.r)))


def check_grid(r, domain):
    if r.ndim != 1:
        raise DataError("grid must be one-dimensional")
    bad = np.flatnonzero(~np.isfinite(r))
    if bad.size:
        raise DataError(f"grid has non-finite entry at index {bad[0]}")
    steps = np.flatnonzero(np.diff(r) <= 0)
    if steps.size:
        raise DataError(f"grid not strictly increasing at index {steps[0] + 1}")
    if len(r) < MIN_POINTS:
        raise DataError(f"grid needs at least {MIN_POINTS} samples, got {len(r)}")
    if domain == "ball" and r[0] != 0.0:
        raise DataError(f"ball domain must start at r=0, got r[0]={r[0]!r}")
    if domain == "annulus" and not r[0] > 0.0:
        raise DataError(f"annulus domain needs r_min > 0, got r[0]={r[0]!r}")


def make_grid(domain, n, r_min, r_max, spacing="uniform", stretch=1.01):
    """Build a grid; geometric spacing grows each cell by ``stretch``."""
    if n < MIN_POINTS:
        raise DataError(f"grid needs at least {MIN_POINTS} samples, got {n}")
    if not r_max > r_min:
        raise DataError(f"r_max must exceed r_min ({r_max} <= {r_min})")
    if spacing == "uniform":
        r = np.linspace(r_min, r_max, n)
    elif spacing == "geometric":
        if not stretch > 1.0:
            raise DataError("geometric spacing needs stretch > 1")
        q = stretch ** np.arange(n)
        r = r_min + (r_max - r_min) * (q - 1.0) / (q[-1] - 1.0)
        r[-1] = r_max
    else:
        raise DataError(f"unknown spacing {spacing!r}")
    return RadialGrid(r, domain)


@dataclass(frozen=True, eq=False)
class AnalyticField:
    """Closed-form profile; ``d1``/``d2`` are the exact r-derivatives."""

    f: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]
    units: str = "dimensionless"

    kind = "analytic"

    def __call__(self, r, order=0):
        fn = (self.f, self.d1, self.d2)[order]
        r = np.asarray(r, dtype=float)
        return np.broadcast_to(np.asarray(fn(r), dtype=float), r.shape).copy()


@dataclass(frozen=True, eq=False)
class TabulatedField:
    samples: np.ndarray
    units: str = "dimensionless"

    kind = "tabulated"

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


def _const(c):
    return AnalyticField(
        lambda r: np.full_like(r, c), lambda r: np.zeros_like(r), lambda r: np.zeros_like(r)
    )


def _identity():
    return AnalyticField(lambda r: r.copy(), lambda r: np.ones_like(r), lambda r: np.zeros_like(r), "length")


# --------------------------------------------------------------------------
# initial data
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InitialData:
    grid: RadialGrid
    g11: AnalyticField | TabulatedField
    rho: AnalyticField | TabulatedField
    ka: AnalyticField | TabulatedField
    kb: AnalyticField | TabulatedField
    label: str = ""
    family: FamilySpec | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        kinds = {self.field(name).kind for name in FIELDS}
        if len(kinds) != 1:
            raise DataError("fields must be all analytic or all tabulated")
        if self.is_tabulated:
            for name in FIELDS:
                s = self.field(name).samples
                if s.shape != self.grid.r.shape:
                    raise DataError(
                        f"field {name!r} has {s.size} samples for {len(self.grid)} grid points"
                    )

    @property
    def r(self):
        return self.grid.r

    @property
    def domain(self):
        return self.grid.domain

    @property
    def is_tabulated(self):
        return self.g11.kind == "tabulated"

    @property
    def is_analytic(self):
        return not self.is_tabulated

    def field(self, name):
        if name not in FIELDS:
            raise KeyError(name)
        return getattr(self, name)

    def sample(self, name, order=0):
        """Nodal samples of a field or of its first/second r-derivative."""
        key = (name, order)
        if key not in self._cache:
            fld = self.field(name)
            if fld.kind == "analytic":
                out = fld(self.r, order)
            elif order == 0:
                out = fld.samples.copy()
            else:
                out = _fd(self.r, fld.samples, order)
            out.setflags(write=False)
            self._cache[key] = out
        return self._cache[key]

    def primitives(self, r=None):
        """Fields and derivatives needed by every geometric formula.

        ``r`` may be given only for analytic data; default is the grid.
        """
        if r is None:
            return {
                "r": self.r,
                "g11": self.sample("g11"),
                "g11_r": self.sample("g11", 1),
                "rho": self.sample("rho"),
                "rho_r": self.sample("rho", 1),
                "rho_rr": self.sample("rho", 2),
                "ka": self.sample("ka"),
                "kb": self.sample("kb"),
                "kb_r": self.sample("kb", 1),
            }
        if self.is_tabulated:
            raise DataError("tabulated data can only be evaluated on its grid")
        r = np.asarray(r, dtype=float)
        return {
            "r": r,
            "g11": self.g11(r),
            "g11_r": self.g11(r, 1),
            "rho": self.rho(r),
            "rho_r": self.rho(r, 1),
            "rho_rr": self.rho(r, 2),
            "ka": self.ka(r),
            "kb": self.kb(r),
            "kb_r": self.kb(r, 1),
        }

    def with_k(self, ka, kb, label=None):
        """Copy with replaced extrinsic-curvature providers."""
        return InitialData(self.grid, self.g11, self.rho, ka, kb, label or self.label, None)


def _fd(x, y, order):
    if order == 1:
        if len(x) < 3:
            raise DataError("first derivative needs at least 3 grid points")
        return kernels.diff1(x, y)
    if order == 2:
        if len(x) < 4:
            raise DataError("second derivative needs at least 4 grid points")
        return kernels.diff2(x, y)
    raise DataError(f"derivative order must be 1 or 2, got {order}")


def derivative(data, fld, order=1):
    """Derivative of a named field (exact when analytic) or of derived samples.

    ``fld`` is one of ``g11, rho, ka, kb`` or an array / TabulatedField of
    nodal samples on ``data``'s grid.
    """
    if order not in (1, 2):
        raise DataError(f"derivative order must be 1 or 2, got {order}")
    if isinstance(fld, str):
        units = UNITS[fld]
        if len(data.r) < order + 2:
            raise DataError(f"order-{order} derivative needs at least {order + 2} points")
        out = data.sample(fld, order)
    else:
        samples = fld.samples if isinstance(fld, TabulatedField) else np.asarray(fld, float)
        units = getattr(fld, "units", "derived")
        out = _fd(data.r, samples, order)
    return TabulatedField(out, units)


def tabulate(data):
    """Tabulated copy of ``data`` (samples on its own grid)."""
    if data.is_tabulated:
        return data
    return InitialData(
        data.grid,
        *(TabulatedField(data.sample(name), UNITS[name]) for name in FIELDS),
        label=data.label,
        family=data.family,
    )


def refine(data, factor):
    """Insert ``factor - 1`` equally spaced nodes into every cell.

    Analytic providers are re-sampled exactly. Tabulated samples go through a
    quintic interpolating spline so the interpolation error (fifth order)
    stays below the second-order differentiation error being studied.
    """
    factor = int(factor)
    if factor < 2:
        raise DataError(f"refinement factor must be >= 2, got {factor}")
    r = data.r
    t = np.arange(factor) / factor
    fine = np.concatenate([(r[:-1, None] + np.diff(r)[:, None] * t[None, :]).ravel(), r[-1:]])
    fine[::factor] = r
    grid = RadialGrid(fine, data.domain)
    if data.is_analytic:
        return InitialData(grid, data.g11, data.rho, data.ka, data.kb, data.label, data.family)
    fields = []
    for name in FIELDS:
        s = data.field(name).samples
        vals = make_interp_spline(r, s, k=5)(fine)
        vals[::factor] = s
        fields.append(TabulatedField(vals, UNITS[name]))
    return InitialData(grid, *fields, label=data.label, family=data.family)


def subsample(data):
    """Tabulated copy keeping every other node (the last node is always kept)."""
    idx = np.arange(0, len(data.r), 2)
    if idx[-1] != len(data.r) - 1:
        idx = np.append(idx, len(data.r) - 1)
    grid = RadialGrid(data.r[idx], data.domain)
    fields = (TabulatedField(data.sample(name)[idx], UNITS[name]) for name in FIELDS)
    return InitialData(grid, *fields, label=data.label)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    check: str
    index: int | None
    r: float | None
    residual: float
    message: str

    def __str__(self):
        return self.message


def validate(data):
    """List every violated invariant of ``data``; empty when all hold."""
    out = []
    r = data.r
    try:
        check_grid(r, data.domain)
    except DataError as exc:
        out.append(Violation("grid", None, None, float("nan"), str(exc)))
        return out
    samples = {}
    for name in FIELDS:
        s = np.asarray(data.sample(name))
        bad = np.flatnonzero(~np.isfinite(s))
        if bad.size:
            i = int(bad[0])
            out.append(Violation("finite", i, float(r[i]), float("nan"),
                                 f"{name} not finite at index {i} (r={r[i]:.6g})"))
        samples[name] = s
    for name in ("g11", "rho"):
        s = samples[name]
        mask = (r > 0) if name == "rho" else np.ones_like(r, dtype=bool)
        bad = np.flatnonzero(mask & ~(s > 0))
        if bad.size:
            i = int(bad[0])
            out.append(Violation("positive", i, float(r[i]), float(s[i]),
                                 f"{name} not positive at index {i} (r={r[i]:.6g}, {name}={s[i]:.6g})"))
    if data.domain == "ball":
        if data.is_analytic:
            tol = ANALYTIC_CENTER_TOL
        else:
            tol = 10.0 * (r[1] - r[0]) ** 2
        center = (
            ("rho(0)", samples["rho"][0], 0.0),
            ("rho_r(0)", data.sample("rho", 1)[0], 1.0),
            ("g11(0)", samples["g11"][0], 1.0),
        )
        for label, value, want in center:
            if not abs(value - want) <= tol:
                out.append(Violation("center", 0, 0.0, float(value - want),
                                     f"center: {label}={value:.6g} != {want:g}"))
    return out


# --------------------------------------------------------------------------
# exact families
# --------------------------------------------------------------------------

FAMILY_ALIASES = {
    "pg": "painleve_gullstrand",
    "schwarzschild": "schwarzschild_ts",
    "star": "constant_density_star",
    "blob": "gaussian_blob",
}

FAMILY_DEFAULTS = {
    "minkowski": ({}, ("ball", 0.0, 2.0)),
    "schwarzschild_ts": ({"mass": 1.0}, ("annulus", 2.5, 10.0)),
    "painleve_gullstrand": ({"mass": 1.0}, ("annulus", 0.5, 10.0)),
    "constant_density_star": ({"mu0": 3.0 / (800.0 * math.pi), "r_star": 5.0}, ("ball", 0.0, 10.0)),
    "uniform_collapse": ({"k0": 2.0, "beta": 2.9, "scale": 1.0}, ("ball", 0.0, 1.0)),
    "gaussian_blob": ({"amplitude": 0.2, "width": 1.0}, ("ball", 0.0, 6.0)),
}


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)
    domain: str | None = None
    n: int = 257
    r_min: float | None = None
    r_max: float | None = None
    spacing: str = "uniform"
    stretch: float = 1.01

    def __post_init__(self):
        name = FAMILY_ALIASES.get(self.name, self.name)
        if name not in FAMILY_DEFAULTS:
            raise DataError(f"unknown family {self.name!r}; choose from {sorted(FAMILY_DEFAULTS)}")
        defaults, (dom, lo, hi) = FAMILY_DEFAULTS[name]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise DataError(f"family {name} has no parameter(s) {sorted(unknown)}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", {**defaults, **{k: float(v) for k, v in self.params.items()}})
        r_min = lo if self.r_min is None else float(self.r_min)
        if self.domain is None:
            object.__setattr__(self, "domain", "ball" if r_min == 0.0 else "annulus")
        object.__setattr__(self, "r_min", r_min)
        object.__setattr__(self, "r_max", hi if self.r_max is None else float(self.r_max))

    def to_dict(self):
        return {
            "name": self.name, "params": dict(self.params), "domain": self.domain, "n": self.n,
            "r_min": self.r_min, "r_max": self.r_max, "spacing": self.spacing, "stretch": self.stretch,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def with_n(self, n):
        return replace(self, n=int(n))


def _positive(spec, *names):
    for name in names:
        if not spec.params[name] > 0:
            raise DataError(f"{spec.name}: parameter {name} must be positive, got {spec.params[name]}")


def _schwarzschild_g11(m):
    def f(r):
        return 1.0 / (1.0 - 2.0 * m / r)

    def d1(r):
        return -2.0 * m / r**2 * f(r) ** 2

    def d2(r):
        g = f(r)
        return 4.0 * m * g**2 / r**3 + 8.0 * m**2 * g**3 / r**4

    return AnalyticField(f, d1, d2)


def _star_g11(c, r_star):
    mass = 0.5 * c * r_star**3

    def pieces(r):
        inside = r <= r_star
        ro = np.where(inside, r_star, r)
        ri = np.where(inside, r, 0.0)
        gi = 1.0 / (1.0 - c * ri**2)
        go = 1.0 / (1.0 - 2.0 * mass / ro)
        return inside, ro, ri, gi, go

    def f(r):
        inside, _, _, gi, go = pieces(r)
        return np.where(inside, gi, go)

    def d1(r):
        inside, ro, ri, gi, go = pieces(r)
        return np.where(inside, 2.0 * c * ri * gi**2, -2.0 * mass / ro**2 * go**2)

    def d2(r):
        inside, ro, ri, gi, go = pieces(r)
        di = 2.0 * c * gi**2 + 8.0 * c**2 * ri**2 * gi**3
        do = 4.0 * mass * go**2 / ro**3 + 8.0 * mass**2 * go**3 / ro**4
        return np.where(inside, di, do)

    return AnalyticField(f, d1, d2)


class _GaussianMass:
    """Enclosed mass of a Gaussian density with total mass ``amp``.

    ``q(r) = m(r)/r^3`` is computed from the regularized incomplete gamma
    function, with its Taylor series near the centre.
    """

    def __init__(self, amp, width):
        self.amp = amp
        self.w = width
        self.mu_c = amp / (math.pi**1.5 * width**3)

    def mu(self, r):
        return self.mu_c * np.exp(-((r / self.w) ** 2))

    def q(self, r):
        x = r / self.w
        small = x < 1e-3
        xs = np.where(small, 1.0, x)
        full = self.amp * gammainc(1.5, xs**2) / np.where(small, 1.0, r) ** 3
        x2 = x**2
        series = (4.0 * math.pi / 3.0) * self.mu_c * (1.0 - 0.6 * x2 + (3.0 / 14.0) * x2**2)
        return np.where(small, series, full)


def _blob_g11(mass):
    def f(r):
        return 1.0 / (1.0 - 2.0 * mass.q(r) * r**2)

    def d1(r):
        return 2.0 * r * f(r) ** 2 * (4.0 * math.pi * mass.mu(r) - mass.q(r))

    def d2(r):
        g = f(r)
        g1 = d1(r)
        fmu = 4.0 * math.pi * mass.mu(r)
        q = mass.q(r)
        return (
            2.0 * g**2 * (fmu - q)
            + 4.0 * r * g * g1 * (fmu - q)
            - 2.0 * g**2 * (fmu - 3.0 * q)
            - 4.0 * fmu * r**2 * g**2 / mass.w**2
        )

    return AnalyticField(f, d1, d2)


def build_family(spec):
    """Analytic initial data for one of the built-in closed-form families."""
    if isinstance(spec, str):
        spec = FamilySpec(spec)
    p = spec.params
    name = spec.name
    if spec.domain == "ball" and spec.r_min != 0.0:
        raise DataError(f"ball domain must start at r_min=0, got r_min={spec.r_min}")
    if spec.domain == "annulus" and not spec.r_min > 0.0:
        raise DataError(f"{name}: annulus domain requires r_min > 0")
    zero = _const(0.0)
    rho = _identity()
    if name == "minkowski":
        g11, ka, kb = _const(1.0), zero, zero
        label = "Minkowski t=0 slice"
    elif name == "schwarzschild_ts":
        _positive(spec, "mass")
        m = p["mass"]
        if spec.domain != "annulus" or not spec.r_min > 2.0 * m:
            raise DataError(
                f"schwarzschild_ts requires an annulus domain with r_min > 2m = {2 * m:g} "
                f"(got {spec.domain} with r_min={spec.r_min:g})"
            )
        g11, ka, kb = _schwarzschild_g11(m), zero, zero
        label = f"Schwarzschild time-symmetric slice, m={m:g}"
    elif name == "painleve_gullstrand":
        _positive(spec, "mass")
        m = p["mass"]
        if spec.domain != "annulus":
            raise DataError(
                "painleve_gullstrand requires an annulus domain with r_min > 0 "
                "(the slice is singular at r=0)"
            )
        a = math.sqrt(2.0 * m)
        kb = AnalyticField(
            lambda r: -a * r**-1.5, lambda r: 1.5 * a * r**-2.5, lambda r: -3.75 * a * r**-3.5, "1/length"
        )
        ka = AnalyticField(
            lambda r: 0.5 * a * r**-1.5, lambda r: -0.75 * a * r**-2.5, lambda r: 1.875 * a * r**-3.5, "1/length"
        )
        g11 = _const(1.0)
        label = f"Painleve-Gullstrand slice, m={m:g}"
    elif name == "constant_density_star":
        _positive(spec, "mu0", "r_star")
        c = 8.0 * math.pi * p["mu0"] / 3.0
        if not c * p["r_star"] ** 2 < 1.0:
            raise DataError(
                f"constant_density_star needs (8pi/3) mu0 r_star^2 < 1, got {c * p['r_star'] ** 2:g}"
            )
        g11, ka, kb = _star_g11(c, p["r_star"]), zero, zero
        label = f"constant-density star, mu0={p['mu0']:g}, r_star={p['r_star']:g}"
    elif name == "uniform_collapse":
        _positive(spec, "k0", "scale")
        if p["beta"] < 0:
            raise DataError(f"uniform_collapse: beta must be >= 0, got {p['beta']}")
        k0, beta, scale = p["k0"], p["beta"], p["scale"]
        g11 = _const(1.0)
        kb = AnalyticField(lambda r: np.full_like(r, -k0), np.zeros_like, np.zeros_like, "1/length")
        ka = AnalyticField(
            lambda r: -k0 * (1.0 + beta * r / scale),
            lambda r: np.full_like(r, -k0 * beta / scale),
            np.zeros_like,
            "1/length",
        )
        label = f"uniform collapse, K0={k0:g}, beta={beta:g}, L={scale:g}"
    elif name == "gaussian_blob":
        _positive(spec, "amplitude", "width")
        mass = _GaussianMass(p["amplitude"], p["width"])
        g11, ka, kb = _blob_g11(mass), zero, zero
        label = f"gaussian blob, A={p['amplitude']:g}, w={p['width']:g}"
    else:  # pragma: no cover - FamilySpec already rejects unknown names
        raise DataError(f"unknown family {name!r}")
    ka = replace(ka, units="1/length")
    kb = replace(kb, units="1/length")
    grid = make_grid(spec.domain, spec.n, spec.r_min, spec.r_max, spec.spacing, spec.stretch)
    data = InitialData(grid, g11, rho, ka, kb, label=label, family=spec)
    g = data.sample("g11")
    if name == "gaussian_blob" and not np.all(g > 0):
        raise DataError("gaussian_blob: amplitude too large, 2m(r)/r reaches 1 on the grid")
    return data


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


def _num(x):
    return format(float(x), ".17g")


def _array_text(a):
    return "[" + ", ".join(_num(x) for x in a) + "]"


def dumps_data(data):
    head = {"schema": SCHEMA, "domain": data.domain, "label": data.label}
    if data.family is not None:
        head["family"] = data.family.to_dict()
    fields = ", ".join(f'"{name}": {_array_text(data.sample(name))}' for name in FIELDS)
    meta = json.dumps(head, sort_keys=True)[1:-1]
    return f'{{{meta}, "grid": {_array_text(data.r)}, "fields": {{{fields}}}}}\n'


def save_data(data, path):
    """Write ``data`` as a collapse-kit/v1 JSON document."""
    Path(path).write_text(dumps_data(data))


def _float_array(values, name):
    if not isinstance(values, list):
        raise DataError(f"field {name!r} must be a list of numbers")
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise DataError(f"field {name!r} contains non-numeric entries") from None
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise DataError(f"field {name!r} has non-finite value at index {bad[0]}")
    return arr


def loads_data(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DataError("document must be a JSON object")
    for key in ("schema", "domain", "grid", "fields"):
        if key not in doc:
            raise DataError(f"missing field {key!r}")
    if doc["schema"] != SCHEMA:
        raise DataError(f"schema must be {SCHEMA!r}, got {doc['schema']!r}")
    if doc["domain"] not in ("ball", "annulus"):
        raise DataError(f"domain must be 'ball' or 'annulus', got {doc['domain']!r}")
    r = _float_array(doc["grid"], "grid")
    check_grid(r, doc["domain"])
    fields = doc["fields"]
    if not isinstance(fields, dict):
        raise DataError("'fields' must be an object")
    for name in FIELDS:
        if name not in fields:
            raise DataError(f"missing field {name!r}")
    extra = set(fields) - set(FIELDS)
    if extra:
        raise DataError(f"unknown field(s) {sorted(extra)}")
    arrays = {}
    for name in FIELDS:
        arr = _float_array(fields[name], name)
        if arr.shape != r.shape:
            raise DataError(f"field {name!r} has {arr.size} samples for {r.size} grid points")
        arrays[name] = arr
    family = doc.get("family")
    spec = FamilySpec.from_dict(family) if family else None
    return InitialData(
        RadialGrid(r, doc["domain"]),
        *(TabulatedField(arrays[name], UNITS[name]) for name in FIELDS),
        label=str(doc.get("label", "")),
        family=spec,
    )


def load_data(path):
    """Read a collapse-kit/v1 JSON document into tabulated ``InitialData``."""
    return loads_data(Path(path).read_text())


def export_csv(data, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("r",) + FIELDS)
        cols = [data.r] + [data.sample(name) for name in FIELDS]
        for row in zip(*cols):
            w.writerow([_num(x) for x in row])
