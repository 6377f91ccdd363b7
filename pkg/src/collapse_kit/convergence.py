"""Refinement ladders and observed-order tables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .radial_data import build_family, refine, tabulate

MIN_ORDER = 1.9
KINK_ORDER = 0.9
ROUNDOFF = 1e-12


@dataclass(frozen=True)
class ConvergenceTable:
    name: str
    n: tuple
    residuals: tuple
    floor: float = ROUNDOFF
    min_order: float = MIN_ORDER
    window: float | None = None

    @property
    def orders(self):
        out = []
        for a, b in zip(self.residuals, self.residuals[1:]):
            out.append(math.log2(a / b) if a > 0 and b > 0 else math.nan)
        return tuple(out)

    @property
    def observed_order(self):
        finite = [o for o in self.orders if math.isfinite(o)]
        return min(finite) if finite else math.nan

    @property
    def at_roundoff(self):
        return max(self.residuals) <= self.floor

    @property
    def asymptotic_order(self):
        """Order from the finest pair of levels."""
        return self.orders[-1] if self.orders else math.nan

    @property
    def passed(self):
        # gated on the finest pair; coarser pairs may still be pre-asymptotic
        if self.at_roundoff:
            return True
        if len(self.residuals) < 2:
            return False
        if self.residuals[-1] <= self.floor:
            return True
        o = self.asymptotic_order
        return math.isfinite(o) and o >= self.min_order

    def to_dict(self):
        return {
            "name": self.name,
            "n": list(self.n),
            "residuals": list(self.residuals),
            "orders": [None if not math.isfinite(o) else o for o in self.orders],
            "required_order": self.min_order if math.isfinite(self.min_order) else None,
            "window_r_max": self.window,
            "passed": self.passed,
        }


def ladder(data, levels):
    """``levels`` tabulated data sets, each with twice the resolution of the last.

    Data carrying family metadata are re-sampled from the closed form at each
    level; other data are refined by spline insertion.
    """
    if levels < 1:
        raise ValueError(f"need at least one refinement level, got {levels}")
    base = tabulate(data)
    if data.family is not None and data.family.spacing == "uniform":
        n0 = len(data.r)
        return [tabulate(build_family(data.family.with_n((n0 - 1) * 2**k + 1)))
                for k in range(levels)]
    out = [base]
    for _ in range(levels - 1):
        out.append(refine(out[-1], 2))
    return out


def max_abs(a):
    a = np.asarray(a, dtype=float)
    a = a[np.isfinite(a)]
    return float(np.max(np.abs(a))) if a.size else 0.0


def expected_order(data):
    """Second order, or first order when a family has a derivative jump inside."""
    fam = data.family
    if fam is not None and fam.name == "constant_density_star":
        if fam.r_min < fam.params["r_star"] < fam.r_max:
            return KINK_ORDER
    return MIN_ORDER


def study(name, datasets, residual_fn, floor=ROUNDOFF, min_order=None):
    """Max-norm residual of ``residual_fn(data)`` on each level."""
    res = tuple(max_abs(residual_fn(d)) for d in datasets)
    if min_order is None:
        min_order = expected_order(datasets[0])
    return ConvergenceTable(name, tuple(len(d.r) for d in datasets), res, floor, min_order)


@dataclass(frozen=True)
class IdentityReport:
    name: str
    residual: float | None
    tolerance: float | None
    table: ConvergenceTable | None

    @property
    def passed(self):
        ok = True
        if self.residual is not None and self.tolerance is not None:
            ok = self.residual <= self.tolerance
        if self.table is not None:
            ok = ok and self.table.passed
        return ok

    def to_dict(self):
        return {
            "name": self.name, "residual": self.residual, "tolerance": self.tolerance,
            "convergence": self.table.to_dict() if self.table else None, "passed": self.passed,
        }
