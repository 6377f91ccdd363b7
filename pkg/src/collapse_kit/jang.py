"""Generalized Jang equation in spherical symmetry, Geroch energy and the mass chain.

The Jang graph ``t = f(r)`` lives in the warped product ``(M x R, g + phi^2 dt^2)``
with warping ``phi = rho_s``. Writing the normalized velocity

    v = phi f_r / sqrt(g11 + phi^2 f_r^2),

the prescribed mean curvature equation reduces to the first-order ODE

    dv/dr = sqrt(g11) ka + sqrt(g11) (2 kb - 2 (P/rho) v) / (1 - v^2)
            - v d/dr ln(rho_r / sqrt(g11)),

with ``P = rho_r / sqrt(g11)``. The induced metric is ``ds^2 + rho^2 dchi^2``
with ``ds/dr = sqrt(g11 / (1 - v^2))`` and ``rho_s = sqrt(1 - v^2) P``.
On Painleve-Gullstrand data ``v = -sqrt(2m/r)`` is an exact solution, which
pins down every sign above.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .convergence import ConvergenceTable, IdentityReport, expected_order, ladder, max_abs
from .geometry import _GL_W, _GL_X, dec_check, difference_error, geometry_profile, pointwise
from .horizon import scan

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
DEFAULT_BLOW_EPS = 1e-6
CHAIN_TOL = 1e-8
NODE_TOL = 1e-12
_CENTER_START = 1e-4  # series start as a fraction of the first cell

_REASONS = {
    kernels.STATUS_BLOW_UP: "blow_up",
    kernels.STATUS_MINIMAL_SPHERE: "minimal_sphere",
    kernels.STATUS_UNDERFLOW: "step_underflow",
}


class JangError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryCondition:
    """``center``, ``value`` (v(r1) = v1) or ``matched`` (v(r1) = TrSk/H)."""

    kind: str
    r1: float | None = None
    v1: float | None = None

    def __post_init__(self):
        if self.kind not in ("center", "value", "matched"):
            raise JangError(f"unknown boundary condition kind {self.kind!r}")
        if self.kind != "center" and self.r1 is None:
            raise JangError(f"{self.kind} boundary condition needs r1")
        if self.kind == "value":
            if self.v1 is None:
                raise JangError("value boundary condition needs v1")
            if not -1.0 < self.v1 < 1.0:
                raise JangError(f"boundary value v1={self.v1} outside (-1, 1)")

    @classmethod
    def parse(cls, text):
        """Parse ``center``, ``r1=<x>,v1=<y>`` or ``r1=<x>,matched``."""
        text = text.strip()
        if text == "center":
            return cls("center")
        parts = [p.strip() for p in text.split(",") if p.strip()]
        kv, flags = {}, set()
        for p in parts:
            m = re.fullmatch(r"(r1|v1)\s*=\s*(\S+)", p)
            if m:
                try:
                    kv[m.group(1)] = float(m.group(2))
                except ValueError:
                    raise JangError(f"bc: {m.group(1)} is not a number: {m.group(2)!r}") from None
            elif p == "matched":
                flags.add(p)
            else:
                raise JangError(f"bc: cannot parse {p!r} (expected center, r1=..,v1=.. or r1=..,matched)")
        if "r1" not in kv:
            raise JangError("bc: r1 is required unless bc is 'center'")
        if flags and "v1" in kv:
            raise JangError("bc: give either v1 or matched, not both")
        if flags:
            return cls("matched", kv["r1"])
        if "v1" not in kv:
            raise JangError("bc: missing v1 (or 'matched')")
        return cls("value", kv["r1"], kv["v1"])

    @classmethod
    def coerce(cls, bc):
        if isinstance(bc, cls):
            return bc
        if isinstance(bc, str):
            return cls.parse(bc)
        if isinstance(bc, dict):
            return cls(**bc)
        raise JangError(f"cannot interpret boundary condition {bc!r}")

    def __str__(self):
        if self.kind == "center":
            return "center"
        if self.kind == "matched":
            return f"r1={self.r1:.17g},matched"
        return f"r1={self.r1:.17g},v1={self.v1:.17g}"


@dataclass(frozen=True)
class BlowUp:
    r: float
    reason: str
    side: str | None
    one_minus_v2: float


@dataclass(frozen=True, eq=False)
class JangSolution:
    r: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    s: np.ndarray
    phi: np.ndarray
    rho_s: np.ndarray
    geroch_m: np.ndarray
    rho: np.ndarray
    regularity_domain: tuple
    blow_up: BlowUp | None
    bc: dict
    backend: str = ""
    _start_node: int = field(default=0, repr=False)

    @property
    def regular(self):
        return self.blow_up is None

    def at(self, r, tol=1e-9):
        """Index of the stored radius closest to ``r`` (must be within tol)."""
        i = int(np.argmin(np.abs(self.r - r)))
        if abs(self.r[i] - r) > tol * max(1.0, abs(r)):
            raise JangError(f"r={r} is not a solution node (nearest {self.r[i]:.17g})")
        return i


def _coef_fn(data):
    def coef(x):
        a = np.array([x])
        return (
            float(data.g11(a)[0]), float(data.g11(a, 1)[0]),
            float(data.rho(a)[0]), float(data.rho(a, 1)[0]), float(data.rho(a, 2)[0]),
            float(data.ka(a)[0]), float(data.kb(a)[0]),
        )

    return coef


def _prims(data, r, nodes=None):
    if data.is_analytic:
        return data.primitives(r)
    p = data.primitives()
    return {k: v[nodes] for k, v in p.items()}


def jang_rhs(prim, v):
    """Vectorized right-hand side ``dv/dr`` (undefined at a ball centre)."""
    g, rho_r = prim["g11"], prim["rho_r"]
    sg = np.sqrt(g)
    w = 1.0 - v * v
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 2.0 * rho_r / (sg * prim["rho"])
        e = prim["rho_rr"] / rho_r - 0.5 * prim["g11_r"] / g
        return sg * prim["ka"] + sg * (2.0 * prim["kb"] - d * v) / w - v * e


def _center_slope(data):
    # v ~ (Tr_g k(0) / 3) r at a regular centre
    return float((data.sample("ka")[0] + 2.0 * data.sample("kb")[0]) / 3.0)


def _start(data, bc):
    r = data.r
    if bc.kind == "center":
        if data.domain != "ball":
            raise JangError(f"center boundary condition needs a ball domain, data is an {data.domain}")
        slope = _center_slope(data)
        if data.is_analytic:
            x0 = _CENTER_START * r[1]
            v0 = slope * x0
            s0 = math.sqrt(float(data.g11(np.array([0.0]))[0])) * x0
            return 0, x0, v0, s0, slope
        g = np.sqrt(data.sample("g11"))
        v0 = slope * r[1]
        s0 = 0.5 * r[1] * (g[0] + g[1] / math.sqrt(1.0 - v0 * v0))
        return 1, float(r[1]), v0, s0, slope
    r1 = float(bc.r1)
    if not r[0] - NODE_TOL * max(1.0, abs(r[0])) <= r1 < r[-1]:
        raise JangError(f"bc r1={r1} outside the domain [{r[0]}, {r[-1]})")
    j = int(np.argmin(np.abs(r - r1)))
    on_node = abs(r[j] - r1) <= NODE_TOL * max(1.0, abs(r1))
    if on_node:
        i0, r1 = j, float(r[j])
    elif data.is_tabulated:
        raise JangError(f"bc r1={r1} must be a grid node for tabulated data (nearest {r[j]:.17g})")
    else:
        i0 = int(np.searchsorted(r, r1)) - 1
    if bc.kind == "matched":
        p = _prims(data, np.array([r1]), [i0] if on_node else None)
        P = p["rho_r"] / np.sqrt(p["g11"])
        v1 = float(p["rho"][0] * p["kb"][0] / P[0])
        if not -1.0 < v1 < 1.0:
            raise JangError(
                f"matched bc v(r1)=TrSk/H={v1:.6g} at r1={r1} is outside (-1, 1): sphere is trapped"
            )
    else:
        v1 = float(bc.v1)
    return i0, r1, v1, 0.0, None


def solve_jang(data, bc="center", rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, eps_blow=DEFAULT_BLOW_EPS):
    """Integrate the reduced Jang ODE outward from the boundary condition.

    Stops with a ``BlowUp`` record when ``1 - v^2 < eps_blow``, when
    ``rho_r`` stops being positive, or when the step size underflows.
    """
    bc = BoundaryCondition.coerce(bc)
    if not rtol > 0 or not atol > 0 or not eps_blow > 0:
        raise JangError("rtol, atol and eps_blow must be positive")
    r = data.r
    i0, x0, v0, s0, slope = _start(data, bc)
    if data.is_analytic:
        out = kernels.dopri_nodes(_coef_fn(data), r, i0, x0, v0, s0, rtol, atol, eps_blow)
        backend = "python"
    else:
        p = data.primitives()
        fields = np.vstack([p[k] for k in ("g11", "g11_r", "rho", "rho_r", "rho_rr", "ka", "kb")])
        out = kernels.jang_tabulated(r, fields, i0, x0, v0, s0, rtol, atol, eps_blow)
        backend = kernels.BACKEND
    v, s, done, status, r_stop, v_stop = out
    v, s = v[:done].copy(), s[:done].copy()
    r_sol = r[i0:i0 + done].astype(float).copy()
    r_sol[0] = x0
    nodes = np.arange(i0, i0 + done)
    if bc.kind == "center":
        if data.is_analytic:
            r_sol[0], v[0], s[0] = 0.0, 0.0, 0.0
        else:
            r_sol = np.concatenate([[0.0], r_sol])
            v = np.concatenate([[0.0], v])
            s = np.concatenate([[0.0], s])
            nodes = np.concatenate([[0], nodes])
    on_grid = bool(np.all(r_sol == r[nodes]))
    prim = _prims(data, r_sol, nodes if data.is_tabulated or on_grid else None)
    P = prim["rho_r"] / np.sqrt(prim["g11"])
    phi = np.sqrt(1.0 - v * v) * P
    dv = jang_rhs(prim, v)
    if bc.kind == "center":
        dv[0] = slope
    blow = None
    if status != kernels.STATUS_OK:
        w = 1.0 - v_stop * v_stop
        side = None
        if status == kernels.STATUS_BLOW_UP:
            side = "v->+1" if v_stop > 0 else "v->-1"
        blow = BlowUp(float(r_stop), _REASONS[status], side, float(w))
    for a in (r_sol, v, dv, s, phi):
        a.setflags(write=False)
    rho = np.asarray(prim["rho"], dtype=float)
    m = 0.5 * rho * (1.0 - phi**2)
    for a in (m, rho):
        a.setflags(write=False)
    return JangSolution(
        r=r_sol, v=v, dv=dv, s=s, phi=phi, rho_s=phi, geroch_m=m, rho=rho,
        regularity_domain=(float(r_sol[0]), float(r_stop)),
        blow_up=blow,
        bc={"spec": str(bc), "kind": bc.kind, "r1": float(r_sol[0]), "v1": float(v[0]),
            "rtol": rtol, "atol": atol, "eps_blow": eps_blow},
        backend=backend,
        _start_node=int(nodes[0]),
    )


def reconstruct_f(data, sol):
    """Height function with ``f(r0) = 0``; NaN from the first point with phi = 0."""
    prim = _prims(data, sol.r, _nodes(data, sol))
    w = 1.0 - sol.v**2
    with np.errstate(divide="ignore", invalid="ignore"):
        fr = sol.v * np.sqrt(prim["g11"]) / (sol.phi * np.sqrt(w))
    if sol.r[0] == 0.0 and sol.phi[0] > 0:
        # v/phi ~ slope * r at the centre
        fr[0] = 0.0
    f = kernels.cumtrapz(sol.r, np.nan_to_num(fr, nan=0.0))
    bad = np.flatnonzero(~np.isfinite(fr))
    if bad.size:
        f[bad[0]:] = np.nan
    return f


def _nodes(data, sol):
    if data.is_analytic:
        return None
    return sol._start_node + np.arange(len(sol.r))


# --------------------------------------------------------------------------
# residual components
# --------------------------------------------------------------------------


def _local(prim, v):
    g, rho, rho_r = prim["g11"], prim["rho"], prim["rho_r"]
    P = rho_r / np.sqrt(g)
    w = 1.0 - v * v
    with np.errstate(divide="ignore", invalid="ignore"):
        a_t = (P / rho) * v - prim["kb"]
    q = pointwise(prim)
    return {
        "P": P, "w": w, "phi": np.sqrt(w) * P, "s_r": np.sqrt(g / w), "rho": rho,
        "a_t": a_t, "mu": q["mu"], "Jn": q["Jn"],
        "thetaP": q["thetaP"], "thetaM": q["thetaM"],
    }


def _components(loc, v):
    a_t, w = loc["a_t"], loc["w"]
    a_n = -2.0 * a_t / w
    q_s = -2.0 * v * a_t / np.sqrt(w)
    return {
        "a_t": a_t, "a_n": a_n, "q_s": q_s,
        "hK_sq": a_n**2 + 2.0 * a_t**2, "q_sq": q_s**2,
        "muJw": loc["mu"] - v * loc["Jn"],
    }


@dataclass(frozen=True, eq=False)
class JangDiagnostics:
    r: np.ndarray
    a_t: np.ndarray
    a_n: np.ndarray
    q_s: np.ndarray
    hK_sq: np.ndarray
    q_sq: np.ndarray
    w_norm: np.ndarray
    muJw: np.ndarray

def _node_fields(data, sol, profile=None):
    prim = _prims(data, sol.r, _nodes(data, sol))
    loc = _local(prim, sol.v)
    if sol.r[0] == 0.0:
        profile = profile or geometry_profile(data)
        # centre limits: (P/rho) v -> v'(0) P(0) / rho_r(0)
        loc["a_t"][0] = sol.dv[0] * loc["P"][0] / prim["rho_r"][0] - prim["kb"][0]
        loc["mu"][0] = profile.mu[0]
        loc["Jn"][0] = profile.Jn[0]
    return prim, loc


def jang_diagnostics(data, sol, profile=None):
    """Residual components of the Jang graph on the stored radii."""
    _, loc = _node_fields(data, sol, profile)
    c = _components(loc, sol.v)
    return JangDiagnostics(r=sol.r, w_norm=np.abs(sol.v), **c)


def boundary_term(sol, diag):
    """``P v a_t rho^2``: the flux of q through S_r, per 4pi."""
    P = sol.phi / np.sqrt(1.0 - sol.v**2)
    return P * sol.v * diag.a_t * sol.rho**2


# --------------------------------------------------------------------------
# Geroch energy identity
# --------------------------------------------------------------------------


def geroch_residual(data, sol):
    """Residual of ``m_s = (1/4) rho_s rho^2 Rbar`` and the induced ``Rbar``.

    ``Rbar = -4 rho_ss / rho + 2 (1 - rho_s^2) / rho^2`` is built from the
    induced metric alone. Analytic data differentiate by the chain rule with
    ``v'`` from the ODE; tabulated data use finite differences on the grid.
    The residual is formed without dividing by ``rho`` so the centre is kept.
    """
    prim = _prims(data, sol.r, _nodes(data, sol))
    v, phi, m, rho = sol.v, sol.phi, sol.geroch_m, sol.rho
    g = prim["g11"]
    w = 1.0 - v * v
    s_r = np.sqrt(g / w)
    if data.is_analytic:
        P = prim["rho_r"] / np.sqrt(g)
        P_r = prim["rho_rr"] / np.sqrt(g) - 0.5 * prim["rho_r"] * prim["g11_r"] / g**1.5
        phi_r = np.sqrt(w) * P_r - v * sol.dv * P / np.sqrt(w)
        m_r = 0.5 * prim["rho_r"] * (1.0 - phi**2) - rho * phi * phi_r
    else:
        phi_r = kernels.diff1(sol.r, phi)
        m_r = kernels.diff1(sol.r, m)
    rho_ss = phi_r / s_r
    with np.errstate(divide="ignore", invalid="ignore"):
        rbar = -4.0 * rho_ss / rho + 2.0 * (1.0 - phi**2) / rho**2
    rhs = -phi * rho * rho_ss + 0.5 * phi * (1.0 - phi**2)
    return m_r / s_r - rhs, rbar


def _solve_regular(data, bc, **kw):
    sol = solve_jang(data, bc, **kw)
    if sol.blow_up is not None and len(sol.r) < 4:
        raise JangError(f"Jang solution stops at r={sol.blow_up.r:.6g} ({sol.blow_up.reason})")
    return sol


def _jang_study(name, data, bc, refinements, residual_fn):
    """Order study over a ladder; a blow-up on the coarsest level fixes a common window."""
    levels = ladder(data, refinements)
    sols = [_solve_regular(d, bc) for d in levels]
    first = sols[0]
    window = None
    if first.blow_up is not None:
        # derivatives grow without bound as |v| -> 1; stay 10% short of the stop
        window = float(first.r[-1] - 0.1 * (first.r[-1] - first.r[0]))
    res = []
    for d, sol in zip(levels, sols):
        vals = residual_fn(d, sol)
        res.append(max_abs(vals if window is None else vals[sol.r <= window]))
    return ConvergenceTable(name, tuple(len(d.r) for d in levels), tuple(res),
                            min_order=expected_order(levels[0]), window=window)


def verify_geroch_identity(data, sol=None, refinements=3, bc=None, analytic_tol=1e-8):
    """Geroch identity on ``data`` plus an observed-order study on tabulated levels."""
    bc = bc or (sol.bc["spec"] if sol is not None else "center" if data.domain == "ball" else None)
    if bc is None:
        raise JangError("annulus data need an explicit boundary condition")
    residual = None
    if data.is_analytic:
        sol = sol or _solve_regular(data, bc)
        residual = max_abs(geroch_residual(data, sol)[0])
    table = None
    if refinements >= 2:
        table = _jang_study("geroch", data, bc, refinements, lambda d, s: geroch_residual(d, s)[0])
    return IdentityReport("geroch", residual, analytic_tol if residual is not None else None, table)


# --------------------------------------------------------------------------
# integrals over the Jang graph and the mass chain
# --------------------------------------------------------------------------


def _hermite(a, b, va, vb, da, db, x):
    h = b - a
    t = (x - a) / h
    return ((2 * t**3 - 3 * t**2 + 1) * va + (t**3 - 2 * t**2 + t) * h * da
            + (-2 * t**3 + 3 * t**2) * vb + (t**3 - t**2) * h * db)


def _integrands(loc, comp):
    # rho_s d(omega) = 4 pi rho^2 phi ds = 4 pi rho^2 rho_r dr
    dens = 4.0 * math.pi * loc["rho"] ** 2 * loc["phi"] * loc["s_r"]
    return dens * comp["muJw"], dens * (comp["hK_sq"] + 2.0 * comp["q_sq"]) / (16.0 * math.pi)


def chain_integrals(data, sol, profile=None):
    """Cumulative ``int rho_s (mu - J(w)) d(omega)`` and the residual-square integral.

    Analytic data use 8-point Gauss-Legendre per cell with ``v`` from cubic
    Hermite interpolation of the stored ``(v, v')``; tabulated data integrate
    the nodal values (Simpson on uniform grids).
    """
    prim, loc = _node_fields(data, sol, profile)
    comp = _components(loc, sol.v)
    q_nodes, w_nodes = _integrands(loc, comp)
    r = sol.r
    if data.is_analytic:
        a = r[:-1, None]
        h = np.diff(r)[:, None]
        x = a + 0.5 * h * (1.0 + _GL_X[None, :])
        vx = _hermite(a, a + h, sol.v[:-1, None], sol.v[1:, None],
                      sol.dv[:-1, None], sol.dv[1:, None], x)
        lx = _local(data.primitives(x.ravel()), vx.ravel())
        qx, wx = _integrands(lx, _components(lx, vx.ravel()))
        cells_q = 0.5 * h[:, 0] * (qx.reshape(x.shape) @ _GL_W)
        cells_w = 0.5 * h[:, 0] * (wx.reshape(x.shape) @ _GL_W)
        return (np.concatenate([[0.0], np.cumsum(cells_q)]),
                np.concatenate([[0.0], np.cumsum(cells_w)]))
    dr = np.diff(r)
    cum = kernels.cumsimpson if np.allclose(dr, dr[0], rtol=1e-12, atol=0) else kernels.cumtrapz
    return cum(r, q_nodes), cum(r, w_nodes)


def equality_residual(data, sol, profile=None):
    """``m(r) - m(r0)`` minus the integrated right side, along the solution.

    The right side is the volume integral of ``rho_s (mu - J(w) + (|h-K|^2
    + 2|q|^2) / 16pi)`` plus the change in the boundary term.
    """
    diag = jang_diagnostics(data, sol, profile)
    q, w = chain_integrals(data, sol, profile)
    b = boundary_term(sol, diag)
    if sol.r[0] == 0.0:
        b[0] = 0.0
    m = sol.geroch_m
    return (m - m[0]) - (q + w) - (b - b[0])


def _gated(data, sol, profile=None):
    # closed-form gating: time symmetric data or an exact Jang solution (a_t = 0)
    diag = jang_diagnostics(data, sol, profile)
    scale = max(max_abs(data.sample("ka")), max_abs(data.sample("kb")), 1.0 / data.r[-1])
    return bool(max_abs(diag.a_t) <= 1e-6 * scale)


def equality_report(data, bc=None, refinements=3, analytic_tol=1e-8):
    """Integrated-equality residual; only a-priori exact cases are gated."""
    if bc is None:
        bc = "center" if data.domain == "ball" else f"r1={data.r[0]!r},matched"
    residual = None
    sol = _solve_regular(data, bc)
    gated = _gated(data, sol)
    if data.is_analytic:
        residual = max_abs(equality_residual(data, sol))
    table = None
    if refinements >= 2:
        table = _jang_study("mass_equality", data, bc, refinements, equality_residual)
    name = "mass_equality" if gated else "mass_equality_report"
    tol = analytic_tol if (gated and residual is not None) else None
    if not gated and table is not None:
        # generic k: reported, never gated
        table = ConvergenceTable(table.name, table.n, table.residuals, table.floor,
                                 min_order=-math.inf, window=table.window)
    return IdentityReport(name, residual, tol, table), gated


@dataclass(frozen=True)
class ChainLine:
    name: str
    statement: str
    lhs: float
    rhs: float
    worst_margin: float
    worst_r: float
    tol: float

    @property
    def holds(self):
        return self.worst_margin >= -self.tol


@dataclass(frozen=True)
class MassChainReport:
    r: float
    lines: tuple
    equality_residual: float
    gated: bool

    @property
    def holds(self):
        return all(line.holds for line in self.lines)

    def to_dict(self):
        return {
            "r": self.r,
            "lines": [{**line.__dict__, "holds": line.holds} for line in self.lines],
            "equality_residual": self.equality_residual,
            "equality_gated": self.gated,
            "holds": self.holds,
        }


def _chain_hypotheses(data, sol, r, profile):
    from .criteria import horizon_in_ball

    if data.domain != "ball":
        raise JangError("the mass chain needs ball data (integrals start at the centre)")
    if sol.r[0] != 0.0:
        raise JangError("the mass chain needs a centre boundary condition")
    hs = scan(profile)
    inside = horizon_in_ball(profile, hs, "future") | horizon_in_ball(profile, hs, "past")
    free = np.flatnonzero(~inside[: len(sol.r)])
    last = int(free[-1]) if free.size else 0
    if inside[: len(sol.r)].any():
        last = int(np.argmax(inside)) - 1
    if r is None:
        k = last
    else:
        if r > sol.r[last] * (1.0 + NODE_TOL):
            raise JangError(f"ball B_r with r={r} contains an apparent horizon or trapped sphere")
        k = sol.at(r)
    if k < 1:
        raise JangError("no horizon-free ball with a regular Jang solution")
    dec = dec_check(profile)
    bad = np.flatnonzero((dec.margin + dec.allowance)[: k + 1] < -dec.tol)
    if bad.size:
        raise JangError(f"dominant energy condition fails at r={profile.r[bad[0]]:.6g}")
    return k


_CHAIN_STATEMENTS = (
    ("flux", "m - B >= int rho_s (mu - J(w))"),
    ("minimum", "m >= (4pi/3) rho^3 min(mu - J(w)) + B"),
    ("energy", "E >= (4pi/3) rho^3 min(mu - J(w))"),
    ("criterion", "(3/2) Rad/Vol >= min(mu - J(w)) + (3/32pi) theta+ theta-"),
)


def _chain_sides(data, sol, profile):
    """Both sides of every chain line and the integrated equality residual."""
    diag = jang_diagnostics(data, sol, profile)
    q, w = chain_integrals(data, sol, profile)
    b = boundary_term(sol, diag)
    b[0] = 0.0
    m = sol.geroch_m
    rho = sol.rho
    min_dens = kernels.running_min(diag.muJw)
    ball = 4.0 * math.pi / 3.0 * rho**3 * min_dens
    n = len(rho)
    tt = profile.thetaP[:n] * profile.thetaM[:n]
    energy = 0.5 * rho * (1.0 - rho**2 * tt / 4.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        crit_lhs = 1.5 * profile.Rad[:n] / profile.Vol[:n]
    crit_rhs = min_dens + 3.0 / (32.0 * math.pi) * tt
    sides = ((m - b, q), (m, ball + b), (energy, ball), (crit_lhs, crit_rhs))
    return sides, m - (q + w) - b


def _chain_margins(data):
    # every line's margin on the full grid, NaN past the end of the solution
    sol = solve_jang(data, "center")
    sides, _ = _chain_sides(data, sol, geometry_profile(data))
    out = np.full((len(sides), len(data.r)), np.nan)
    for row, (lhs, rhs) in zip(out, sides):
        row[: len(lhs)] = lhs - rhs
    return out


def verify_mass_inequality_chain(data, sol=None, r=None, profile=None):
    """Evaluate every step of the positivity chain on ``[0, r]``.

    Each inequality is checked at every node up to ``r`` (default: the
    largest horizon-free radius) with tolerance ``-1e-8 * scale``. On
    tabulated data each node also gets an allowance for its estimated
    difference error.
    """
    profile = profile or geometry_profile(data)
    sol = sol or solve_jang(data, "center")
    k = _chain_hypotheses(data, sol, r, profile)
    sl = slice(1, k + 1)
    sides, eq = _chain_sides(data, sol, profile)
    allowance = difference_error(data, _chain_margins)
    # unit floors keep the tolerance meaningful when both sides vanish
    rho = sol.rho
    units = (rho[k], rho[k], rho[k], 1.0 / rho[k] ** 2)
    lines = []
    for (name, text), (lhs, rhs), unit, extra in zip(_CHAIN_STATEMENTS, sides, units, allowance):
        margin = (lhs - rhs)[sl] + extra[sl]
        scale = max(max_abs(lhs[sl]), max_abs(rhs[sl]), unit)
        j = int(np.argmin(margin))
        lines.append(ChainLine(name, text, float(lhs[k]), float(rhs[k]), float(margin[j]),
                               float(sol.r[sl][j]), CHAIN_TOL * scale))
    return MassChainReport(float(sol.r[k]), tuple(lines), max_abs(eq[sl]), bool(_gated(data, sol, profile)))
