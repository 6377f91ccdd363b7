"""One test per acceptance criterion; each logs a PASS/FAIL line for the summary."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from collapse_kit.convergence import ConvergenceTable
from collapse_kit.criteria import soundness_sweep, trapped_surface_criterion
from collapse_kit.energy import misner_sharp, theorem3_check, verify_dE_identity
from collapse_kit.geometry import dec_check, geometry_profile
from collapse_kit.horizon import scan
from collapse_kit.jang import (
    equality_report,
    solve_jang,
    verify_geroch_identity,
    verify_mass_inequality_chain,
)
from collapse_kit.radial_data import FamilySpec, build_family, save_data, tabulate

from conftest import BALL, CORPUS, PG_BC, corpus


def _orders(table):
    return "/".join("nan" if not math.isfinite(o) else f"{o:.3f}" for o in table.orders)


def test_01_vacuum_constraints(record):
    worst = 0.0
    for name in ("painleve_gullstrand", "schwarzschild_ts"):
        prof = geometry_profile(corpus(name))
        worst = max(worst, np.nanmax(np.abs(prof.mu)), np.nanmax(np.abs(prof.Jn)))
    ok = record(1, "vacuum constraint oracle", worst <= 1e-10, f"max |mu|,|Jn| = {worst:.1e}")
    assert ok


def test_02_horizon_location(record):
    root = scan(geometry_profile(corpus("painleve_gullstrand"))).outermost_future
    errs = []
    for n in (129, 257, 513):
        data = tabulate(build_family(FamilySpec("painleve_gullstrand", n=n)))
        errs.append(abs(scan(geometry_profile(data)).outermost_future - 2.0))
    table = ConvergenceTable("pg_root", (129, 257, 513), tuple(errs), min_order=2.0)
    ok = abs(root - 2.0) <= 1e-10 and all(o >= 2.0 for o in table.orders)
    record(2, "horizon location", ok,
           f"analytic error {abs(root - 2.0):.1e}; tabulated orders {_orders(table)}")
    assert ok


def test_03_closed_form_margins(record):
    mk = trapped_surface_criterion(geometry_profile(corpus("minkowski"))).row_at(1.0)
    lhs = mk["lhs_matter"] + mk["lhs_bending"]
    prof = geometry_profile(corpus("uniform_collapse"))
    uc = trapped_surface_criterion(prof)
    row = uc.row_at(1.0)
    root = scan(prof).outermost_future
    ok = (abs(lhs - 3 / (8 * math.pi)) <= 1e-12 and abs(mk["rhs"] - 9 / (8 * math.pi)) <= 1e-12
          and row["fires"] and abs(row["margin"] - 2.8 / (4 * math.pi)) <= 1e-8
          and abs(root - 0.5) <= 1e-12 and uc.consistency == "ok")
    record(3, "closed-form criterion margins", ok,
           f"uniform collapse margin error {row['margin'] - 2.8 / (4 * math.pi):.1e}; root {root:.12g}")
    assert ok


def test_04_soundness_sweep(record):
    summary = soundness_sweep()
    ok = summary.trials == 200 and summary.violations == 0
    record(4, "soundness sweep", ok,
           f"{summary.trials} draws, {summary.fired_rows} firing rows, {summary.violations} violations")
    assert ok


def _pg_errors(data, rtol):
    sol = solve_jang(data, PG_BC, rtol=rtol)
    exact = -np.sqrt(2.0 / sol.r)
    return (sol, float(np.max(np.abs(sol.v / exact - 1))), float(np.max(np.abs(sol.geroch_m - 1))),
            float(np.max(np.abs(sol.rho_s - np.sqrt(1 - 2 / sol.r)))))


def test_05_jang_pg_oracle(record):
    sol, ev, em, es = _pg_errors(corpus("pg_outer"), 1e-9)
    # on the default grid every step is capped by the cell; a coarse grid lets rtol bind
    coarse = build_family(FamilySpec("painleve_gullstrand", r_min=3.0, n=17))
    response = [_pg_errors(coarse, t)[1] for t in (1e-9, 5e-10, 2.5e-10)]
    ok = (sol.regular and sol.r[-1] == 10.0 and max(ev, em, es) <= 1e-6
          and response[0] > response[1] > response[2])
    record(5, "Jang PG oracle", ok,
           f"v {ev:.1e}, m {em:.1e}, rho_s {es:.1e}; rtol response "
           + " > ".join(f"{x:.1e}" for x in response))
    assert ok


def test_06_blow_up_at_horizon(record):
    ok = True
    detail = []
    for k0 in (1.5, 2.0, 3.0, 5.0):
        for tab in (False, True):
            data = build_family(FamilySpec("uniform_collapse", {"k0": k0}))
            data = tabulate(data) if tab else data
            sol = solve_jang(data)
            root = scan(geometry_profile(data)).outermost_future
            blow = sol.blow_up
            good = (blow is not None and blow.reason == "blow_up" and blow.one_minus_v2 < 1e-6
                    and blow.r <= root + 1e-9 and sol.r[-1] <= root)
            ok &= good
            if k0 == 2.0 and not tab:
                detail.append(f"r* = {blow.r:.6f}, root {root:.3f}")
    record(6, "Jang blow-up inside the ball", ok, "; ".join(detail))
    assert ok


def test_07_geroch_identity(record):
    mk = verify_geroch_identity(corpus("minkowski"), refinements=0)
    pg = verify_geroch_identity(corpus("pg_outer"), bc=PG_BC, refinements=0)
    blob = verify_geroch_identity(tabulate(corpus("gaussian_blob")))
    ok = mk.residual <= 1e-8 and pg.residual <= 1e-8 and blob.table.passed
    record(7, "Geroch identity", ok,
           f"analytic {max(mk.residual, pg.residual):.1e}; blob orders {_orders(blob.table)}")
    assert ok


def test_08_misner_sharp(record):
    vac = max(float(np.max(np.abs(misner_sharp(geometry_profile(corpus(n))).E - 1.0)))
              for n in ("schwarzschild_ts", "painleve_gullstrand"))
    flat = float(np.max(np.abs(misner_sharp(geometry_profile(corpus("minkowski"))).E)))
    orders, tables_ok = [], True
    for name in ("schwarzschild_ts", "painleve_gullstrand", "gaussian_blob", "uniform_collapse",
                 "constant_density_star"):
        table = verify_dE_identity(tabulate(corpus(name))).table
        tables_ok &= table.passed
        orders.append(f"{name} {table.asymptotic_order:.2f}")
    checks_ok = True
    for name in CORPUS:
        prof = geometry_profile(corpus(name))
        if dec_check(prof).holds:
            checks_ok &= theorem3_check(prof).monotone_holds
    pg = theorem3_check(geometry_profile(corpus("painleve_gullstrand")))
    beyond = pg.energy.r > pg.outermost_root
    saturation = float(np.max(np.abs(pg.energy.E[beyond] - pg.bound)))
    ok = vac <= 1e-10 and flat <= 1e-10 and tables_ok and checks_ok and pg.bound_holds and saturation <= 1e-12
    record(8, "Misner-Sharp energy", ok,
           f"|E-m| {vac:.1e}, |E| {flat:.1e}, PG bound gap {saturation:.1e}; dE orders " + ", ".join(orders))
    assert ok


def test_09_mass_chain(record):
    chain_ok, checked = True, []
    for name in BALL:
        data = corpus(name)
        rep = verify_mass_inequality_chain(data)
        chain_ok &= rep.holds
        checked.append(name)
    gated_ok, residual = True, 0.0
    for name, bc in (("minkowski", None), ("constant_density_star", None), ("gaussian_blob", None),
                     ("schwarzschild_ts", "r1=2.5,matched"), ("pg_outer", PG_BC)):
        rep, gated = equality_report(corpus(name), bc=bc)
        gated_ok &= gated and rep.passed
        residual = max(residual, rep.residual)
    j3, gated = equality_report(corpus("uniform_collapse_mild"))
    report_ok = not gated and j3.table is not None
    ok = chain_ok and gated_ok and report_ok
    record(9, "mass-chain inequalities", ok,
           f"{len(checked)} ball members; gated equality {residual:.1e}; "
           f"generic-k report {j3.table.residuals[-1]:.4f} (not gating)")
    assert ok


@pytest.mark.skipif(sys.platform == "win32", reason="uses cmp")
def test_10_determinism(record, tmp_path):
    data = tmp_path / "blob.json"
    save_data(build_family(FamilySpec("gaussian_blob", n=129)), data)
    outs = []
    for threads in ("1", "8"):
        out = tmp_path / f"verify_{threads}.json"
        env = dict(os.environ, COLLAPSE_KIT_THREADS=threads)
        res = subprocess.run([sys.executable, "-m", "collapse_kit", "verify", str(data), "--check",
                              "geroch,de,chain,equality", "--out", str(out)], env=env, capture_output=True)
        assert res.returncode == 0, res.stderr
        outs.append(out)
    same = subprocess.run(["cmp", str(outs[0]), str(outs[1])]).returncode == 0
    ok = record(10, "deterministic verify reports", same, "COLLAPSE_KIT_THREADS 1 vs 8")
    assert ok

