import csv
import math

import numpy as np
import pytest

from collapse_kit.criteria import (
    CRITERION_COLUMNS,
    CriterionError,
    malec_omurchadha_criterion,
    soundness_sweep,
    trapped_surface_criterion,
    write_criterion_csv,
)
from collapse_kit.geometry import geometry_profile
from collapse_kit.radial_data import FamilySpec, build_family, tabulate

from conftest import CORPUS


def _profile(name):
    return geometry_profile(build_family(CORPUS[name]))


def test_minkowski_closed_form():
    row = trapped_surface_criterion(_profile("minkowski")).row_at(1.0)
    assert row["lhs_matter"] + row["lhs_bending"] == pytest.approx(3 / (8 * math.pi), abs=1e-12)
    assert row["rhs"] == pytest.approx(9 / (8 * math.pi), abs=1e-12)
    assert not row["fires"]


def test_uniform_collapse_fires_and_is_consistent():
    rep = trapped_surface_criterion(_profile("uniform_collapse"))
    row = rep.row_at(1.0)
    assert row["margin"] == pytest.approx(2.8 / (4 * math.pi), abs=1e-8)
    assert row["fires"] and row["horizon_in_ball"]
    assert rep.consistency == "ok"
    assert rep.first_firing_radius > 0.5


@pytest.mark.parametrize("mode", ["future", "past"])
@pytest.mark.parametrize("name", ["constant_density_star", "gaussian_blob", "minkowski"])
def test_static_members_never_fire(name, mode):
    rep = trapped_surface_criterion(_profile(name), mode)
    assert not rep.fires.any()
    mo = malec_omurchadha_criterion(_profile(name), mode)
    assert not mo.fires.any() and not mo.fires_coordinate.any()
    assert mo.maximal and mo.banner == ""


def test_mo_flags_non_maximal_data():
    mo = malec_omurchadha_criterion(_profile("uniform_collapse"))
    assert not mo.maximal and "not maximal" in mo.banner


def test_mo_measures_agree_on_flat_metric():
    mo = malec_omurchadha_criterion(_profile("uniform_collapse"))
    np.testing.assert_allclose(mo.lhs, mo.lhs_coordinate, rtol=1e-12)
    assert not mo.measures_differ


def test_tabulated_matches_analytic():
    spec = FamilySpec("uniform_collapse", n=513)
    a = trapped_surface_criterion(geometry_profile(build_family(spec)))
    t = trapped_surface_criterion(geometry_profile(tabulate(build_family(spec))))
    assert np.max(np.abs(a.margin - t.margin)) < 1e-4
    np.testing.assert_array_equal(a.fires, t.fires)


def test_annulus_rejected():
    with pytest.raises(CriterionError, match="ball"):
        trapped_surface_criterion(_profile("schwarzschild_ts"))
    with pytest.raises(CriterionError, match="mode"):
        trapped_surface_criterion(_profile("minkowski"), mode="sideways")


def test_csv_columns(tmp_path):
    prof = _profile("uniform_collapse")
    path = tmp_path / "c.csv"
    write_criterion_csv([trapped_surface_criterion(prof, m) for m in ("future", "past")], path)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == ("mode",) + CRITERION_COLUMNS
    assert len(rows) == 1 + 2 * (len(prof.r) - 1)
    write_criterion_csv([trapped_surface_criterion(prof)], path)
    assert tuple(next(csv.reader(path.open()))) == CRITERION_COLUMNS


def test_sweep_is_sound_and_thread_independent():
    a = soundness_sweep({"n": 65}, trials=24, seed=7, workers=1)
    b = soundness_sweep({"n": 65}, trials=24, seed=7, workers=6)
    assert a.violations == 0
    assert a.to_dict() == b.to_dict()
    assert sum(d["trials"] for d in a.per_family.values()) == 24
