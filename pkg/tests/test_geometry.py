import math

import numpy as np
import pytest

from collapse_kit.geometry import dec_check, difference_error, evaluate_at, geometry_profile, radius_volume
from collapse_kit.radial_data import FamilySpec, build_family, subsample, tabulate

from conftest import CORPUS


@pytest.mark.parametrize("name", ["minkowski", "schwarzschild_ts", "painleve_gullstrand", "pg_outer"])
def test_vacuum_members_have_no_matter(name):
    prof = geometry_profile(build_family(CORPUS[name]))
    assert np.nanmax(np.abs(prof.mu)) <= 1e-10
    assert np.nanmax(np.abs(prof.Jn)) <= 1e-10


def test_star_density_and_scalar_curvature():
    spec = CORPUS["constant_density_star"]
    prof = geometry_profile(build_family(spec))
    mu0 = spec.params["mu0"]
    inside = prof.r < spec.params["r_star"]
    outside = prof.r > spec.params["r_star"]
    np.testing.assert_allclose(prof.mu[inside], mu0, rtol=1e-10)
    np.testing.assert_allclose(prof.R[inside], 16 * math.pi * mu0, rtol=1e-10)
    assert np.max(np.abs(prof.mu[outside])) < 1e-14


def test_uniform_collapse_closed_forms():
    k0, beta = 2.0, 2.9
    prof = geometry_profile(build_family(CORPUS["uniform_collapse"]))
    r = prof.r[1:]
    ka = -k0 * (1 + beta * r)
    mu = (4 * ka * -k0 + 2 * k0**2) / (16 * math.pi)
    jn = (2 / r * (ka + k0)) / (8 * math.pi)
    np.testing.assert_allclose(prof.mu[1:], mu, rtol=1e-12)
    np.testing.assert_allclose(prof.Jn[1:], jn, rtol=1e-12)
    np.testing.assert_allclose(prof.thetaP[1:], 2 / r - 2 * k0, rtol=1e-12)


def test_center_limits_are_finite():
    for name in ("minkowski", "uniform_collapse", "gaussian_blob"):
        prof = geometry_profile(build_family(CORPUS[name]))
        assert np.isfinite(prof.mu[0]) and np.isfinite(prof.Jn[0]) and np.isfinite(prof.R[0])
        assert np.isnan(prof.thetaP[0])


def test_radius_and_volume_exact_on_flat_ball():
    data = build_family(FamilySpec("minkowski", n=33))
    rad, vol = radius_volume(data)
    np.testing.assert_allclose(rad, data.r, atol=1e-14)
    np.testing.assert_allclose(vol, 4 * math.pi / 3 * data.r**3, atol=1e-13)


def test_tabulated_profile_converges_to_analytic():
    errs = []
    for n in (129, 257, 513):
        spec = FamilySpec("gaussian_blob", n=n)
        a = geometry_profile(build_family(spec))
        t = geometry_profile(tabulate(build_family(spec)))
        errs.append(np.max(np.abs(a.mu - t.mu)))
    assert math.log2(errs[0] / errs[1]) > 1.8 and math.log2(errs[1] / errs[2]) > 1.8


def test_evaluate_at_matches_grid():
    data = build_family(CORPUS["uniform_collapse"])
    prof = geometry_profile(data)
    q = evaluate_at(data, data.r[5:8])
    np.testing.assert_allclose(q["thetaP"], prof.thetaP[5:8], rtol=1e-14)


def test_dec():
    assert dec_check(geometry_profile(build_family(CORPUS["gaussian_blob"]))).holds
    # strong collapse with large beta still satisfies mu >= |Jn| only in part of the ball
    bad = build_family(FamilySpec("uniform_collapse", {"k0": 1.0, "beta": 0.0}))
    rep = dec_check(geometry_profile(bad))
    assert rep.holds == (rep.worst_margin >= -rep.tol)


def test_dec_tolerance_absorbs_difference_error_on_samples():
    data = tabulate(build_family(CORPUS["gaussian_blob"]))
    rep = dec_check(geometry_profile(data))
    assert rep.holds and rep.worst_margin < 0


def test_difference_error_tracks_true_error():
    spec = FamilySpec("gaussian_blob", n=257)
    exact = geometry_profile(build_family(spec)).mu
    data = tabulate(build_family(spec))
    est = difference_error(data, lambda d: geometry_profile(d).mu)
    err = np.abs(geometry_profile(data).mu - exact)
    assert np.all(est[1:] >= err[1:])
    assert np.max(est) < 10 * np.max(err)
    assert not difference_error(build_family(spec), lambda d: geometry_profile(d).mu).any()


def test_subsample_keeps_both_ends():
    data = tabulate(build_family(FamilySpec("minkowski", n=34)))
    half = subsample(data)
    assert half.r[0] == 0.0 and half.r[-1] == data.r[-1]
    np.testing.assert_array_equal(half.r[:-1], data.r[::2])
