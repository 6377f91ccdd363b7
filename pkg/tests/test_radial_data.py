import json

import numpy as np
import pytest

from collapse_kit.radial_data import (
    DataError,
    FamilySpec,
    build_family,
    derivative,
    load_data,
    loads_data,
    make_grid,
    refine,
    save_data,
    tabulate,
    validate,
)

from conftest import CORPUS


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_members_validate(name):
    data = build_family(CORPUS[name])
    assert validate(data) == []
    assert validate(tabulate(data)) == []


def test_grid_errors():
    with pytest.raises(DataError, match="at least"):
        make_grid("ball", 8, 0.0, 1.0)
    with pytest.raises(DataError, match="start at r=0"):
        make_grid("ball", 32, 0.1, 1.0)
    with pytest.raises(DataError, match="r_min > 0"):
        make_grid("annulus", 32, 0.0, 1.0)
    with pytest.raises(DataError, match="spacing"):
        make_grid("ball", 32, 0.0, 1.0, spacing="log")


def test_geometric_grid_ends_and_growth():
    g = make_grid("annulus", 40, 1.0, 5.0, spacing="geometric", stretch=1.05)
    assert g.r[0] == 1.0 and g.r[-1] == 5.0
    d = np.diff(g.r)
    np.testing.assert_allclose(d[1:] / d[:-1], 1.05)
    assert not g.uniform


def test_family_errors():
    with pytest.raises(DataError, match="unknown family"):
        FamilySpec("kerr")
    with pytest.raises(DataError, match="no parameter"):
        FamilySpec("minkowski", {"mass": 1.0})
    with pytest.raises(DataError, match="2m"):
        build_family(FamilySpec("schwarzschild_ts", r_min=1.5))
    with pytest.raises(DataError, match="annulus"):
        build_family(FamilySpec("painleve_gullstrand", r_min=0.0))
    with pytest.raises(DataError, match="must be positive"):
        build_family(FamilySpec("gaussian_blob", {"width": -1.0}))


def test_aliases_resolve():
    assert FamilySpec("pg").name == "painleve_gullstrand"
    assert FamilySpec("star").name == "constant_density_star"


@pytest.mark.parametrize("name", ["schwarzschild_ts", "gaussian_blob", "constant_density_star"])
def test_analytic_derivatives_match_differences(name):
    data = build_family(FamilySpec(name, n=2049))
    tab = tabulate(data)
    r = data.r
    # stay clear of the star surface, where g11' jumps
    keep = np.abs(r - 5.0) > 0.1
    for fld in ("g11", "rho"):
        exact = data.sample(fld, 1)
        fd = tab.sample(fld, 1)
        assert np.max(np.abs(exact - fd)[keep]) < 2e-4 * max(1.0, np.max(np.abs(exact)))


def test_derivative_of_derived_samples():
    data = tabulate(build_family(FamilySpec("minkowski", n=65)))
    out = derivative(data, data.r**2)
    np.testing.assert_allclose(out.samples, 2.0 * data.r, atol=1e-12)
    with pytest.raises(DataError):
        derivative(data, "rho", order=3)


def test_refine_keeps_nodes_and_is_accurate():
    data = tabulate(build_family(FamilySpec("gaussian_blob", n=65)))
    fine = refine(data, 2)
    assert len(fine.r) == 129
    np.testing.assert_array_equal(fine.r[::2], data.r)
    np.testing.assert_array_equal(fine.sample("g11")[::2], data.sample("g11"))
    exact = build_family(FamilySpec("gaussian_blob", n=129)).sample("g11")
    assert np.max(np.abs(fine.sample("g11") - exact)) < 1e-6


def test_roundtrip_is_exact(tmp_path):
    data = build_family(FamilySpec("uniform_collapse", n=33))
    path = tmp_path / "d.json"
    save_data(data, path)
    back = load_data(path)
    assert back.is_tabulated and back.family == data.family
    for name in ("g11", "rho", "ka", "kb"):
        np.testing.assert_array_equal(back.sample(name), data.sample(name))
    save_data(back, tmp_path / "e.json")
    assert (tmp_path / "e.json").read_bytes() == path.read_bytes()


def test_loader_rejects_bad_documents(tmp_path):
    data = build_family(FamilySpec("minkowski", n=17))
    save_data(data, tmp_path / "d.json")
    doc = json.loads((tmp_path / "d.json").read_text())
    bad = dict(doc, schema="other/v0")
    with pytest.raises(DataError, match="schema"):
        loads_data(json.dumps(bad))
    bad = dict(doc, fields={**doc["fields"], "ka": doc["fields"]["ka"][:-1]})
    with pytest.raises(DataError, match="samples"):
        loads_data(json.dumps(bad))
    bad = dict(doc, grid=doc["grid"][::-1])
    with pytest.raises(DataError, match="increasing"):
        loads_data(json.dumps(bad))
    with pytest.raises(DataError, match="JSON"):
        loads_data("{")


def test_validate_flags_bad_center():
    data = tabulate(build_family(FamilySpec("minkowski", n=33)))
    from collapse_kit.radial_data import InitialData, TabulatedField

    g = data.sample("g11").copy()
    g[0] = 2.0
    bad = InitialData(data.grid, TabulatedField(g), data.rho, data.ka, data.kb)
    assert [v.check for v in validate(bad)] == ["center"]
