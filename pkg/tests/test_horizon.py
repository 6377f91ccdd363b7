import math

import numpy as np
import pytest

from collapse_kit.geometry import geometry_profile
from collapse_kit.horizon import contains_horizon, scan
from collapse_kit.radial_data import FamilySpec, build_family, tabulate

from conftest import CORPUS


def _scan(data):
    return scan(geometry_profile(data))


def test_pg_future_root_and_intervals():
    hs = _scan(build_family(CORPUS["painleve_gullstrand"]))
    assert [round(x.r, 12) for x in hs.future_roots] == [2.0]
    assert hs.past_roots == []
    assert hs.trapped_intervals[0].kind == "future"
    assert hs.untrapped_intervals[-1].kind == "expanding"
    assert hs.outermost == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("name", ["minkowski", "schwarzschild_ts", "constant_density_star", "gaussian_blob"])
def test_horizon_free_members(name):
    hs = _scan(build_family(CORPUS[name]))
    assert hs.horizon_free
    assert [x.kind for x in hs.untrapped_intervals] == ["expanding"]


def test_uniform_collapse_root_at_half():
    for data in (build_family(CORPUS["uniform_collapse"]), tabulate(build_family(CORPUS["uniform_collapse"]))):
        hs = _scan(data)
        assert hs.outermost_future == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("k0", [1.5, 2.5, 3.3])
def test_tabulated_root_within_cell(k0):
    # theta+ = 2/r - 2k0 is not a cubic, so the root carries an O(h^4) error
    data = tabulate(build_family(FamilySpec("uniform_collapse", {"k0": k0})))
    root = _scan(data).future_roots[0]
    lo, hi = root.bracket
    assert lo <= 1.0 / k0 <= hi
    assert root.r == pytest.approx(1.0 / k0, abs=1e-8)


def test_contains_horizon():
    hs = _scan(build_family(CORPUS["painleve_gullstrand"]))
    assert not contains_horizon(hs, 1.9)
    assert contains_horizon(hs, 2.0)
    with pytest.raises(ValueError):
        contains_horizon(hs, 11.0)


def test_to_dict_is_json_ready():
    import json

    d = _scan(build_family(CORPUS["uniform_collapse"])).to_dict()
    assert json.loads(json.dumps(d))["outermost"]["future"] == pytest.approx(0.5)


def test_pg_past_root_for_time_reversed_slice():
    data = build_family(CORPUS["painleve_gullstrand"])
    flipped = data.with_k(
        *(type(f)(lambda r, f=f: -f.f(r), lambda r, f=f: -f.d1(r), lambda r, f=f: -f.d2(r), f.units)
          for f in (data.ka, data.kb))
    )
    hs = _scan(flipped)
    assert hs.future_roots == []
    assert hs.outermost_past == pytest.approx(2.0, abs=1e-12)
    assert math.isclose(hs.outermost, 2.0)
    assert np.all([x.kind == "past" for x in hs.trapped_intervals])
