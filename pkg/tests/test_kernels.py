import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collapse_kit import _pykernels, kernels

BACKENDS = kernels.backends()


def _grid(n=33, stretch=None):
    if stretch is None:
        return np.linspace(0.0, 2.0, n)
    q = stretch ** np.arange(n)
    return 2.0 * (q - 1.0) / (q[-1] - 1.0)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("stretch", [None, 1.05])
def test_differences_exact_on_quadratics(name, stretch):
    impl = BACKENDS[name]
    x = _grid(stretch=stretch)
    y = 3.0 - 2.0 * x + 0.5 * x**2
    np.testing.assert_allclose(impl.diff1(x, y), -2.0 + x, atol=1e-11)
    np.testing.assert_allclose(impl.diff2(x, y), np.ones_like(x), atol=1e-8)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_cumsimpson_exact_on_quadratics(name):
    x = _grid(34)
    y = 1.0 + x - x**2
    want = x + x**2 / 2 - x**3 / 3
    np.testing.assert_allclose(BACKENDS[name].cumsimpson(x, y), want, atol=1e-13)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_cumtrapz_and_running_min(name):
    impl = BACKENDS[name]
    x = _grid()
    np.testing.assert_allclose(impl.cumtrapz(x, 2.0 * x), x**2, atol=1e-13)
    y = np.array([3.0, 1.0, 2.0, 0.5, 4.0])
    np.testing.assert_array_equal(impl.running_min(y), [3.0, 1.0, 1.0, 0.5, 0.5])


def test_fd_weights_match_textbook_stencils():
    np.testing.assert_allclose(_pykernels.fd_weights(0.0, np.array([-1.0, 0.0, 1.0]), 1),
                               [-0.5, 0.0, 0.5])
    np.testing.assert_allclose(_pykernels.fd_weights(0.0, np.array([-1.0, 0.0, 1.0]), 2),
                               [1.0, -2.0, 1.0])


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")
@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=17, max_size=60),
       st.floats(1.0, 1.2))
def test_backend_parity(values, stretch):
    y = np.array(values)
    q = stretch ** np.arange(len(y))
    x = np.linspace(0.0, 1.0, len(y)) if stretch == 1.0 else (q - 1.0) / (q[-1] - 1.0)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    np.testing.assert_array_equal(py.running_min(y), cy.running_min(y))
    for fn in ("diff1", "diff2", "cumtrapz"):
        a, b = getattr(py, fn)(x, y), getattr(cy, fn)(x, y)
        scale = max(1.0, np.max(np.abs(a)))
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-9 * scale, err_msg=fn)
    u = np.linspace(0.0, 1.0, len(y))
    np.testing.assert_allclose(py.cumsimpson(u, y), cy.cumsimpson(u, y), atol=1e-12 * (1 + np.abs(y).sum()))


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")
def test_jang_backend_parity():
    from collapse_kit.radial_data import FamilySpec, build_family, tabulate

    data = tabulate(build_family(FamilySpec("painleve_gullstrand", r_min=3.0, n=65)))
    p = data.primitives()
    fields = np.vstack([p[k] for k in ("g11", "g11_r", "rho", "rho_r", "rho_rr", "ka", "kb")])
    v0 = -np.sqrt(2.0 / 3.0)
    args = (data.r, fields, 0, 3.0, v0, 0.0, 1e-9, 1e-12, 1e-6)
    a = BACKENDS["python"].jang_tabulated(*args)
    b = BACKENDS["cython"].jang_tabulated(*args)
    assert a[2:4] == b[2:4]
    np.testing.assert_allclose(a[0], b[0], atol=1e-12)
    np.testing.assert_allclose(a[1], b[1], atol=1e-12)


def test_backend_flag_is_reported():
    assert kernels.BACKEND in BACKENDS
