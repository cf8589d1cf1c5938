import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndevoi.errors import NonFiniteIntegrand
from ndevoi.quadrature import Interval, QuadSettings, find_roots, integrate, minimize_scalar


@pytest.mark.parametrize(
    "f, dom, exact",
    [
        (lambda x: x**2, Interval(0.0, 3.0), 9.0),
        (lambda x: np.exp(-x), Interval(0.0, math.inf), 1.0),
        (lambda x: np.exp(-0.5 * x * x), Interval(-math.inf, math.inf), math.sqrt(2 * math.pi)),
        (lambda x: 1.0 / (1.0 + x * x), Interval(-math.inf, 0.0), math.pi / 2),
        (lambda x: 1.0 / np.sqrt(x), Interval(0.0, 1.0), 2.0),
    ],
)
def test_known_integrals(f, dom, exact):
    assert integrate(f, dom) == pytest.approx(exact, rel=1e-8)


def test_vector_valued_integrand():
    out = integrate(lambda x: np.stack([x, x**2], axis=-1), Interval(0.0, 1.0))
    assert np.allclose(out, [0.5, 1.0 / 3.0], rtol=1e-10)


def test_breakpoints_handle_kinks():
    f = lambda x: np.abs(x - 0.3137)  # noqa: E731
    exact = (0.3137**2 + 0.6863**2) / 2
    assert integrate(f, Interval(0.0, 1.0), breakpoints=[0.3137]) == pytest.approx(exact, rel=1e-12)


def test_step_function_with_breakpoint_is_exact():
    f = lambda x: np.where(x < 0.2, 1.0, 3.0)  # noqa: E731
    assert integrate(f, Interval(0.0, 1.0), breakpoints=[0.2]) == pytest.approx(0.2 + 2.4, rel=1e-13)


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFiniteIntegrand):
        integrate(lambda x: np.full_like(x, np.nan), Interval(0.0, 1.0))


def test_settings_validate():
    with pytest.raises(ValueError):
        QuadSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)


@given(st.floats(0.05, 5.0), st.floats(-3.0, 3.0))
def test_gaussian_mass_property(sigma, mu):
    f = lambda x: np.exp(-0.5 * ((x - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))  # noqa: E731
    assert integrate(f, Interval(-math.inf, math.inf), breakpoints=[mu]) == pytest.approx(1.0, abs=1e-9)


@given(st.lists(st.floats(-0.9, 0.9), min_size=1, max_size=4, unique=True))
def test_find_roots_recovers_polynomial_roots(roots):
    roots = sorted(roots)
    if min(np.diff(roots), default=1.0) < 0.01:
        return
    f = lambda x: np.prod([np.asarray(x) - r for r in roots], axis=0)  # noqa: E731
    found = find_roots(f, Interval(-1.0, 1.0), 2001, vectorized=True)
    assert len(found) == len(roots)
    assert np.allclose(found, roots, atol=1e-10)


def test_find_roots_log_scale():
    found = find_roots(lambda x: np.log(x) - np.log(3e-3), Interval(1e-6, 10.0), 501, scale="log", vectorized=True)
    assert found == pytest.approx([3e-3], rel=1e-9)


@given(st.floats(-2.0, 2.0))
def test_minimize_quadratic(c):
    x, v = minimize_scalar(lambda x: (x - c) ** 2 + 1.0, Interval(-3.0, 3.0), 101, vectorized=True)
    assert x == pytest.approx(c, abs=1e-6)
    assert v == pytest.approx(1.0, abs=1e-10)
