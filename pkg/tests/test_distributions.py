import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndevoi.distributions import Exponential, Lognormal, Normal, Uniform, effective_support, from_dict
from ndevoi.quadrature import integrate

dists = st.one_of(
    st.builds(Exponential, st.floats(1e-3, 10.0)),
    st.builds(Normal, st.floats(-5.0, 5.0), st.floats(0.01, 3.0)),
    st.builds(Lognormal, st.floats(-5.0, 2.0), st.floats(0.1, 2.0)),
    st.tuples(st.floats(-5.0, 5.0), st.floats(0.01, 5.0)).map(lambda t: Uniform(t[0], t[0] + t[1])),
)


@given(dists)
def test_pdf_integrates_to_one(d):
    mid = float(d.quantile(0.5))
    assert integrate(d.pdf, d.support, breakpoints=[mid]) == pytest.approx(1.0, abs=1e-8)


@given(dists, st.floats(1e-6, 1 - 1e-6))
def test_quantile_inverts_cdf(d, p):
    assert float(d.cdf(d.quantile(p))) == pytest.approx(p, rel=1e-8, abs=1e-12)


@given(dists, st.floats(1e-12, 0.5))
def test_isf_inverts_sf(d, q):
    assert float(d.sf(d.isf(q))) == pytest.approx(q, rel=1e-7, abs=1e-14)


@given(dists, st.floats(-10.0, 10.0))
def test_cdf_plus_sf_is_one(d, x):
    assert float(d.cdf(x) + d.sf(x)) == pytest.approx(1.0, abs=1e-14)


@given(dists, st.floats(-10.0, 10.0))
def test_logpdf_matches_pdf(d, x):
    p = float(d.pdf(x))
    lp = float(d.logpdf(x))
    if p > 1e-300:
        assert lp == pytest.approx(math.log(p), rel=1e-10, abs=1e-12)
    else:
        assert lp < -690 or lp == -math.inf


@given(dists)
def test_dict_round_trip(d):
    e = from_dict(d.to_dict())
    assert type(e) is type(d)
    xs = np.linspace(-3, 3, 13)
    assert np.array_equal(e.cdf(xs), d.cdf(xs))


def test_effective_support_is_finite():
    iv = effective_support(Exponential(0.03))
    assert iv.lo == 0.0 and math.isfinite(iv.hi)
    assert Exponential(0.03).sf(iv.hi) == pytest.approx(1e-12, rel=1e-6)


def test_array_parameters_broadcast():
    d = Lognormal(np.log(np.array([1.0, 2.0])), 1.0)
    assert d.cdf(np.array([1.0, 2.0])) == pytest.approx([0.5, 0.5])


@pytest.mark.parametrize(
    "record",
    [{"kind": "gamma", "a": 1}, {"kind": "normal", "mu": 0.0}, {"kind": "exponential", "mean": -1.0}],
)
def test_bad_records_raise(record):
    with pytest.raises((KeyError, ValueError)):
        from_dict(record)
