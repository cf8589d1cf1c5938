import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndevoi.bayes import (
    A0,
    AR,
    BinaryPrior,
    FailureModel,
    binary_compatibility,
    expect,
    log_expect_binary,
    lognormal_cdf_failure,
    posterior,
    posterior_failure,
)
from ndevoi.distributions import Exponential
from ndevoi.errors import ZeroEvidence
from ndevoi.nde_models import lognormal_polynomial_base

PRIOR = Exponential(0.03)
FM = lognormal_cdf_failure(1e-5, 0.1, 1.0, 1e-4)
BASE = lognormal_polynomial_base([2.0, 1.0, 0.0, 1e-2 * math.exp(-0.5)], 1.0)


@given(st.floats(1e-4, 2.0))
def test_continuous_posterior_has_unit_mass(s):
    post = posterior(PRIOR, lambda x: BASE.pdf(s, x))
    assert post.total_mass() == pytest.approx(1.0, abs=1e-7)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_binary_posterior_bayes_rule(p1, l0, l1):
    prior = BinaryPrior(p1)
    ev = (1 - p1) * l0 + p1 * l1
    if ev < 1e-250:
        with pytest.raises(ZeroEvidence):
            posterior(prior, lambda t: np.where(t > 0.5, l1, l0))
        return
    post = posterior(prior, lambda t: np.where(t > 0.5, l1, l0))
    assert post.p1 == pytest.approx(p1 * l1 / ev, rel=1e-12, abs=1e-300)
    assert post.total_mass() == pytest.approx(1.0, rel=1e-12)


def test_prior_failure_probability():
    pf = posterior_failure(PRIOR, lambda t: np.ones_like(t), FM, A0)
    assert pf == pytest.approx(1.2e-3, abs=1e-4)
    assert FM(0.5, AR) == pytest.approx(1e-4)


@given(st.floats(0.02, 0.3))
def test_binary_compatibility_preserves_prior_failure(x_th):
    # averaging the binary table with Pr(Y) recovers the continuous prior value
    p1, table = binary_compatibility(PRIOR, FM, x_th)
    cont = float(expect(PRIOR, lambda x: FM(x, A0), breakpoints=FM.breakpoints))
    binary = (1 - p1) * table(0.0, A0) + p1 * table(1.0, A0)
    assert binary == pytest.approx(cont, rel=1e-7)
    assert table(1.0, A0) > table(0.0, A0)


def test_binary_failure_table_lookup():
    fm = FailureModel.binary({A0: (0.0, 1.0), AR: (0.0, 0.0)})
    assert fm.is_binary
    assert np.array_equal(fm(np.array([0.0, 1.0]), A0), [0.0, 1.0])


@given(st.floats(0.0, 1.0), st.floats(-800.0, 5.0), st.floats(-800.0, 5.0))
def test_log_expect_binary_matches_direct(p1, a, b):
    prior = BinaryPrior(p1)
    got = float(log_expect_binary(prior, np.array([a, b])))
    direct = (1 - p1) * math.exp(a) + p1 * math.exp(b)
    if direct > 1e-300:
        assert got == pytest.approx(math.log(direct), rel=1e-10, abs=1e-10)
    else:
        assert got < -680


def test_binary_prior_validates():
    with pytest.raises(ValueError):
        BinaryPrior(1.5)
