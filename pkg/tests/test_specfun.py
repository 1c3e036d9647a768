"""Quadrature kernels against extended-precision references."""

import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellcache.specfun import (
    QuadratureSpec,
    alzer_eta,
    complementary_incomplete_beta,
    incomplete_beta,
    tail_integral_A,
)

mpmath.mp.dps = 40


def beta_ref(x, y, lo, hi):
    return float(mpmath.quad(
        lambda u: u ** (x - 1) * (1 - u) ** (y - 1), [lo, hi]))


# ---------------------------------------------------------------------------
# incomplete beta
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("x,y,z", [
    (0.5, 0.5, 0.3),
    (0.5, -0.5, 0.9),          # negative second exponent, z < 1
    (2.0, 3.0, 1.0),
    (0.5, 3.5, 0.5),
    (1.5, -1.5, 0.999),
    (0.5, 2.0, 1e-12),         # hard against the u = 0 singularity
])
def test_incomplete_beta_matches_reference(x, y, z):
    ref = beta_ref(x, y, 0.0, z)
    val = incomplete_beta(x, y, z)
    assert val == pytest.approx(ref, rel=1e-9, abs=1e-30)


@pytest.mark.parametrize("x,y,z", [
    (0.5, 0.5, 0.3),
    (2.0, 3.0, 0.0),
    (0.5, 0.25, 0.9999),       # integrable singularity at u = 1
    (3.0, 1.5, 0.5),
])
def test_complementary_beta_matches_reference(x, y, z):
    # betainc instead of raw quadrature: the endpoint singularity at u = 1
    # blows up numerically even though the integral is finite
    ref = float(mpmath.betainc(x, y, z, 1))
    val = complementary_incomplete_beta(x, y, z)
    assert val == pytest.approx(ref, rel=1e-9)


def test_beta_split_is_consistent():
    # lower + upper pieces reassemble the full integral
    x, y = 0.7, 1.3
    total = incomplete_beta(x, y, 1.0)
    for z in (0.1, 0.5, 0.9):
        parts = incomplete_beta(x, y, z) + complementary_incomplete_beta(x, y, z)
        assert parts == pytest.approx(total, rel=1e-10)


def test_beta_rejects_bad_arguments():
    with pytest.raises(ValueError):
        incomplete_beta(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        incomplete_beta(1.0, -1.0, 1.0)   # non-integrable at u = 1
    with pytest.raises(ValueError):
        incomplete_beta(1.0, 1.0, 1.5)
    with pytest.raises(ValueError):
        complementary_incomplete_beta(1.0, -0.5, 0.5)


@given(
    x=st.floats(0.2, 4.0),
    y=st.floats(0.2, 4.0),
    z1=st.floats(0.0, 1.0),
    z2=st.floats(0.0, 1.0),
)
@settings(max_examples=60, deadline=None)
def test_beta_monotone_in_upper_limit(x, y, z1, z2):
    lo, hi = sorted((z1, z2))
    assert incomplete_beta(x, y, hi) >= incomplete_beta(x, y, lo) - 1e-12


# ---------------------------------------------------------------------------
# interference tail integral
# ---------------------------------------------------------------------------

def test_tail_integral_alpha4_closed_form():
    for x in (0.0, 0.3, 1.0, 7.5):
        assert tail_integral_A(x, 4.0) == pytest.approx(
            math.pi / 2 - math.atan(x), rel=1e-14)


@pytest.mark.parametrize("alpha", [2.5, 3.0, 3.7, 4.0, 5.0])
@pytest.mark.parametrize("x", [0.0, 0.05, 1.0, 12.0])
def test_tail_integral_matches_reference(alpha, x):
    ref = float(mpmath.quad(lambda u: 1 / (1 + u ** (alpha / 2)),
                            [x, mpmath.inf]))
    assert tail_integral_A(x, alpha) == pytest.approx(ref, rel=1e-8)


def test_tail_integral_rejects_divergent_exponent():
    with pytest.raises(ValueError):
        tail_integral_A(1.0, 2.0)
    with pytest.raises(ValueError):
        tail_integral_A(-0.1, 4.0)


@given(x1=st.floats(0.0, 50.0), x2=st.floats(0.0, 50.0),
       alpha=st.floats(2.2, 6.0))
@settings(max_examples=60, deadline=None)
def test_tail_integral_nonincreasing(x1, x2, alpha):
    lo, hi = sorted((x1, x2))
    assert tail_integral_A(hi, alpha) <= tail_integral_A(lo, alpha) + 1e-10


# ---------------------------------------------------------------------------
# sandwich constant
# ---------------------------------------------------------------------------

def test_alzer_eta_values():
    assert alzer_eta(1) == pytest.approx(1.0, abs=1e-15)
    assert alzer_eta(2) == pytest.approx(2.0 ** -0.5, rel=1e-14)
    assert alzer_eta(3) == pytest.approx(6.0 ** (-1.0 / 3.0), rel=1e-14)
    # decreasing in m, always in (0, 1]
    values = [alzer_eta(m) for m in range(1, 12)]
    assert all(0 < b < a <= 1.0 for a, b in zip(values, values[1:]))


def test_quadrature_spec_tightening_converges():
    # tightening the tolerance must not move an already-converged value
    loose = QuadratureSpec(relative_tolerance=1e-6)
    tight = QuadratureSpec(relative_tolerance=1e-11)
    a = incomplete_beta(0.5, -0.5, 0.99, loose)
    b = incomplete_beta(0.5, -0.5, 0.99, tight)
    assert a == pytest.approx(b, rel=1e-6)
    with pytest.raises(ValueError):
        QuadratureSpec(relative_tolerance=0.0)
