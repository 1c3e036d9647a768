"""Offloading and spectral-efficiency metrics: popularity models, cache
policy containers, the nearest-cacher rank mixture, ergodic rate tables,
and the coded-delivery per-fragment values."""

import numpy as np
import pytest
from scipy.integrate import quad

from cellcache import (
    UNCACHED,
    CodedCachePolicy,
    PopularityProfile,
    ProbCachePolicy,
    aese_coded,
    aese_prob,
    afot_coded,
    afot_prob,
    aggregate,
    cov_mf_closed_alpha4,
    coverage_profile,
    ese_coded_nomf,
    ese_coded_ozf,
    ese_prob,
    ese_rate,
    fot_coded_nomf,
    fot_coded_ozf,
    fot_prob,
    rate_table,
    zipf_popularity,
)

from conftest import mk_params


# ---------------------------------------------------------------------------
# popularity
# ---------------------------------------------------------------------------

def test_zipf_normalized_and_ordered():
    pop = zipf_popularity(50, 0.8)
    assert pop.p.shape == (50,)
    assert abs(pop.p.sum() - 1.0) < 1e-12
    assert np.all(np.diff(pop.p) <= 0)


def test_zipf_uniform_when_flat():
    pop = zipf_popularity(10, 0.0)
    assert np.allclose(pop.p, 0.1, atol=1e-15)


def test_zipf_power_law_shape():
    # p_n * n^delta is constant by construction
    pop = zipf_popularity(20, 0.7)
    scaled = pop.p * np.arange(1, 21) ** 0.7
    assert np.allclose(scaled, scaled[0], rtol=1e-12)


@pytest.mark.parametrize("kwargs", [
    dict(N=0, delta=0.5, p=np.array([])),
    dict(N=3, delta=-0.1, p=np.full(3, 1 / 3)),
    dict(N=3, delta=0.5, p=np.array([0.2, 0.3, 0.5])),      # increasing
    dict(N=3, delta=0.5, p=np.array([0.5, 0.3, 0.3])),      # sums to 1.1
    dict(N=3, delta=0.5, p=np.array([0.6, 0.4])),           # wrong length
])
def test_popularity_rejects_bad_input(kwargs):
    with pytest.raises(ValueError):
        PopularityProfile(**kwargs)


# ---------------------------------------------------------------------------
# policy containers
# ---------------------------------------------------------------------------

def test_prob_policy_load_is_sum():
    policy = ProbCachePolicy(np.array([0.2, 0.7, 1.0, 0.0]))
    assert abs(policy.cache_load - 1.9) < 1e-12


@pytest.mark.parametrize("a", [[-0.2, 0.5], [0.5, 1.3]])
def test_prob_policy_rejects_out_of_range(a):
    with pytest.raises(ValueError):
        ProbCachePolicy(np.array(a))


def test_coded_policy_load():
    policy = CodedCachePolicy(b=(1, 2, 2, UNCACHED, 3), K=3)
    assert abs(policy.cache_load - (1 + 0.5 + 0.5 + 1 / 3)) < 1e-12


@pytest.mark.parametrize("b", [(0,), (4,), (1.5,), ("2",)])
def test_coded_policy_rejects_bad_counts(b):
    with pytest.raises(ValueError):
        CodedCachePolicy(b=b, K=3)


# ---------------------------------------------------------------------------
# nearest-cacher mixture
# ---------------------------------------------------------------------------

def test_fot_prob_matches_direct_sum():
    values = np.array([0.8, 0.5, 0.2])
    a = 0.3
    expect = sum(a * (1 - a) ** k * values[k] for k in range(3))
    assert abs(fot_prob(a, values) - expect) < 1e-15


def test_fot_prob_extremes():
    values = (0.9, 0.4, 0.1)
    assert fot_prob(0.0, values) == 0.0
    # always cached: the nearest station always serves
    assert abs(fot_prob(1.0, values) - 0.9) < 1e-15


def test_fot_prob_accepts_coverage_profile():
    params = mk_params()
    profile = coverage_profile("mf", params)
    direct = fot_prob(0.4, profile.values)
    assert fot_prob(0.4, profile) == direct


def test_fot_prob_rejects_bad_probability():
    with pytest.raises(ValueError):
        fot_prob(1.2, (0.5, 0.2))


def test_ese_prob_same_mixture():
    rates = (3.0, 1.2, 0.6)
    a = 0.55
    assert abs(ese_prob(a, rates) - fot_prob(a, rates)) < 1e-15


def test_aggregate_is_popularity_dot():
    pop = zipf_popularity(4, 0.5)
    vals = np.array([0.9, 0.7, 0.2, 0.1])
    assert abs(aggregate(pop, vals) - float(pop.p @ vals)) < 1e-15
    with pytest.raises(ValueError):
        aggregate(pop, np.array([1.0, 2.0]))


def test_afot_prob_is_aggregated_mixture():
    pop = zipf_popularity(5, 0.9)
    policy = ProbCachePolicy(np.array([1.0, 0.8, 0.4, 0.1, 0.0]))
    values = (0.85, 0.4, 0.15)
    expect = sum(
        pop.p[n] * fot_prob(float(policy.a[n]), values) for n in range(5)
    )
    assert abs(afot_prob(policy, pop, values) - expect) < 1e-14
    assert abs(aese_prob(policy, pop, values) - expect) < 1e-14


# ---------------------------------------------------------------------------
# ergodic rate tables
# ---------------------------------------------------------------------------

# replayed from the table builder at lambda_b=1, alpha=4, L=K=3
FROZEN_RATES_ZF = (3.2059626792757, 1.2197284035142537, 0.5847062245884127)
FROZEN_RATES_MF_L1 = (
    2.1481542145867034, 0.3010816427988556, 0.12337963360305561)


def test_zf_rates_frozen():
    table = rate_table("zf", mk_params())
    assert table.rates == pytest.approx(FROZEN_RATES_ZF, rel=1e-9)
    assert table.fidelity == "exact"


def test_mf_single_antenna_rates_frozen():
    table = rate_table("mf", mk_params(L=1))
    assert table.rates == pytest.approx(FROZEN_RATES_MF_L1, rel=1e-9)


def test_mf_single_antenna_rate_against_quadrature():
    # int_0^inf P[log2(1+SIR) > x] dx with the closed-form coverage law
    oracle, err = quad(
        lambda x: cov_mf_closed_alpha4(1, 2.0 ** x - 1.0), 0.0, 60.0, limit=200,
    )
    assert err < 1e-6
    got = ese_rate(1, mk_params(L=1), scheme="mf")
    assert got == pytest.approx(oracle, abs=1e-4)


def test_rates_decrease_with_rank():
    for scheme in ("mf", "zf"):
        rates = rate_table(scheme, mk_params()).rates
        assert all(r > 0 for r in rates)
        assert all(rates[i] > rates[i + 1] for i in range(len(rates) - 1))


def test_rate_table_ignores_gamma_and_density():
    # rate integrals sweep the threshold themselves, and SIR is scale free
    base = rate_table("zf", mk_params()).rates
    assert rate_table("zf", mk_params(gamma=37.0)).rates == base
    assert rate_table("zf", mk_params(lambda_b=0.04)).rates == base


def test_rate_table_shapes():
    table = rate_table("mf", mk_params())
    assert table.coverage.shape == (3, len(table.xs))
    assert np.all(table.coverage[:, -1] < 1e-4)
    assert len(table.tail_bounds) == 3


def test_ese_rate_rank_checks():
    params = mk_params()
    assert ese_rate(2, params, scheme="zf") == rate_table("zf", params).rates[1]
    with pytest.raises(ValueError):
        ese_rate(0, params)
    with pytest.raises(ValueError):
        ese_rate(4, params)
    with pytest.raises(ValueError):
        rate_table("no-mf", params)          # needs the serving-set size


# ---------------------------------------------------------------------------
# coded delivery metrics
# ---------------------------------------------------------------------------

FROZEN_FOT_NOMF = (0.8650983304902826, 0.6361925825946046, 0.4265514607246929)
FROZEN_FOT_OZF = (0.727027001274056, 0.5685534342212066, 0.4376053895279483)
FROZEN_ESE_NOMF = (3.4591508622652256, 1.2669832656192554, 0.7057099887187439)
FROZEN_ESE_OZF = (3.2059626792757, 2.212845541394977, 1.670132435792789)


@pytest.mark.parametrize("b_n", [1, 2, 3])
def test_coded_fot_frozen(b_n):
    params = mk_params()
    assert fot_coded_nomf(b_n, params) == pytest.approx(
        FROZEN_FOT_NOMF[b_n - 1], rel=1e-7)
    assert fot_coded_ozf(b_n, params) == pytest.approx(
        FROZEN_FOT_OZF[b_n - 1], rel=1e-7)


@pytest.mark.parametrize("b_n", [1, 2, 3])
def test_coded_ese_frozen(b_n):
    params = mk_params()
    assert ese_coded_nomf(b_n, params) == pytest.approx(
        FROZEN_ESE_NOMF[b_n - 1], rel=1e-6)
    assert ese_coded_ozf(b_n, params) == pytest.approx(
        FROZEN_ESE_OZF[b_n - 1], rel=1e-6)


def test_single_fragment_reduces_to_rank_one():
    # one fragment at the nearest station is plain unicast
    params = mk_params()
    assert fot_coded_nomf(1, params) == pytest.approx(
        coverage_profile("mf", params).values[0], rel=1e-9)
    assert fot_coded_ozf(1, params) == pytest.approx(
        coverage_profile("zf", params).values[0], rel=1e-9)
    assert ese_coded_ozf(1, params) == pytest.approx(
        rate_table("zf", params).rates[0], rel=1e-12)


def test_uncached_file_contributes_nothing():
    params = mk_params()
    for fn in (fot_coded_nomf, fot_coded_ozf, ese_coded_nomf, ese_coded_ozf):
        assert fn(UNCACHED, params) == 0.0


def test_per_fragment_values_decrease_with_splitting():
    # splitting across more stations always costs offloading and rate
    assert FROZEN_FOT_NOMF[0] > FROZEN_FOT_NOMF[1] > FROZEN_FOT_NOMF[2]
    assert FROZEN_FOT_OZF[0] > FROZEN_FOT_OZF[1] > FROZEN_FOT_OZF[2]
    assert FROZEN_ESE_NOMF[0] > FROZEN_ESE_NOMF[1] > FROZEN_ESE_NOMF[2]
    assert FROZEN_ESE_OZF[0] > FROZEN_ESE_OZF[1] > FROZEN_ESE_OZF[2]


def test_ozf_serving_set_cannot_exceed_cluster():
    with pytest.raises(ValueError):
        fot_coded_ozf(4, mk_params())
    with pytest.raises(ValueError):
        ese_coded_ozf(4, mk_params())


def test_afot_coded_matches_manual_mixture():
    params = mk_params()
    pop = zipf_popularity(6, 0.5)
    policy = CodedCachePolicy(b=(1, 2, 2, 3, UNCACHED, UNCACHED), K=3)
    per_b = {b: fot_coded_nomf(b, params) for b in (1, 2, 3)}
    expect = sum(
        pop.p[n] * (0.0 if v is UNCACHED else per_b[v])
        for n, v in enumerate(policy.b)
    )
    got = afot_coded(policy, pop, params, "no-mf")
    assert got == pytest.approx(expect, rel=1e-12)


def test_aese_coded_matches_manual_mixture():
    params = mk_params()
    pop = zipf_popularity(5, 1.2)
    policy = CodedCachePolicy(b=(1, 1, 3, UNCACHED, 2), K=3)
    per_b = {b: ese_coded_ozf(b, params) for b in (1, 2, 3)}
    expect = sum(
        pop.p[n] * (0.0 if v is UNCACHED else per_b[v])
        for n, v in enumerate(policy.b)
    )
    got = aese_coded(policy, pop, params, "o-zf")
    assert got == pytest.approx(expect, rel=1e-12)


def test_coded_aggregate_rejects_unknown_delivery():
    pop = zipf_popularity(2, 0.5)
    policy = CodedCachePolicy(b=(1, 2), K=3)
    with pytest.raises(ValueError):
        afot_coded(policy, pop, mk_params(), "zf")
