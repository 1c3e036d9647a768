"""Effective-gain laws and explicit beamformer construction."""

import math

import numpy as np
import pytest
from scipy import stats

from cellcache.channel import (
    DESIRED,
    FAR_FIELD,
    INTRA_CLUSTER,
    SERVING_SET,
    GainModel,
    csi_quantization_zeta,
    gain_model,
    mf_beamformer,
    sample_effective_gain,
    sample_rayleigh,
    zf_beamformer,
)

from conftest import mk_params


# ---------------------------------------------------------------------------
# quantization factor
# ---------------------------------------------------------------------------

def test_zeta_frozen_values():
    # cross-checked against extended-precision evaluation of
    # 1 - 2^B Beta(2^B, L/(L-1))
    assert csi_quantization_zeta(20, 3) == pytest.approx(
        0.9991345443269852, rel=1e-12)
    assert csi_quantization_zeta(4, 3) == pytest.approx(
        0.7834723503103929, rel=1e-12)
    assert csi_quantization_zeta(20, 4) == pytest.approx(
        0.9912102855834788, abs=1e-10)


def test_zeta_monotone_and_bounded():
    values = [csi_quantization_zeta(B, 3) for B in range(1, 30)]
    assert all(0 < v < 1 for v in values)
    assert all(b > a for a, b in zip(values, values[1:]))
    # more antennas mean more directions to miss: zeta drops with L
    assert csi_quantization_zeta(10, 6) < csi_quantization_zeta(10, 2)
    with pytest.raises(ValueError):
        csi_quantization_zeta(10, 1)
    with pytest.raises(ValueError):
        csi_quantization_zeta(0, 3)


# ---------------------------------------------------------------------------
# gain-level laws
# ---------------------------------------------------------------------------

def test_gain_model_table():
    p = mk_params(L=4, K=3)
    assert gain_model("mf", DESIRED, p) == GainModel("mf", DESIRED, "gamma", 4, 1.0)
    assert gain_model("zf", DESIRED, p) == GainModel("zf", DESIRED, "gamma", 2, 1.0)
    assert gain_model("no-mf", DESIRED, p).shape == 4
    assert gain_model("no-mf", SERVING_SET, p) == GainModel(
        "no-mf", SERVING_SET, "gamma", 4, 1.0)
    assert gain_model("zf", INTRA_CLUSTER, p).kind == "nulled"
    assert gain_model("mf", INTRA_CLUSTER, p).kind == "exponential"
    assert gain_model("mf", FAR_FIELD, p) == GainModel(
        "mf", FAR_FIELD, "exponential", 1.0, 1.0)


def test_gain_model_quantized():
    p = mk_params(L=3, K=3, feedback_bits=4)
    zeta = csi_quantization_zeta(4, 3)
    assert gain_model("mf", DESIRED, p).scale == pytest.approx(zeta)
    leak = gain_model("zf", INTRA_CLUSTER, p)
    assert leak.kind == "exponential"
    assert leak.scale == pytest.approx(1.0 - zeta)


def test_gain_model_rejections():
    p = mk_params(L=2, K=3)
    with pytest.raises(ValueError):
        gain_model("zf", DESIRED, p)           # infeasible L < K
    with pytest.raises(ValueError):
        gain_model("mf", SERVING_SET, mk_params())
    with pytest.raises(ValueError):
        gain_model("bogus", DESIRED, mk_params())
    with pytest.raises(ValueError):
        GainModel("mf", DESIRED, "gamma", shape=-1.0)


def test_sample_effective_gain_moments(rng):
    model = gain_model("mf", DESIRED, mk_params(L=3))
    draws = sample_effective_gain(model, rng, size=100_000)
    se = math.sqrt(3.0 / draws.size)    # Gamma(3,1) variance is 3
    assert abs(draws.mean() - 3.0) <= 3 * se
    nulled = gain_model("zf", INTRA_CLUSTER, mk_params(L=3, K=3))
    assert np.all(sample_effective_gain(nulled, rng, size=16) == 0.0)


def test_far_interferer_is_unit_exponential(rng):
    model = gain_model("mf", FAR_FIELD, mk_params())
    draws = sample_effective_gain(model, rng, size=100_000)
    assert abs(draws.mean() - 1.0) <= 3 / math.sqrt(draws.size)


# ---------------------------------------------------------------------------
# construction level
# ---------------------------------------------------------------------------

def test_rayleigh_entry_variance(rng):
    h = sample_rayleigh(4, rng, size=25_000)
    # unit variance per complex entry, split evenly across re/im
    var = np.var(h.real) + np.var(h.imag)
    assert var == pytest.approx(1.0, abs=0.02)
    assert h.shape == (25_000, 4)


def test_mf_beamformer_gain(rng):
    h = sample_rayleigh(5, rng)
    w = mf_beamformer(h)
    assert np.linalg.norm(w) == pytest.approx(1.0, rel=1e-12)
    assert abs(h @ w) ** 2 == pytest.approx(
        float(np.linalg.norm(h) ** 2), rel=1e-12)


def test_zf_beamformer_nulls_and_feasibility(rng):
    L, K = 4, 3
    h = sample_rayleigh(L, rng)
    others = sample_rayleigh(L, rng, size=K - 1)
    w = zf_beamformer(h, others)
    assert np.linalg.norm(w) == pytest.approx(1.0, rel=1e-12)
    assert np.max(np.abs(others @ w)) < 1e-10
    with pytest.raises(ValueError):
        zf_beamformer(h, sample_rayleigh(L, rng, size=L))
    # no interference rows degenerates to the matched filter
    assert np.allclose(zf_beamformer(h, np.empty((0, L))), mf_beamformer(h))


def test_construction_matches_gain_laws(rng):
    # ||h||^2 for MF and the projected power for ZF follow the stated
    # Gamma laws; this is the cross-check the gain-level sampler leans on
    L, K, n = 4, 3, 4000
    h = sample_rayleigh(L, rng, size=n)
    mf_gain = np.array([abs(h[i] @ mf_beamformer(h[i])) ** 2 for i in range(n)])
    assert stats.kstest(mf_gain, "gamma", args=(L,)).pvalue > 0.01

    zf_gain = np.empty(n)
    for i in range(n):
        others = sample_rayleigh(L, rng, size=K - 1)
        w = zf_beamformer(h[i], others)
        zf_gain[i] = abs(h[i] @ w) ** 2
    assert stats.kstest(zf_gain, "gamma", args=(L - K + 1,)).pvalue > 0.01
