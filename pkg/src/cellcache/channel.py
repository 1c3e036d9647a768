"""Rayleigh channels, beamformer construction, and effective-gain laws.

Two fidelities are exposed.  Construction-level functions build explicit
matched-filter / zero-forcing beamformers from sampled channel vectors and
are used to validate the distribution claims.  Gain-level sampling draws the
induced Gamma/Exponential effective gains directly and is what the large
Monte Carlo runs use; the SIR formulas are written in gain-level terms.

Limited feedback with B bits is modeled at the gain-distribution level only:
the quantization loss factor zeta shrinks the desired-gain scale to zeta and,
under zero-forcing, leaks residual intra-cluster interference with mean
1 - zeta per co-scheduled station.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import NetworkParams

# effective-gain roles
DESIRED = "desired"
INTRA_CLUSTER = "intra-cluster-interferer"
SERVING_SET = "serving-set-interferer"
FAR_FIELD = "far-interferer"

_SCHEMES = ("mf", "zf", "no-mf")
_ROLES = (DESIRED, INTRA_CLUSTER, SERVING_SET, FAR_FIELD)

#: ZF nulling residual tolerance (construction-level)
NULLING_TOL = 1e-10


@dataclass(frozen=True)
class GainModel:
    """Distribution of one effective channel gain |h w|^2.

    kind is "gamma" (parameters shape, scale) or "exponential" (parameter
    scale = mean); "nulled" marks a gain that is identically zero.
    """

    scheme: str
    role: str
    kind: str
    shape: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.role not in _ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.kind not in ("gamma", "exponential", "nulled"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind != "nulled" and (self.shape <= 0 or self.scale <= 0):
            raise ValueError("gain shape/scale must be strictly positive")

    @property
    def mean(self) -> float:
        if self.kind == "nulled":
            return 0.0
        if self.kind == "exponential":
            return self.scale
        return self.shape * self.scale


def csi_quantization_zeta(B: int, L: int) -> float:
    """Quantization gain factor zeta = 1 - 2^B * Beta(2^B, L/(L-1)).

    Evaluated through log-gamma so large codebooks (B up to ~40) do not
    overflow.  Undefined for single-antenna stations: direction feedback
    carries no information at L = 1.
    """
    if L < 2:
        raise ValueError(f"csi_quantization_zeta requires L >= 2, got L={L}")
    if B < 1:
        raise ValueError(f"csi_quantization_zeta requires B >= 1, got B={B}")
    n = 2.0 ** B
    frac = L / (L - 1.0)
    log_beta = math.lgamma(n) + math.lgamma(frac) - math.lgamma(n + frac)
    return 1.0 - math.exp(B * math.log(2.0) + log_beta)


def gain_model(scheme: str, role: str, params: NetworkParams) -> GainModel:
    """Effective-gain law for one (scheme, role) pair under params.

    Perfect CSI:
        mf desired Gamma(L,1); zf desired Gamma(L-K+1,1); no-mf desired
        Gamma(L,1); serving-set interferers Gamma(L,1) (they beamform at
        the typical user too); zf intra-cluster nulled; everything else
        Exponential(1).
    Quantized CSI (B bits): desired scale shrinks to zeta; zf intra-cluster
        becomes Exponential(mean 1-zeta).
    """
    scheme = scheme.lower()
    if scheme not in _SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if scheme == "zf":
        params.require_zf_feasible()
    zeta = 1.0
    if params.quantized:
        zeta = csi_quantization_zeta(params.feedback_bits, params.L)

    if role == DESIRED:
        shape = params.L if scheme in ("mf", "no-mf") else params.L - params.K + 1
        return GainModel(scheme, role, "gamma", shape=shape, scale=zeta)
    if role == SERVING_SET:
        if scheme != "no-mf":
            raise ValueError("serving-set interferers exist only under no-mf")
        return GainModel(scheme, role, "gamma", shape=params.L, scale=1.0)
    if role == INTRA_CLUSTER:
        if scheme == "zf":
            if params.quantized:
                return GainModel(scheme, role, "exponential", scale=1.0 - zeta)
            return GainModel(scheme, role, "nulled")
        return GainModel(scheme, role, "exponential", scale=1.0)
    if role == FAR_FIELD:
        return GainModel(scheme, role, "exponential", scale=1.0)
    raise ValueError(f"unknown role {role!r}")


def sample_effective_gain(model: GainModel, rng: np.random.Generator,
                          size=None) -> np.ndarray | float:
    """Draw effective gains from a GainModel."""
    if model.kind == "nulled":
        return np.zeros(size) if size is not None else 0.0
    if model.kind == "exponential":
        return rng.exponential(model.scale, size=size)
    return rng.gamma(model.shape, model.scale, size=size)


# ---------------------------------------------------------------------------
# construction level
# ---------------------------------------------------------------------------

def sample_rayleigh(L: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """i.i.d. circularly-symmetric complex Gaussian channel rows, unit
    variance per entry; shape (L,) or (*size, L)."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    shape = (L,) if size is None else tuple(np.atleast_1d(size)) + (L,)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / math.sqrt(2.0)


def mf_beamformer(h: np.ndarray) -> np.ndarray:
    """Matched filter w = h^H / ||h||, so |h w|^2 = ||h||^2."""
    h = np.asarray(h).reshape(-1)
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValueError("matched filter undefined for the zero channel")
    return h.conj() / norm


def zf_beamformer(h_target: np.ndarray, H_others: np.ndarray) -> np.ndarray:
    """Zero-forcing beamformer: unit vector maximizing |h_target w| subject
    to H_others w = 0 (each co-scheduled user's channel row nulled).

    Implemented by orthonormalizing the conjugated interference rows and
    projecting the matched filter onto their complement; stabler than
    forming normal equations, and exact at these tiny dimensions.
    """
    h = np.asarray(h_target).reshape(-1)
    L = h.size
    H = np.asarray(H_others).reshape(-1, L) if np.size(H_others) else np.empty((0, L))
    if H.shape[0] == 0:
        return mf_beamformer(h)
    if H.shape[0] >= L:
        raise ValueError(
            f"zero-forcing infeasible: {H.shape[0]} rows to null with L={L} antennas"
        )
    q, _ = np.linalg.qr(H.conj().T)          # basis of span{conj(rows)}
    u = h.conj() - q @ (q.conj().T @ h.conj())
    norm = np.linalg.norm(u)
    if norm < 1e-12:
        raise ValueError("zero-forcing projector numerically singular")
    w = u / norm
    residual = np.max(np.abs(H @ w))
    if residual > NULLING_TOL:
        raise ValueError(f"nulling residual {residual:.2e} exceeds {NULLING_TOL}")
    return w
