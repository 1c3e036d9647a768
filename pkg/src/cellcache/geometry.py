"""Poisson network geometry around a typical user at the origin.

Provides:
    * NetworkParams -- validated record of all physical-layer scalars
    * Realization -- one sampled network, stored as sorted distances
    * sample_realization -- homogeneous-PPP sampling on a disc window
    * kth_distance_pdf / joint_kK_pdf / delta_ratio_pdf -- ordered-distance
      densities used by the analytical coverage expressions
    * default_window_radius / truncation_bound -- finite-window bookkeeping

Distances, not coordinates, are the canonical representation: the isotropic
model makes angles irrelevant for the signal-to-interference ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: sentinel for perfect channel-state information (no feedback quantization)
PERFECT_CSI = None

#: default expected point count per cluster slot, lambda_b*pi*R^2 = WINDOW_FILL*K
WINDOW_FILL = 30.0


@dataclass(frozen=True)
class NetworkParams:
    """Physical-layer parameters of the cached small-cell downlink.

    Attributes:
        lambda_b: base-station density (points per unit area), > 0.
        alpha: path-loss exponent, > 2 so interference has finite mean.
        L: transmit antennas per base station, >= 1.
        K: cluster size (number of nearest stations forming the user's
           cooperation cluster), >= 2.
        gamma: SIR threshold, linear scale, > 0.
        feedback_bits: PERFECT_CSI for exact channel knowledge, or the
           positive number of limited-feedback bits B.
    """

    lambda_b: float
    alpha: float
    L: int
    K: int
    gamma: float
    feedback_bits: int | None = PERFECT_CSI

    def __post_init__(self) -> None:
        if self.lambda_b <= 0:
            raise ValueError(f"lambda_b must be > 0, got {self.lambda_b}")
        if self.alpha <= 2:
            raise ValueError(f"alpha must be > 2, got {self.alpha}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0 (linear), got {self.gamma}")
        if self.feedback_bits is not None and self.feedback_bits < 1:
            raise ValueError(
                f"feedback_bits must be PERFECT_CSI or >= 1, got {self.feedback_bits}"
            )

    @property
    def quantized(self) -> bool:
        return self.feedback_bits is not None

    def require_zf_feasible(self) -> None:
        """Zero-forcing needs at least as many antennas as cluster users."""
        if self.L < self.K:
            raise ValueError(
                f"zero-forcing requires L >= K, got L={self.L}, K={self.K}"
            )


@dataclass(frozen=True)
class Realization:
    """One sampled network: sorted distances from the origin plus window info.

    resamples counts how many draws were rejected for holding fewer than the
    required point count before this one was accepted.
    """

    distances: np.ndarray
    window_radius: float
    resamples: int = 0

    def __post_init__(self) -> None:
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 1:
            raise ValueError("distances must be a 1-d array")
        if np.any(np.diff(d) < 0):
            raise ValueError("distances must be sorted ascending")
        if d.size and (d[0] <= 0 or d[-1] > self.window_radius * (1 + 1e-12)):
            raise ValueError("distances must lie in (0, window_radius]")
        object.__setattr__(self, "distances", d)


def default_window_radius(params: NetworkParams) -> float:
    """Disc radius giving an expected count of WINDOW_FILL*K points."""
    return math.sqrt(WINDOW_FILL * params.K / (params.lambda_b * math.pi))


def truncation_bound(params: NetworkParams, window_radius: float) -> float:
    """Mean aggregate path-gain of the excluded far field,
    int_R^inf r^{-alpha} 2 pi lambda r dr = 2 pi lambda R^{2-alpha}/(alpha-2)."""
    return (
        2.0 * math.pi * params.lambda_b
        * window_radius ** (2.0 - params.alpha) / (params.alpha - 2.0)
    )


def sample_realization(
    params: NetworkParams,
    window_radius: float,
    rng: np.random.Generator,
    min_points: int | None = None,
    max_resamples: int = 1000,
) -> Realization:
    """Sample one homogeneous-PPP realization on a disc of given radius.

    Draws Poisson(lambda_b*pi*R^2) points uniform on the disc and returns
    their sorted distances.  Realizations with fewer than min_points
    (default: K) points are rejected and redrawn; the rejection count is
    carried on the result so callers can report it.
    """
    if window_radius <= 0:
        raise ValueError(f"window_radius must be > 0, got {window_radius}")
    needed = params.K if min_points is None else min_points
    mean_count = params.lambda_b * math.pi * window_radius ** 2
    for attempt in range(max_resamples + 1):
        count = rng.poisson(mean_count)
        if count >= needed:
            sq = rng.uniform(0.0, window_radius ** 2, size=count)
            sq.sort()
            return Realization(np.sqrt(sq), window_radius, resamples=attempt)
    raise RuntimeError(
        f"window too small: {max_resamples} consecutive realizations held "
        f"fewer than {needed} points (mean count {mean_count:.3g})"
    )


# ---------------------------------------------------------------------------
# ordered-distance densities
# ---------------------------------------------------------------------------

def kth_distance_pdf(k: int, lambda_b: float, r) -> np.ndarray | float:
    """Density of the distance to the k-th nearest point of a HPPP,
    f(r) = 2 (lambda pi r^2)^k / (r Gamma(k)) * exp(-lambda pi r^2)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("kth_distance_pdf requires r > 0")
    z = lambda_b * math.pi * r_arr ** 2
    log_pdf = math.log(2.0) + k * np.log(z) - np.log(r_arr) - math.lgamma(k) - z
    out = np.exp(log_pdf)
    return out if out.ndim else float(out)


def joint_kK_pdf(k: int, K: int, lambda_b: float, r_k, r_K) -> np.ndarray | float:
    """Joint density of the k-th and K-th nearest distances (k < K),

        f(r_k, r_K) = 4 (lambda pi)^K / (Gamma(K-k) Gamma(k)) * r_k * r_K
                      * (r_k^2)^{k-1} (r_K^2 - r_k^2)^{K-k-1} exp(-lambda pi r_K^2),

    zero on r_k >= r_K.
    """
    if not 1 <= k < K:
        raise ValueError(f"need 1 <= k < K, got k={k}, K={K}")
    rk = np.asarray(r_k, dtype=float)
    rK = np.asarray(r_K, dtype=float)
    if np.any(rk <= 0) or np.any(rK <= 0):
        raise ValueError("joint_kK_pdf requires positive radii")
    rk, rK = np.broadcast_arrays(rk, rK)
    out = np.zeros(rk.shape, dtype=float)
    mask = rk < rK
    if np.any(mask):
        a, b = rk[mask], rK[mask]
        c = K * math.log(lambda_b * math.pi) - math.lgamma(K - k) - math.lgamma(k)
        log_pdf = (
            math.log(4.0) + c + np.log(a) + np.log(b)
            + (k - 1) * np.log(a ** 2)
            + (K - k - 1) * np.log(b ** 2 - a ** 2)
            - lambda_b * math.pi * b ** 2
        )
        out[mask] = np.exp(log_pdf)
    return out if out.ndim else float(out)


def delta_ratio_pdf(k: int, K: int, x) -> np.ndarray | float:
    """Density on [0,1] of the distance ratio r_k / r_K between the k-th and
    K-th nearest points: f(x) = C * x^{2k-1} (1-x^2)^{K-k-1}, with
    C = 2 Gamma(K) / (Gamma(k) Gamma(K-k)).  Its square is Beta(k, K-k);
    in particular the second moment is exactly k/K.
    """
    if not 1 <= k < K:
        raise ValueError(f"need 1 <= k < K, got k={k}, K={K}")
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0) | (x_arr > 1)):
        raise ValueError("delta_ratio_pdf support is [0, 1]")
    log_c = math.log(2.0) + math.lgamma(K) - math.lgamma(k) - math.lgamma(K - k)
    with np.errstate(divide="ignore"):
        # endpoints: the power laws send the density to 0 (or C at x=1, k=K-1)
        out = np.where(
            (x_arr > 0) & (x_arr < 1),
            np.exp(
                log_c
                + (2 * k - 1) * np.log(np.where(x_arr > 0, x_arr, 1.0))
                + (K - k - 1) * np.log1p(-np.where(x_arr < 1, x_arr, 0.0) ** 2)
            ),
            0.0,
        )
    if K - k - 1 == 0:
        out = np.where(x_arr == 1.0, math.exp(log_c), out)
    return out if out.ndim else float(out)
