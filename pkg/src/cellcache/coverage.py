"""Analytical coverage probabilities for the cached small-cell downlink.

Exact expressions condition on the serving geometry and differentiate the
interference Laplace transform L(s) up to the fading-shape order.  Carrying
the derivatives in scaled form T_i = s^i L^(i)(s)/i! makes every coefficient
a function of the SIR threshold alone: factor series convolve, the far-field
exponential obeys a short recurrence, and the radial dependence collapses to
exp(-c z) times a polynomial in z = pi lambda_b r^2.  The expectation over
the serving distance is then a Gamma-moment identity in closed form; the
only quadratures left are one-dimensional incomplete-Beta integrals, plus a
distance-ratio integral for the schemes whose interference starts at the
cluster edge.

Bound expressions sandwich the desired-gain CDF between powers of
exponentials, expand binomially, and reuse the same Beta-integral
coefficients.  Everything here is a pure function of its arguments and free
of the deployment density: coverage in the interference-limited network is
scale invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from .channel import csi_quantization_zeta
from .geometry import NetworkParams, delta_ratio_pdf
from .specfun import (
    DEFAULT_QUADRATURE,
    NonConvergenceError,
    QuadratureSpec,
    _beta_segment,
    complementary_incomplete_beta,
    incomplete_beta,
    alzer_eta,
    tail_integral_A,
)

# exact-mode caps: the derivative order grows combinatorially, so past these
# the exact evaluators refuse and direct the caller to the bound forms
EXACT_L_CAP = 8
EXACT_ZF_EXCESS_CAP = 6

#: distance-ratio quadrature: Gauss-Legendre node doubling until the result
#: moves by less than this
RATIO_QUAD_TOL = 1e-7
_RATIO_NODES_MAX = 1024

SCHEMES = ("mf", "zf", "no-mf", "o-zf")
FIDELITIES = (
    "exact", "upper-bound", "lower-bound",
    "approx-upper", "approx-lower", "closed-form",
)


class ExactModeCapError(ValueError):
    """Exact evaluation refused; use the bound forms instead."""


@dataclass(frozen=True)
class CoverageProfile:
    """Per-rank coverage probabilities for one (scheme, params, gamma).

    values[k-1] is the probability that the SIR from the k-th nearest
    serving station exceeds gamma.  Probabilities are nonincreasing in k
    for every scheme except successive decoding, where later ranks shed
    within-cluster interference.
    """

    scheme: str
    fidelity: str
    values: tuple
    gamma: float
    feedback_bits: int | None = None

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.fidelity not in FIDELITIES:
            raise ValueError(f"unknown fidelity {self.fidelity!r}")
        vals = tuple(float(v) for v in self.values)
        if any(v < -1e-9 or v > 1.0 + 1e-9 for v in vals):
            raise ValueError(f"coverage values outside [0, 1]: {vals}")
        # successive decoding is exempt: its last rank sees no within-cluster
        # interference at all, so mid ranks can dip below it.  The slack on
        # the others covers ratio-quadrature noise when ranks coincide.
        if self.scheme != "no-mf" and any(
            vals[i + 1] > vals[i] + 1e-6 for i in range(len(vals) - 1)
        ):
            raise ValueError(f"coverage values must be nonincreasing in k: {vals}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


# ---------------------------------------------------------------------------
# threshold-only coefficient integrals
# ---------------------------------------------------------------------------


def _disc_coeff(m: int, y: float, alpha: float, spec: QuadratureSpec) -> float:
    """m-th scaled-derivative magnitude of the disc-averaged exponential-gain
    factor int_0^1 2t/(1 + y t^-alpha) dt; the true coefficient is (-1)^m
    times this."""
    if y == 0.0:
        return 1.0 if m == 0 else 0.0
    two_a = 2.0 / alpha
    if m == 0:
        # complement form is regular at small y
        return 1.0 - two_a * y ** two_a * incomplete_beta(
            two_a, 1.0 - two_a, 1.0 / (1.0 + y), spec
        )
    return two_a * y ** two_a * incomplete_beta(
        1.0 + two_a, m - two_a, 1.0 / (1.0 + y), spec
    )


def _tail_coeff(m: int, y: float, alpha: float, spec: QuadratureSpec) -> float:
    """Far-field exponent coefficients per unit z: at m = 0 the exponent
    itself, int_1^inf y t^-alpha / (1 + y t^-alpha) t dt; at m >= 1 the
    scaled-derivative magnitude int_1^inf (y t^-alpha)^m / (1+y t^-alpha)^{m+1} t dt."""
    if y == 0.0:
        return 0.0
    two_a = 2.0 / alpha
    if m == 0:
        return 0.5 * y ** two_a * tail_integral_A(y ** -two_a, alpha, spec)
    return (y ** two_a / alpha) * complementary_incomplete_beta(
        1.0 + two_a, m - two_a, 1.0 / (1.0 + y), spec
    )


def _pgfl_exponent(y: float, alpha: float, spec: QuadratureSpec) -> float:
    """c(y) with far-field factor E[exp(-c z)]; c = 2 * tail coefficient."""
    return 2.0 * _tail_coeff(0, y, alpha, spec)


def _annulus_gamma_coeff(m: int, L: int, y: float, gamma_edge: float,
                         delta_sq: float, alpha: float,
                         spec: QuadratureSpec) -> float:
    """m-th scaled-derivative magnitude of the annulus-averaged Gamma(L,1)
    factor int 2t/(1-delta^2) (1 + y t^-alpha)^-L dt over t in (delta, 1),
    where y = gamma * delta^alpha and gamma_edge = y / delta^alpha."""
    if y == 0.0:
        return 1.0 if m == 0 else 0.0
    two_a = 2.0 / alpha
    # complement domain: endpoints y/(1+y) stay exact where 1/(1+y) would
    # collapse onto 1 and lose the (1-u) singularity to rounding
    seg = _beta_segment(
        m - two_a, L + two_a,
        y / (1.0 + y), gamma_edge / (1.0 + gamma_edge), spec,
    )
    base = (2.0 * y ** two_a / (alpha * (1.0 - delta_sq))) * seg
    if m == 0:
        return base
    return math.comb(L + m - 1, m) * base


# ---------------------------------------------------------------------------
# scaled Taylor series arithmetic (entries are polynomials in z)
# ---------------------------------------------------------------------------

def _zmul(a: np.ndarray, b: np.ndarray, depth: int) -> np.ndarray:
    # product of two series whose entries are z-polynomials; both arrays are
    # (depth, depth): first index series order, second z power
    out = np.zeros((depth, depth))
    for i in range(depth):
        for j in range(depth - i):
            conv = np.convolve(a[i], b[j])[:depth]
            out[i + j, : conv.size] += conv
    return out


def _scalar_series_pow(coeffs: np.ndarray, power: int, depth: int) -> np.ndarray:
    # coeffs: plain (depth,) scalar series; returns coeffs**power truncated
    out = np.zeros(depth)
    out[0] = 1.0
    for _ in range(power):
        out = np.convolve(out, coeffs)[:depth]
    return out


def _exp_series_poly(lin: np.ndarray, depth: int) -> np.ndarray:
    # series exp of g with g_0 removed; lin[m] is the coefficient of z in
    # g_m (m >= 1).  Result entries are z-polynomials of degree <= order.
    out = np.zeros((depth, depth))
    out[0, 0] = 1.0
    for n in range(1, depth):
        acc = np.zeros(depth)
        for j in range(1, n + 1):
            g_j = np.array([0.0, lin[j]])
            conv = np.convolve(g_j, out[n - j])[:depth]
            acc += j * conv
        out[n] = acc / n
    return out


def _closed_form_radial_expectation(zpoly: np.ndarray, c: float,
                                    shape: int) -> float:
    # E[exp(-c z) * sum_j zpoly[j] z^j] for z ~ Gamma(shape, 1):
    # sum_j zpoly[j] * Gamma(shape+j)/Gamma(shape) / (1+c)^{shape+j}
    log1pc = math.log1p(c)
    total = 0.0
    for j, coef in enumerate(zpoly):
        if coef == 0.0:
            continue
        total += coef * math.exp(
            math.lgamma(shape + j) - math.lgamma(shape) - (shape + j) * log1pc
        )
    return total


def _ratio_expectation(f, k: int, order: int, tol: float = RATIO_QUAD_TOL):
    """E[f(delta)] against the distance-ratio density with parameters
    (k, order); Gauss-Legendre on [0,1] with node doubling."""
    prev = None
    n = 16
    while n <= _RATIO_NODES_MAX:
        t, w = leggauss(n)
        x = 0.5 * (t + 1.0)
        total = 0.0
        for xi, wi in zip(x, w):
            total += 0.5 * wi * delta_ratio_pdf(k, order, xi) * f(xi)
        if prev is not None and abs(total - prev) < tol:
            return total
        prev = total
        n *= 2
    raise NonConvergenceError(
        f"distance-ratio quadrature did not settle below {tol} "
        f"within {_RATIO_NODES_MAX} nodes"
    )


# ---------------------------------------------------------------------------
# exact coverage
# ---------------------------------------------------------------------------

def _check_rank(k: int, upper: int, what: str) -> None:
    if not 1 <= k <= upper:
        raise ValueError(f"{what} requires 1 <= k <= {upper}, got k={k}")


def _require_exact_cap(order: int) -> None:
    if order > EXACT_L_CAP:
        raise ExactModeCapError(
            f"exact mode supports derivative depth up to {EXACT_L_CAP}, "
            f"needed {order}; use the bound forms instead"
        )


def _sum_signed(series: np.ndarray, depth: int) -> np.ndarray:
    # sum_i (-1)^i series[i] as one z-polynomial
    signs = (-1.0) ** np.arange(depth)
    return signs @ series


def cov_mf_exact(k: int, params: NetworkParams,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Exact coverage probability for matched-filter service from the k-th
    nearest station: all closer stations interfere through the disc average,
    the far field through its generating functional."""
    _check_rank(k, params.K, "cov_mf_exact")
    L, alpha, gamma = params.L, params.alpha, params.gamma
    _require_exact_cap(L)

    disc = np.array([(-1.0) ** m * _disc_coeff(m, gamma, alpha, spec)
                     for m in range(L)])
    disc_pow = _scalar_series_pow(disc, k - 1, L)

    lin = np.zeros(L)
    for m in range(1, L):
        lin[m] = (-1.0) ** m * 2.0 * _tail_coeff(m, gamma, alpha, spec)
    expo = _exp_series_poly(lin, L)

    full = np.zeros((L, L))
    for i in range(L):
        for j in range(L - i):
            full[i + j] += disc_pow[i] * expo[j]
    zpoly = _sum_signed(full, L)
    c = _pgfl_exponent(gamma, alpha, spec)
    return float(_closed_form_radial_expectation(zpoly, c, k))


def cov_mf_closed_alpha4(k: int, gamma: float) -> float:
    """Closed-form single-antenna coverage at path-loss exponent 4."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    root = math.sqrt(gamma)
    inv = 1.0 / math.sqrt(1.0 + gamma)
    num = (1.0 - root * math.asin(inv)) ** (k - 1)
    den = (1.0 + root * math.acos(inv)) ** k
    return num / den


def _zf_inner(delta: float, gamma: float, alpha: float, L: int, K: int,
              spec: QuadratureSpec) -> float:
    # coverage conditioned on the distance ratio; the cluster edge shields
    # everything nearer, so only the far-field factor carries derivatives
    depth = L - K + 1
    y = gamma * delta ** alpha
    lin = np.zeros(depth)
    for m in range(1, depth):
        lin[m] = (-1.0) ** m * 2.0 * _tail_coeff(m, y, alpha, spec)
    expo = _exp_series_poly(lin, depth)
    zpoly = _sum_signed(expo, depth)
    c = _pgfl_exponent(y, alpha, spec)
    return _closed_form_radial_expectation(zpoly, c, K)


def cov_zf_exact(k: int, params: NetworkParams,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Exact coverage for zero-forcing service from the k-th nearest station;
    intra-cluster interference is nulled, so interference starts beyond the
    cluster edge and the result is a distance-ratio expectation."""
    params.require_zf_feasible()
    _check_rank(k, params.K, "cov_zf_exact")
    L, K, alpha, gamma = params.L, params.K, params.alpha, params.gamma
    if L - K > EXACT_ZF_EXCESS_CAP:
        raise ExactModeCapError(
            f"exact zero-forcing mode supports L-K up to {EXACT_ZF_EXCESS_CAP}, "
            f"got {L - K}; use the bound forms instead"
        )
    if k == K:
        return float(_zf_inner(1.0, gamma, alpha, L, K, spec))
    return float(_ratio_expectation(
        lambda d: _zf_inner(d, gamma, alpha, L, K, spec), k, K
    ))


def _nomf_inner(delta: float, k: int, b_n: int, gamma: float, alpha: float,
                L: int, spec: QuadratureSpec) -> float:
    # serving set beyond rank k: b_n-k-1 stations averaged over the annulus,
    # the edge station explicit, far field beyond the edge
    y = gamma * delta ** alpha
    depth = L

    annulus = np.array([
        (-1.0) ** m * _annulus_gamma_coeff(m, L, y, gamma, delta ** 2, alpha, spec)
        for m in range(depth)
    ])
    ann_pow = _scalar_series_pow(annulus, b_n - k - 1, depth)

    edge = np.array([
        (-1.0) ** m * math.comb(L + m - 1, m) * y ** m / (1.0 + y) ** (L + m)
        for m in range(depth)
    ])
    cluster = np.convolve(ann_pow, edge)[:depth]

    lin = np.zeros(depth)
    for m in range(1, depth):
        lin[m] = (-1.0) ** m * 2.0 * _tail_coeff(m, y, alpha, spec)
    expo = _exp_series_poly(lin, depth)

    full = np.zeros((depth, depth))
    for i in range(depth):
        for j in range(depth - i):
            full[i + j] += cluster[i] * expo[j]
    zpoly = _sum_signed(full, depth)
    c = _pgfl_exponent(y, alpha, spec)
    return _closed_form_radial_expectation(zpoly, c, b_n)


def cov_nomf_exact(k: int, b_n: int, params: NetworkParams,
                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Exact coverage of the k-th decoding stage when the b_n nearest
    stations transmit concurrently with matched filters."""
    if not 1 <= b_n <= params.K:
        raise ValueError(f"need 1 <= b_n <= K, got b_n={b_n}")
    _check_rank(k, b_n, "cov_nomf_exact")
    L, alpha, gamma = params.L, params.alpha, params.gamma
    _require_exact_cap(L)

    if k == b_n:
        # no serving-set interferers remain after cancellation
        lin = np.zeros(L)
        for m in range(1, L):
            lin[m] = (-1.0) ** m * 2.0 * _tail_coeff(m, gamma, alpha, spec)
        expo = _exp_series_poly(lin, L)
        zpoly = _sum_signed(expo, L)
        c = _pgfl_exponent(gamma, alpha, spec)
        return float(_closed_form_radial_expectation(zpoly, c, b_n))
    return float(_ratio_expectation(
        lambda d: _nomf_inner(d, k, b_n, gamma, alpha, L, spec), k, b_n
    ))


# ---------------------------------------------------------------------------
# bound forms
# ---------------------------------------------------------------------------

def _beta1(x: float, gamma: float, alpha: float, l: int, k: int,
           spec: QuadratureSpec) -> float:
    # disc factor of the l-th binomial term, power k-1
    return _disc_coeff(0, x * gamma * l, alpha, spec) ** (k - 1)


def _beta2(x: float, gamma: float, alpha: float, l: int,
           spec: QuadratureSpec) -> float:
    return _pgfl_exponent(x * gamma * l, alpha, spec)


def _mf_bound_at(x: float, k: int, params: NetworkParams, zeta: float,
                 spec: QuadratureSpec) -> float:
    L, alpha, gamma = params.L, params.alpha, params.gamma
    xz = x / zeta
    total = 0.0
    for l in range(1, L + 1):
        b1 = _beta1(xz, gamma, alpha, l, k, spec)
        b2 = _beta2(xz, gamma, alpha, l, spec)
        total += math.comb(L, l) * (-1.0) ** (l + 1) * b1 / (1.0 + b2) ** k
    return total


def cov_mf_bounds(k: int, params: NetworkParams,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """(lower, upper) coverage bounds for matched-filter service; the two
    coincide at L = 1."""
    _check_rank(k, params.K, "cov_mf_bounds")
    eta = alzer_eta(params.L)
    lower = _mf_bound_at(1.0, k, params, 1.0, spec)
    upper = _mf_bound_at(eta, k, params, 1.0, spec)
    return lower, upper


def _zf_approx_at(x: float, k: int, params: NetworkParams,
                  spec: QuadratureSpec) -> float:
    L, K, alpha, gamma = params.L, params.K, params.alpha, params.gamma
    depth = L - K + 1
    ratio = math.sqrt(k / K)
    total = 0.0
    for l in range(1, depth + 1):
        scale = (x * gamma * l) ** (2.0 / alpha)
        a_val = tail_integral_A(1.0 / (scale * ratio), alpha, spec)
        total += (
            math.comb(depth, l) * (-1.0) ** (l + 1)
            / (1.0 + scale * ratio * a_val) ** k
        )
    return total


def cov_zf_approx_bounds(k: int, params: NetworkParams,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """(approx-lower, approx-upper) coverage for zero-forcing service.  The
    distance-ratio expectation is collapsed through its second moment, so
    these are approximations rather than true bounds; they coincide at
    L = K and are exact in the ratio at k = K."""
    params.require_zf_feasible()
    _check_rank(k, params.K, "cov_zf_approx_bounds")
    kappa = alzer_eta(params.L - params.K + 1)
    lower = _zf_approx_at(1.0, k, params, spec)
    upper = _zf_approx_at(kappa, k, params, spec)
    return lower, upper


def _beta4(delta: float, x: float, gamma: float, alpha: float, l: int,
           L: int, b_n: int, k: int, spec: QuadratureSpec) -> float:
    if k == b_n:
        return 1.0
    y = x * gamma * l
    yd = y * delta ** alpha
    edge = 1.0 / (1.0 + yd) ** L
    if b_n - k - 1 == 0 or yd == 0.0:
        return edge
    two_a = 2.0 / alpha
    seg = _beta_segment(-two_a, L + two_a,
                        yd / (1.0 + yd), y / (1.0 + y), spec)
    annulus = 2.0 * y ** two_a / (alpha * (delta ** -2 - 1.0)) * seg
    return edge * annulus ** (b_n - k - 1)


def _nomf_bound_at(x: float, k: int, b_n: int, params: NetworkParams,
                   spec: QuadratureSpec) -> float:
    L, alpha, gamma = params.L, params.alpha, params.gamma
    total = 0.0
    for l in range(1, L + 1):
        if k == b_n:
            term = 1.0 / (1.0 + _beta2(x, gamma, alpha, l, spec)) ** b_n
        else:
            term = _ratio_expectation(
                lambda d: (
                    _beta4(d, x, gamma, alpha, l, L, b_n, k, spec)
                    / (1.0 + _beta2(x * d ** alpha, gamma, alpha, l, spec)) ** b_n
                ),
                k, b_n,
            )
        total += math.comb(L, l) * (-1.0) ** (l + 1) * term
    return total


def cov_nomf_bounds(k: int, b_n: int, params: NetworkParams,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """(lower, upper) coverage bounds for the k-th concurrent stream out of
    b_n; coincide at L = 1."""
    if not 1 <= b_n <= params.K:
        raise ValueError(f"need 1 <= b_n <= K, got b_n={b_n}")
    _check_rank(k, b_n, "cov_nomf_bounds")
    eta = alzer_eta(params.L)
    lower = _nomf_bound_at(1.0, k, b_n, params, spec)
    upper = _nomf_bound_at(eta, k, b_n, params, spec)
    return lower, upper


# ---------------------------------------------------------------------------
# quantized CSI
# ---------------------------------------------------------------------------

def _quantized_zf_at(x: float, k: int, params: NetworkParams, zeta: float,
                     spec: QuadratureSpec) -> float:
    L, K, alpha, gamma = params.L, params.K, params.alpha, params.gamma
    depth = L - K + 1
    two_a = 2.0 / alpha
    loss = (1.0 - zeta) / zeta
    total = 0.0
    for l in range(1, depth + 1):
        tau = x * gamma * l * loss
        disc = _disc_coeff(0, tau, alpha, spec)
        if k == K:
            c = _pgfl_exponent(x * gamma * l / zeta, alpha, spec)
            term = disc ** (K - 1) / (1.0 + c) ** K
        else:
            def integrand(d: float) -> float:
                td = tau * d ** alpha
                mid = 1.0
                if K - k - 1 > 0:
                    seg = _beta_segment(
                        two_a, 1.0 - two_a,
                        1.0 / (1.0 + tau), 1.0 / (1.0 + td), spec,
                    )
                    mid = (1.0 - 2.0 * tau ** two_a * d ** 2
                           / (alpha * (1.0 - d ** 2)) * seg) ** (K - k - 1)
                c = _pgfl_exponent(x * gamma * l * d ** alpha / zeta, alpha, spec)
                return mid / (1.0 + td) / (1.0 + c) ** K

            term = disc ** (k - 1) * _ratio_expectation(integrand, k, K)
        total += math.comb(depth, l) * (-1.0) ** (l + 1) * term
    return total


def cov_quantized(scheme: str, k: int, params: NetworkParams,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """(lower, upper) coverage bounds under B-bit limited feedback.

    Matched filter: only the desired-gain scale shrinks, so the perfect-CSI
    bound terms are evaluated at x/zeta.  Zero-forcing additionally leaks
    residual intra-cluster interference with mean 1-zeta per station.
    """
    scheme = scheme.lower()
    if not params.quantized:
        raise ValueError("cov_quantized requires params with feedback_bits set")
    zeta = csi_quantization_zeta(params.feedback_bits, params.L)
    if scheme == "mf":
        _check_rank(k, params.K, "cov_quantized")
        eta = alzer_eta(params.L)
        lower = _mf_bound_at(1.0, k, params, zeta, spec)
        upper = _mf_bound_at(eta, k, params, zeta, spec)
        return lower, upper
    if scheme == "zf":
        params.require_zf_feasible()
        _check_rank(k, params.K, "cov_quantized")
        kappa = alzer_eta(params.L - params.K + 1)
        lower = _quantized_zf_at(1.0, k, params, zeta, spec)
        upper = _quantized_zf_at(kappa, k, params, zeta, spec)
        return lower, upper
    raise ValueError(f"quantized bounds exist for 'mf' and 'zf', got {scheme!r}")


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def _single_value(scheme: str, fidelity: str, k: int, b_n, params: NetworkParams,
                  spec: QuadratureSpec) -> float:
    if params.quantized:
        if scheme not in ("mf", "zf"):
            raise ValueError(f"quantized coverage is available for mf/zf only")
        lo, up = cov_quantized(scheme, k, params, spec)
        if fidelity == "lower-bound":
            return lo
        if fidelity == "upper-bound":
            return up
        raise ValueError(f"quantized coverage offers bounds only, not {fidelity!r}")
    if scheme == "mf":
        if fidelity == "exact":
            return cov_mf_exact(k, params, spec)
        if fidelity == "closed-form":
            if params.L != 1 or params.alpha != 4.0:
                raise ValueError("closed form needs L=1 and alpha=4")
            return cov_mf_closed_alpha4(k, params.gamma)
        lo, up = cov_mf_bounds(k, params, spec)
        return lo if fidelity == "lower-bound" else up
    if scheme in ("zf", "o-zf"):
        if fidelity == "exact":
            return cov_zf_exact(k, params, spec)
        lo, up = cov_zf_approx_bounds(k, params, spec)
        return lo if fidelity == "approx-lower" else up
    if scheme == "no-mf":
        if fidelity == "exact":
            return cov_nomf_exact(k, b_n, params, spec)
        lo, up = cov_nomf_bounds(k, b_n, params, spec)
        return lo if fidelity == "lower-bound" else up
    raise ValueError(f"unknown scheme {scheme!r}")


def _auto_fidelity(scheme: str, params: NetworkParams) -> str:
    """Exact when the derivative depth is within cap, else the default
    (approximate) lower bound, which keeps optimization objectives honest."""
    if params.quantized:
        return "lower-bound"
    if scheme == "mf" or scheme == "no-mf":
        return "exact" if params.L <= EXACT_L_CAP else "lower-bound"
    if scheme in ("zf", "o-zf"):
        if params.L - params.K <= EXACT_ZF_EXCESS_CAP:
            return "exact"
        return "approx-lower"
    raise ValueError(f"unknown scheme {scheme!r}")


def coverage_profile(scheme: str, params: NetworkParams,
                     fidelity: str = "auto", b_n: int | None = None,
                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> CoverageProfile:
    """Coverage values for all ranks of one scheme at params.gamma.

    For "no-mf" the serving-set size b_n must be given and ranks run
    1..b_n; all other schemes rank over the full cluster 1..K.
    """
    scheme = scheme.lower()
    if scheme == "no-mf":
        if b_n is None:
            raise ValueError("no-mf profile needs the serving-set size b_n")
        ranks = b_n
    else:
        ranks = params.K
    if fidelity == "auto":
        fidelity = _auto_fidelity(scheme, params)
    values = tuple(
        _single_value(scheme, fidelity, k, b_n, params, spec)
        for k in range(1, ranks + 1)
    )
    return CoverageProfile(
        scheme=scheme, fidelity=fidelity, values=values,
        gamma=params.gamma, feedback_bits=params.feedback_bits,
    )


def with_gamma(params: NetworkParams, gamma: float) -> NetworkParams:
    """Copy of params at a different SIR threshold."""
    return replace(params, gamma=gamma)
