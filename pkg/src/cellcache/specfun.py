"""Special-function and quadrature primitives.

Provides:
    * incomplete_beta / complementary_incomplete_beta -- the two partial Beta
      integrals that every analytical coverage expression reduces to
    * tail_integral_A -- the interference tail integral A(x) = int_x^inf du/(1+u^{a/2})
    * alzer_eta -- the bound constant (m!)^(-1/m) from the Gamma-CDF sandwich

All quadrature runs through a single adaptive Gauss-Kronrod wrapper with the
tolerances in QuadratureSpec.  Integrable endpoint singularities u^{x-1} (x<1)
and (1-u)^{y-1} (y<1) are removed by the substitutions t=u^x and t=(1-u)^y, so
every routine hands QUADPACK a smooth integrand on a finite interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad


class NonConvergenceError(RuntimeError):
    """A quadrature (or downstream iteration) failed to reach tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for all adaptive quadrature in the package."""

    relative_tolerance: float = 1e-9
    absolute_tolerance: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if self.relative_tolerance <= 0 or self.absolute_tolerance <= 0:
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def _adaptive_quad(f, a: float, b: float, spec: QuadratureSpec) -> float:
    """QUADPACK with the spec tolerances; tolerate a flagged roundoff stop
    only while the error estimate still meets a 100x-relaxed tolerance."""
    if a == b:
        return 0.0
    out = quad(
        f,
        a,
        b,
        epsabs=spec.absolute_tolerance,
        epsrel=spec.relative_tolerance,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, err_estimate = out[0], out[1]
    if len(out) > 3:
        tol = max(
            100.0 * spec.absolute_tolerance,
            100.0 * spec.relative_tolerance * abs(value),
        )
        if not err_estimate <= tol:
            raise NonConvergenceError(
                f"adaptive quadrature did not converge on [{a}, {b}]: {out[3]}"
            )
    return value


# ---------------------------------------------------------------------------
# partial Beta integrals
# ---------------------------------------------------------------------------

def _beta_lower_sub(x: float, y: float, t_lo: float, t_hi: float,
                    spec: QuadratureSpec) -> float:
    # int u^{x-1}(1-u)^{y-1} du over [t_lo^{1/x}, t_hi^{1/x}] after t = u^x;
    # valid away from u = 1
    inv_x = 1.0 / x

    def integrand(t: float) -> float:
        return inv_x * (1.0 - t ** inv_x) ** (y - 1.0)

    return _adaptive_quad(integrand, t_lo, t_hi, spec)


def _beta_upper_sub(x: float, y: float, lo: float, spec: QuadratureSpec) -> float:
    # int_lo^1 u^{x-1}(1-u)^{y-1} du after t = (1-u)^y; needs y > 0, lo >= 1/2
    inv_y = 1.0 / y

    def integrand(t: float) -> float:
        return inv_y * (1.0 - t ** inv_y) ** (x - 1.0)

    return _adaptive_quad(integrand, 0.0, (1.0 - lo) ** y, spec)


def _beta_direct(x: float, y: float, lo: float, hi: float,
                 spec: QuadratureSpec) -> float:
    # plain integrand on an interval bounded away from both endpoints
    def integrand(u: float) -> float:
        return u ** (x - 1.0) * (1.0 - u) ** (y - 1.0)

    return _adaptive_quad(integrand, lo, hi, spec)


def _beta_tail_sub(x: float, y: float, lo: float, hi: float,
                   spec: QuadratureSpec) -> float:
    # int_lo^hi u^{x-1}(1-u)^{y-1} du for lo >= 1/2 after t = (1-u)^y, which
    # flattens the u = 1 endpoint even when y < 0 and hi is within 1e-10 of 1
    w_lo, w_hi = 1.0 - lo, 1.0 - hi
    if w_hi == 0.0 and y <= 0.0:
        raise ValueError("beta tail with y <= 0 requires hi < 1")
    if y == 0.0:
        def integrand(t: float) -> float:
            return (1.0 - math.exp(t)) ** (x - 1.0)

        return _adaptive_quad(integrand, math.log(w_hi), math.log(w_lo), spec)
    inv_y = 1.0 / y
    scale = abs(inv_y)

    def integrand(t: float) -> float:
        return scale * (1.0 - t ** inv_y) ** (x - 1.0)

    t_a, t_b = sorted((w_lo ** y, w_hi ** y))
    return _adaptive_quad(integrand, t_a, t_b, spec)


def _beta_segment(x: float, y: float, z_lo: float, z_hi: float,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    # int_{z_lo}^{z_hi} u^{x-1}(1-u)^{y-1} du, each endpoint singularity
    # removed by substitution; computed in one pass to avoid the cancellation
    # of differencing two near-equal incomplete integrals
    if not 0.0 <= z_lo <= z_hi <= 1.0:
        raise ValueError(f"beta segment needs 0 <= z_lo <= z_hi <= 1, "
                         f"got [{z_lo}, {z_hi}]")
    if z_hi == 1.0 and y <= 0.0:
        raise ValueError("beta segment with y <= 0 requires z_hi < 1")
    if z_lo == 0.0 and x <= 0.0:
        raise ValueError("beta segment with x <= 0 requires z_lo > 0")
    if z_lo == z_hi:
        return 0.0
    if x < 0.0:
        # one integration-by-parts step: the boundary term carries the large
        # u -> 0 magnitude exactly and the remaining integral has x + 1 > 0
        boundary = (z_hi ** x * (1.0 - z_hi) ** (y - 1.0)
                    - z_lo ** x * (1.0 - z_lo) ** (y - 1.0)) / x
        return boundary + ((y - 1.0) / x) * _beta_segment(
            x + 1.0, y - 1.0, z_lo, z_hi, spec
        )
    total = 0.0
    cut = min(z_hi, 0.5)
    if z_lo < cut:
        total += _beta_lower_sub(x, y, z_lo ** x, cut ** x, spec)
    if z_hi > 0.5:
        total += _beta_tail_sub(x, y, max(z_lo, 0.5), z_hi, spec)
    return total


def incomplete_beta(x: float, y: float, z: float,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """B(x, y, z) = int_0^z u^{x-1} (1-u)^{y-1} du.

    Args:
        x: first shape parameter, > 0.
        y: second shape parameter; may be <= 0 as long as z < 1 (the
           non-integrable u=1 singularity is then excluded).
        z: upper integration limit in [0, 1].

    Returns:
        The integral value to QuadratureSpec tolerance.
    """
    if x <= 0.0:
        raise ValueError(f"incomplete_beta requires x > 0, got x={x}")
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"incomplete_beta requires z in [0, 1], got z={z}")
    if y <= 0.0 and z == 1.0:
        raise ValueError("incomplete_beta with y <= 0 requires z < 1")
    if z == 0.0:
        return 0.0
    if z <= 0.5:
        return _beta_lower_sub(x, y, 0.0, z ** x, spec)
    head = _beta_lower_sub(x, y, 0.0, 0.5 ** x, spec)
    if z == 1.0:
        return head + _beta_upper_sub(x, y, 0.5, spec)
    return head + _beta_tail_sub(x, y, 0.5, z, spec)


def complementary_incomplete_beta(x: float, y: float, z: float,
                                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """B'(x, y, z) = int_z^1 u^{x-1} (1-u)^{y-1} du.

    Requires y > 0 whenever z < 1 (the u=1 endpoint is inside the range).
    """
    if x <= 0.0:
        raise ValueError(f"complementary_incomplete_beta requires x > 0, got x={x}")
    if not 0.0 <= z <= 1.0:
        raise ValueError(
            f"complementary_incomplete_beta requires z in [0, 1], got z={z}"
        )
    if z == 1.0:
        return 0.0
    if y <= 0.0:
        raise ValueError("complementary_incomplete_beta requires y > 0 when z < 1")
    if z >= 0.5:
        return _beta_upper_sub(x, y, z, spec)
    # [z, 1/2] under the t = u^x substitution, then the smooth upper piece
    return (
        _beta_lower_sub(x, y, z ** x, 0.5 ** x, spec)
        + _beta_upper_sub(x, y, 0.5, spec)
    )


# ---------------------------------------------------------------------------
# interference tail integral and the Gamma-sandwich constant
# ---------------------------------------------------------------------------

def tail_integral_A(x: float, alpha: float,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """A(x) = int_x^inf du / (1 + u^{alpha/2}), for path-loss exponent alpha > 2.

    alpha = 4 uses the closed form arccot(x); other alpha map onto the
    complementary Beta integral through w = u^{alpha/2}/(1+u^{alpha/2}),
    which turns the improper integral into a finite smooth one.
    """
    if alpha <= 2.0:
        raise ValueError(f"tail integral diverges for alpha <= 2 (alpha={alpha})")
    if x < 0.0:
        raise ValueError(f"tail_integral_A requires x >= 0, got x={x}")
    if alpha == 4.0:
        return math.atan2(1.0, x)
    half = alpha / 2.0
    w = x ** half / (1.0 + x ** half) if x > 0.0 else 0.0
    return (2.0 / alpha) * complementary_incomplete_beta(
        2.0 / alpha, 1.0 - 2.0 / alpha, w, spec
    )


def alzer_eta(m: int) -> float:
    """The sandwich constant (m!)^(-1/m), evaluated via log-gamma."""
    if m < 1 or int(m) != m:
        raise ValueError(f"alzer_eta requires a positive integer, got {m}")
    return math.exp(-math.lgamma(m + 1.0) / m)
