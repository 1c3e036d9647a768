"""Cache-placement optimizers.

Probabilistic placement maximizes sum_n p_n sum_k a_n(1-a_n)^{k-1} V_k over
cache probabilities a with sum a_n = M.  The objective is concave for
nonincreasing per-rank values V, so the water-filling structure is exact:
a_n = min(1, w_n(mu)) with w_n the stationary point at dual level mu, and mu
found by bisection on the cache-size constraint.

Coded placement picks an integer coding depth b_n per file (cache fraction
1/b_n) under sum 1/b_n = M.  That is a multiple-choice knapsack, NP-hard in
general; the greedy pass below exploits that per-depth values are shared by
all files, so only popularity orders the moves.  An exhaustive oracle over
monotone depth assignments is provided for small catalogs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .metrics import (
    UNCACHED,
    CodedCachePolicy,
    PopularityProfile,
    ProbCachePolicy,
)
from .specfun import NonConvergenceError

EXHAUSTIVE_N_CAP = 14


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances for the dual bisection.

    dual_tolerance bounds |sum a_n - M| at the accepted dual level;
    root_tolerance bounds the per-file bracket width on w_n.
    """

    dual_tolerance: float = 1e-8
    root_tolerance: float = 1e-10
    max_iterations: int = 200

    def __post_init__(self) -> None:
        if self.dual_tolerance <= 0 or self.root_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


DEFAULT_OPTIONS = SolverOptions()


def _popularity_array(p) -> np.ndarray:
    if isinstance(p, PopularityProfile):
        return np.asarray(p.p, dtype=float)
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("popularity must be a nonempty 1-d array")
    if np.any(arr < 0) or np.any(np.diff(arr) > 1e-12):
        raise ValueError("popularity must be nonnegative and nonincreasing")
    return arr


# ---------------------------------------------------------------------------
# probabilistic placement (convex, KKT + dual bisection)
# ---------------------------------------------------------------------------

def _marginal_gain(w: np.ndarray, values: np.ndarray) -> np.ndarray:
    """d/da of sum_k a(1-a)^{k-1} V_k at a = w, elementwise.

    The k = 1 term is the analytic constant V_1; writing it through the
    generic (1-w)^{k-2}(1-kw) form would be 0/0 at w = 1.
    """
    total = np.full_like(w, values[0])
    if values.size > 1:
        total = total + (1.0 - 2.0 * w) * values[1]
    for k in range(3, values.size + 1):
        total = total + (1.0 - w) ** (k - 2) * (1.0 - k * w) * values[k - 1]
    return total


def _stationary_w(targets: np.ndarray, values: np.ndarray,
                  tol: float) -> np.ndarray:
    # bisection per coordinate: the marginal gain is strictly decreasing on
    # [0, 1], callers only pass targets strictly inside its range there
    lo = np.zeros_like(targets)
    hi = np.ones_like(targets)
    steps = max(1, math.ceil(math.log2(1.0 / tol)))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        above = _marginal_gain(mid, values) > targets
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def _allocation(mu: float, p: np.ndarray, values: np.ndarray,
                tol: float) -> np.ndarray:
    # KKT thresholds; ties at the saturation boundary resolve to a = 1
    full = mu <= p * (values[0] - (values[1] if values.size > 1 else 0.0))
    empty = ~full & (mu >= p * values.sum())
    a = np.zeros_like(p)
    a[full] = 1.0
    interior = ~full & ~empty
    if np.any(interior):
        a[interior] = np.minimum(
            1.0, _stationary_w(mu / p[interior], values, tol)
        )
    return a


def solve_prob_caching(popularity, per_rank_values, M: float,
                       options: SolverOptions = DEFAULT_OPTIONS,
                       ) -> ProbCachePolicy:
    """Optimal cache probabilities for the concave placement problem.

    Args:
        popularity: PopularityProfile or nonincreasing probability vector.
        per_rank_values: V_1 >= ... >= V_K >= 0, the per-rank coverage
            probabilities or ergodic rates the objective mixes.
        M: cache size in files, 0 < M < N.
        options: bisection tolerances.

    Returns:
        ProbCachePolicy with sum a_n = M within options.dual_tolerance.
    """
    p = _popularity_array(popularity)
    values = np.asarray(per_rank_values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("per_rank_values must be a nonempty 1-d array")
    if np.any(values < 0) or np.any(np.diff(values) > 1e-12):
        raise ValueError("per_rank_values must be nonnegative, nonincreasing")
    n_files = p.size
    if not 0 < M < n_files:
        raise ValueError(f"cache size must satisfy 0 < M < {n_files}, got {M}")

    mu_lo, mu_hi = 0.0, float(np.max(p) * values.sum())
    sum_lo = float(_allocation(mu_lo, p, values, options.root_tolerance).sum())
    sum_hi = float(_allocation(mu_hi, p, values, options.root_tolerance).sum())
    for _ in range(options.max_iterations):
        # bracket invariant doubles as the monotonicity assertion
        if not (sum_lo + 1e-9 >= M >= sum_hi - 1e-9):
            raise NonConvergenceError(
                f"dual bracket lost: sum a in [{sum_hi}, {sum_lo}], M={M}"
            )
        mu = 0.5 * (mu_lo + mu_hi)
        a = _allocation(mu, p, values, options.root_tolerance)
        total = float(a.sum())
        if abs(total - M) <= options.dual_tolerance:
            return ProbCachePolicy(a=tuple(float(v) for v in a))
        if total > M:
            mu_lo, sum_lo = mu, total
        else:
            mu_hi, sum_hi = mu, total
    raise NonConvergenceError(
        f"dual bisection did not reach |sum a - M| <= "
        f"{options.dual_tolerance} in {options.max_iterations} iterations"
    )


def mpc_policy(N: int, M: int) -> ProbCachePolicy:
    """Most-popular-content baseline: fully cache the first M files."""
    if not 0 <= M <= N:
        raise ValueError(f"need 0 <= M <= N, got M={M}, N={N}")
    return ProbCachePolicy(a=(1.0,) * M + (0.0,) * (N - M))


# ---------------------------------------------------------------------------
# coded placement (multiple-choice knapsack)
# ---------------------------------------------------------------------------

def _coded_inputs(popularity, per_depth_values, M: int, K: int):
    # K + 1 columns: value at depth 1..K, then the value when left uncached
    p = _popularity_array(popularity)
    q = np.asarray(per_depth_values, dtype=float)
    if q.shape != (p.size, K + 1):
        raise ValueError(
            f"per-depth values must have shape ({p.size}, {K + 1}) with the "
            f"uncached column last, got {q.shape}"
        )
    if np.any(np.diff(q, axis=1) > 1e-12):
        raise ValueError("per-depth values must be nonincreasing in b")
    if not (isinstance(M, (int, np.integer)) and 1 <= M <= p.size):
        raise ValueError(f"cache size must be an integer in [1, {p.size}]")
    return p, q


def _coded_profit(p: np.ndarray, q: np.ndarray, b: list) -> float:
    return sum(
        p[n] * q[n, -1 if depth is UNCACHED else depth - 1]
        for n, depth in enumerate(b)
    )


def greedy_coded(popularity, per_depth_values, M: int, K: int,
                 ) -> CodedCachePolicy:
    """Greedy coded placement.

    Starts from the most-popular-content point (first M files whole) and
    repeatedly trades the last b0 files stored at depth b0 down to depth
    b0 + 1, which frees exactly enough space to admit the first uncached
    file at depth b0 + 1.  A trade is kept only if it strictly increases
    sum_n p_n Q(n, b_n); otherwise b0 advances.  Every intermediate point
    keeps sum 1/b_n = M, and the output depths are nondecreasing in n.

    Args:
        popularity: PopularityProfile or nonincreasing probability vector.
        per_depth_values: array (N, K + 1), Q(n, b) nonincreasing across
            depth 1..K followed by the uncached value (usually zeros).
        M: integer cache size in files, 1 <= M <= N.
        K: deepest allowed code (cluster size).

    Returns:
        CodedCachePolicy over depths {1..K} with UNCACHED tail.
    """
    p, q = _coded_inputs(popularity, per_depth_values, M, K)
    n_files = p.size
    b: list = [1] * M + [UNCACHED] * (n_files - M)
    profit = _coded_profit(p, q, b)
    depth = 1
    while depth < K:
        at_depth = [n for n, v in enumerate(b) if v == depth]
        uncached = [n for n, v in enumerate(b) if v is UNCACHED]
        if len(at_depth) < depth or not uncached:
            depth += 1
            continue
        trial = list(b)
        for n in at_depth[-depth:]:
            trial[n] = depth + 1
        trial[uncached[0]] = depth + 1
        trial_profit = _coded_profit(p, q, trial)
        if trial_profit > profit:
            b, profit = trial, trial_profit
        else:
            depth += 1
    return CodedCachePolicy(b=tuple(b), K=K)


def exhaustive_coded(popularity, per_depth_values, M: int, K: int,
                     n_cap: int = EXHAUSTIVE_N_CAP) -> CodedCachePolicy:
    """Globally optimal coded placement over monotone depth assignments.

    Enumerates nondecreasing depth sequences (valid when the per-depth
    values are shared across files, which makes swapping any inversion
    profitable) via their K cut points; checks sum 1/b_n <= M.

    Args:
        n_cap: refuse catalogs larger than this; the search space grows as
            binomial(N + K, K).
    """
    p, q = _coded_inputs(popularity, per_depth_values, M, K)
    n_files = p.size
    if n_files > n_cap:
        raise ValueError(f"exhaustive search capped at N <= {n_cap}")

    def block_profit(col: int, lo: int, hi: int) -> float:
        return sum(p[n] * q[n, col] for n in range(lo, hi))

    best_profit = -math.inf
    best_cuts = None
    for cuts in itertools.combinations_with_replacement(range(n_files + 1), K):
        load = sum(
            (hi - lo) / depth
            for depth, (lo, hi) in enumerate(zip((0,) + cuts[:-1], cuts), 1)
        )
        if load > M + 1e-9:
            continue
        profit = sum(
            block_profit(depth - 1, lo, hi)
            for depth, (lo, hi) in enumerate(zip((0,) + cuts[:-1], cuts), 1)
        ) + block_profit(-1, cuts[-1], n_files)
        if profit > best_profit:
            best_profit, best_cuts = profit, cuts
    b: list = []
    for depth, (lo, hi) in enumerate(zip((0,) + best_cuts[:-1], best_cuts), 1):
        b.extend([depth] * (hi - lo))
    b.extend([UNCACHED] * (n_files - best_cuts[-1]))
    return CodedCachePolicy(b=tuple(b), K=K)
