"""
Limited channel feedback and the quantization penalty
=====================================================

With B feedback bits the station only knows a quantized channel direction.
The average alignment factor zeta(B, L) controls both the lost beamforming
gain and, for zero forcing, the interference that leaks through the
imperfect nulls.  Matched filtering only pays the first price, which is why
it degrades more gracefully when bits are scarce.
"""

from cellcache import (NetworkParams, cov_mf_bounds, cov_mf_exact,
                       cov_quantized, cov_zf_exact, csi_quantization_zeta)


def params(bits=None):
    return NetworkParams(lambda_b=1.0, alpha=4.0, L=3, K=3, gamma=1.0,
                         feedback_bits=bits)


print("alignment factor zeta(B, L=3)")
for bits in (2, 4, 8, 12, 20):
    z = csi_quantization_zeta(bits, 3)
    print(f"  B={bits:>2}: zeta = {z:.6f}   lost fraction = {1 - z:.2e}")

# Coverage comes as a bracket under quantization; the bracket tightens to
# the perfect-CSI answer as B grows.
print()
print("rank-1 coverage bracket at 0 dB vs feedback budget")
exact_mf = cov_mf_exact(1, params())
exact_zf = cov_zf_exact(1, params())
print(f"  perfect CSI: mf = {exact_mf:.4f}  zf = {exact_zf:.4f}")
for bits in (2, 4, 8, 12, 20):
    mf_lo, mf_up = cov_quantized("mf", 1, params(bits))
    zf_lo, zf_up = cov_quantized("zf", 1, params(bits))
    print(f"  B={bits:>2}: mf in [{mf_lo:.4f}, {mf_up:.4f}]"
          f"   zf in [{zf_lo:.4f}, {zf_up:.4f}]")

# The robustness comparison: loss of the guaranteed (lower-bound) coverage
# when dropping to 4 bits.  Zero forcing suffers roughly 2-16x more at the
# outer ranks because its nulls degrade too, not just its array gain.
print()
print("guaranteed-coverage loss at B = 4 (perfect lower bound - quantized)")
for k in (1, 2, 3):
    mf_loss = cov_mf_bounds(k, params())[0] - cov_quantized("mf", k, params(4))[0]
    zf_loss = cov_zf_exact(k, params()) - cov_quantized("zf", k, params(4))[0]
    print(f"  k={k}: mf {mf_loss:+.4f}   zf {zf_loss:+.4f}")
