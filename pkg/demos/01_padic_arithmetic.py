"""
Exact p-adic arithmetic
=======================

Valuations, norms as exact fractions, least residues, and the
ultrametric inequality that makes the p-adic distance behave so
differently from the usual absolute value.
"""

import numpy as np

from padic_sssi import PadicContext, valuation_array


def main() -> int:
    ctx = PadicContext(3)

    # v_3(18) = 2 because 18 = 2 * 3**2; the norm is the exact rational 1/9
    print("v_3(18) =", ctx.valuation(18))
    print("|18|_3  =", ctx.norm(18), "(a fractions.Fraction, no rounding)")
    print("|0|_3   =", ctx.norm(0))

    # least residues reduce mod 3**k into 0..3**k-1, following Python's
    # floored division for negatives
    print("least_residue(-1, k=2) =", ctx.least_residue(-1, 2), "(mod 9)")

    # the ultrametric: v(m + n) >= min(v(m), v(n)), with equality whenever
    # the two valuations differ
    pairs = [(9, 3), (9, 18), (6, 3), (27, 54)]
    for m, n in pairs:
        vm, vn, vs = ctx.valuation(m), ctx.valuation(n), ctx.valuation(m + n)
        marker = "=" if vs == min(vm, vn) else ">"
        print(f"v({m}) = {vm}, v({n}) = {vn}, v({m}+{n}) = {vs} {marker} min")

    # vectorized valuations for bulk work
    ns = np.arange(1, 28)
    print("v_3(1..27) =", valuation_array(ns, 3).tolist())

    # norms are multiplicative; exhaustive check on a small range
    bad = 0
    for m in range(1, 200):
        for n in range(1, 200):
            if ctx.norm(m * n) != ctx.norm(m) * ctx.norm(n):
                bad += 1
    print("multiplicativity violations on 1..199 x 1..199:", bad)
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
