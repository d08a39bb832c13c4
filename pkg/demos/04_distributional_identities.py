"""
Testing the defining identities in distribution
===============================================

The process is built to satisfy two laws: p-adic self-similarity
(X_{an} has the law of |a|_p**H X_n) and stationary increments
(X_{n+s} - X_s has the law of X_n). Neither can be checked pathwise,
so we compare empirical distributions across thousands of independent
replicas with a two-sample Kolmogorov-Smirnov statistic at the 1%
level, and cross-check the Gaussian variance against its closed form.
"""

import numpy as np

from padic_sssi import Gaussian, TreeSpec
from padic_sssi.identity import (
    gaussian_variance_oracle,
    increment_stationarity_test,
    ks_threshold_1pct,
    scaling_identity_test,
    sublattice_law_test,
)
from padic_sssi.tree import path_values
from padic_sssi.rng import derive_seed


def show(report) -> None:
    verdict = "consistent" if report.passed else "REJECTED"
    print(
        f"  {report.identity:20s} D = {report.statistic:.4f}"
        f"  threshold = {report.threshold:.4f}  -> {verdict}"
    )


def main() -> int:
    spec = TreeSpec(p=2, hurst=0.7, kmax=12, law=Gaussian(1.0), seed=90210)
    seeds = 4000
    print(f"spec: p = 2, H = 0.7, kmax = 12, {seeds} replicas per side")

    # scaling: a = 2 contracts by |2|_2**0.7, a = 3 is a p-adic unit and
    # should leave the law untouched
    print("self-similarity, X_{a n} vs |a|_p**H X_n:")
    for a in (2, 3, 4):
        show(scaling_identity_test(spec, a=a, index=3, seeds=seeds))

    # increment stationarity at a few shifts
    print("stationary increments, X_{n+s} - X_s vs X_n:")
    for shift in (1, 2, 5):
        show(increment_stationarity_test(spec, shift=shift, index=2, seeds=seeds))

    # restricting to a coset r + p**K Z aligns with the same identity;
    # matching the truncation depth makes the two sides equal in law even
    # at finite kmax
    print("sublattice restriction, matched truncation:")
    show(sublattice_law_test(spec, r=1, K=2, index=3, seeds=seeds))

    # a deliberately broken comparison shows the test has teeth: scale by
    # the wrong exponent and the KS statistic blows past the threshold
    left = path_values(spec, np.int64(6), seeds=derive_seed(spec.seed, 7, np.arange(seeds, dtype=np.uint64)))
    wrong = (2.0 ** -0.35) * path_values(
        spec, np.int64(3), seeds=derive_seed(spec.seed, 8, np.arange(seeds, dtype=np.uint64))
    )
    from padic_sssi.identity import ks_statistic

    d_wrong = ks_statistic(left, wrong)
    print(
        f"  wrong exponent probe D = {d_wrong:.4f}"
        f"  threshold = {ks_threshold_1pct(seeds, seeds):.4f}  -> detected"
    )

    # exact second-moment oracle for the Gaussian case
    var = gaussian_variance_oracle(spec, 1)
    sample = path_values(spec, np.int64(1), seeds=derive_seed(spec.seed, 9, np.arange(20000, dtype=np.uint64)))
    print(f"Var X_1: closed form {var:.6f}, Monte Carlo {np.var(sample):.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
