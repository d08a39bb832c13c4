"""Exact p-adic arithmetic on integer indices.

The p-adic valuation v_p(n) of a nonzero integer n is the exponent of the
largest power of p dividing n; the p-adic norm is |n|_p = p**(-v_p(n)) with
|0|_p = 0.  Norms are reported as exact rationals so that identities such as
multiplicativity hold with no floating error.  The ultrametric inequality
|m + n|_p <= max(|m|_p, |n|_p) is equivalent to
v_p(m + n) >= min(v_p(m), v_p(n)), which is the form the array helpers use.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Largest modulus we allow for residue arithmetic: p**K above this would
# overflow int64 buffers in the vectorized paths, so the scalar path refuses
# it too and both fail loudly instead of diverging.
MAX_MODULUS = (1 << 63) - 1

# Default ceiling on enumerated lattice boxes, in points.
DEFAULT_ENUM_CAP = 1 << 22


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test; fine for desk-scale p."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def checked_modulus(p: int, k: int) -> int:
    """Return p**k, refusing exponents whose power exceeds MAX_MODULUS."""
    if k < 0:
        raise ValueError(f"exponent must be non-negative, got {k}")
    m = 1
    for _ in range(k):
        m *= p
        if m > MAX_MODULUS:
            raise OverflowError(f"p**K = {p}**{k} exceeds the supported modulus range")
    return m


@dataclass(frozen=True)
class PadicContext:
    """A fixed prime p together with the arithmetic helpers that depend on it."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise ValueError(f"p must be an integer, got {self.p!r}")
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")

    def valuation(self, n: int) -> int:
        """v_p(n) for nonzero integer n.

        Rejects n = 0, whose valuation is +infinity and not representable
        as an int.
        """
        n = _as_int(n)
        if n == 0:
            raise ValueError("valuation of 0 is infinite; handle 0 separately")
        n = abs(n)
        v = 0
        while n % self.p == 0:
            n //= self.p
            v += 1
        return v

    def norm(self, n: int) -> Fraction:
        """|n|_p as an exact rational; |0|_p = 0."""
        n = _as_int(n)
        if n == 0:
            return Fraction(0)
        return Fraction(1, self.p ** self.valuation(n))

    def least_residue(self, n: int, k: int) -> int:
        """The representative of n mod p**k lying in [0, p**k)."""
        modulus = checked_modulus(self.p, k)
        return _as_int(n) % modulus


def _as_int(n) -> int:
    if isinstance(n, (bool, float)):
        raise TypeError(f"expected an integer, got {n!r}")
    if isinstance(n, np.integer):
        return int(n)
    if not isinstance(n, int):
        raise TypeError(f"expected an integer, got {n!r}")
    return n


def valuation_array(values: np.ndarray, p: int) -> np.ndarray:
    """Elementwise v_p over an array of positive integers.

    Uses masked repeated division: each pass strips one factor of p from the
    entries still divisible, so total work is proportional to
    sum(v_p(n) + 1), about n * p/(p-1) for a dense range.
    """
    n = np.array(values, dtype=np.int64, copy=True)
    if n.size and n.min() <= 0:
        raise ValueError("valuation_array requires positive integers")
    v = np.zeros(n.shape, dtype=np.int64)
    flat_n = n.ravel()
    flat_v = v.ravel()
    idx = np.flatnonzero(flat_n % p == 0)
    while idx.size:
        flat_n[idx] //= p
        flat_v[idx] += 1
        idx = idx[flat_n[idx] % p == 0]
    return v


def box_points(anchor: tuple[int, ...] | int, side: int, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Enumerate the lattice box anchor + {0..side}**d in lexicographic order.

    Returns an int64 array of shape (count, d) with count = (side+1)**d.
    `cap` bounds the number of enumerated points; exceeding it raises
    ValueError rather than silently allocating.
    """
    if isinstance(anchor, (int, np.integer)):
        anchor = (int(anchor),)
    anchor = tuple(int(a) for a in anchor)
    d = len(anchor)
    if d < 1:
        raise ValueError("anchor must have at least one coordinate")
    if side < 0:
        raise ValueError(f"side must be non-negative, got {side}")
    count = (side + 1) ** d
    if count > cap:
        raise ValueError(f"box enumeration of {count} points exceeds cap {cap}")
    axes = [np.arange(a, a + side + 1, dtype=np.int64) for a in anchor]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)
