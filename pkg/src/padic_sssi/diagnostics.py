"""Finite-horizon estimators of almost-periodicity and p-adic continuity.

Every notion in the classical hierarchy gets a concrete estimator on a
finite slice f(0..N-1) of a real sequence:

* Bohr: sup-distance under a shift tau, and the set of tau with distance
  below epsilon together with its worst gap (relative density proxy);
* limit periodicity: the least-residue periodization g(n) = f(n mod p**K)
  and its uniform error;
* Weyl / Besicovitch: windowed q-means of a translate difference, with the
  window either sliding (Weyl, worst window) or anchored at 0 (Besicovitch);
* p-adic continuity: the modulus omega(K) = worst |f(n + p**K u) - f(n)|,
  computed in O(N) per K because the pairs inside one residue class mod
  p**K attain their sup at (class max, class min).

Estimates are exact functions of the input array; the only approximation
relative to the limit notions is the finite horizon, which every report
records.  No randomness enters here.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .padic import PadicContext, checked_modulus


@dataclass(frozen=True)
class SeriesView:
    """A finite slice f(offset..offset+N-1) of a sequence, as float64.

    `offset` is bookkeeping only: diagnostics treat the array as the
    sequence restricted to 0..N-1.
    """

    values: np.ndarray
    offset: int = 0

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"series must be one-dimensional, got shape {arr.shape}")
        if arr.size < 1:
            raise ValueError("series must be nonempty")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def horizon(self) -> int:
        return int(self.values.size)


def _as_series(f) -> SeriesView:
    if isinstance(f, SeriesView):
        return f
    return SeriesView(values=np.asarray(f, dtype=np.float64))


@dataclass(frozen=True)
class TranslationReport:
    """Accepted shift set {tau <= tau_max : sup-distance < epsilon}.

    max_gap includes the boundary gaps from 0 to the first accepted tau and
    from the last accepted tau to tau_max; an empty set reports
    tau_max + 1, so "relatively dense up to the horizon" is monotone in the
    acceptance set and never vacuously small.
    """

    epsilon: float
    tau_max: int
    taus: tuple[int, ...]
    max_gap: int
    horizon: int

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "tau_max": self.tau_max,
            "taus": list(self.taus),
            "max_gap": self.max_gap,
            "horizon": self.horizon,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class SeminormProfile:
    """Windowed q-mean estimates over a grid of window lengths.

    headline is the value at the largest window, the finite-horizon proxy
    for the limiting seminorm; the full profile is kept so stabilization
    can be inspected instead of extrapolated.
    """

    q: float
    window_grid: tuple[int, ...]
    estimates: tuple[float, ...]
    headline: float
    horizon: int

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "window_grid": list(self.window_grid),
            "estimates": list(self.estimates),
            "headline": self.headline,
            "horizon": self.horizon,
        }

    def write_csv(self, stream) -> None:
        stream.write("L,value\n")
        for L, v in zip(self.window_grid, self.estimates):
            stream.write(f"{L},{float(v)!r}\n")


def translate_diff(f, tau: int) -> SeriesView:
    """The difference sequence u(n) = f(n+tau) - f(n), n = 0..N-1-tau."""
    f = _as_series(f)
    if tau < 1:
        raise ValueError(f"tau must be a positive integer, got {tau}")
    if tau >= f.horizon:
        raise ValueError(f"tau={tau} leaves no pairs inside horizon {f.horizon}")
    v = f.values
    return SeriesView(values=v[tau:] - v[:-tau], offset=f.offset)


def sup_translate_distance(f, tau: int) -> float:
    """max |f(n+tau) - f(n)| over the horizon."""
    return float(np.max(np.abs(translate_diff(f, tau).values)))


def translate_sup_profile(f, tau_max: int) -> np.ndarray:
    """sup_translate_distance for every tau = 1..tau_max, as one array.

    Shared by translation-set queries at many epsilon values; index t-1
    holds the distance for shift t.
    """
    f = _as_series(f)
    if not 1 <= tau_max < f.horizon:
        raise ValueError(f"tau_max must lie in 1..{f.horizon - 1}, got {tau_max}")
    v = f.values
    out = np.empty(tau_max, dtype=np.float64)
    for t in range(1, tau_max + 1):
        out[t - 1] = np.max(np.abs(v[t:] - v[:-t]))
    return out


def bohr_translation_set(f, epsilon: float, tau_max: int, distances: np.ndarray | None = None) -> TranslationReport:
    """Accepted shifts {tau : sup-distance < epsilon} and their gap statistic.

    Acceptance is strict (< epsilon); ties at exactly epsilon are rejected.
    Pass `distances` from translate_sup_profile to amortize over epsilons.
    """
    f = _as_series(f)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if distances is None:
        distances = translate_sup_profile(f, tau_max)
    elif len(distances) < tau_max:
        raise ValueError("precomputed distances cover fewer shifts than tau_max")
    accepted = tuple(int(t) for t in range(1, tau_max + 1) if distances[t - 1] < epsilon)
    if accepted:
        anchored = (0,) + accepted
        gaps = [b - a for a, b in zip(anchored, anchored[1:])]
        gaps.append(tau_max - accepted[-1])
        max_gap = max(gaps)
    else:
        max_gap = tau_max + 1
    return TranslationReport(
        epsilon=float(epsilon), tau_max=int(tau_max), taus=accepted, max_gap=int(max_gap), horizon=f.horizon
    )


def _window_grid_ok(grid, limit: int) -> tuple[int, ...]:
    grid = tuple(int(L) for L in grid)
    if not grid:
        raise ValueError("window grid must be nonempty")
    if any(L < 1 for L in grid):
        raise ValueError("window lengths must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("window grid must be strictly increasing")
    if grid[-1] > limit:
        raise ValueError(f"largest window {grid[-1]} exceeds series length {limit}")
    return grid


def weyl_profile(u, q: float, window_grid) -> SeminormProfile:
    """Worst windowed q-mean of |u| per window length L.

    For each L the estimate is max over starts S of
    ((1/L) sum_{n=S}^{S+L-1} |u(n)|**q)**(1/q); the sliding max is the
    finite-horizon stand-in for the sup over all starts.
    """
    u = _as_series(u)
    if not q >= 1:
        raise ValueError(f"q must be at least 1, got {q}")
    grid = _window_grid_ok(window_grid, u.horizon)
    powers = np.abs(u.values) ** q
    csum = np.concatenate([[0.0], np.cumsum(powers)])
    estimates = []
    for L in grid:
        windows = csum[L:] - csum[:-L]
        estimates.append(float((np.max(windows) / L) ** (1.0 / q)))
    return SeminormProfile(
        q=float(q),
        window_grid=grid,
        estimates=tuple(estimates),
        headline=estimates[-1],
        horizon=u.horizon,
    )


def besicovitch_profile(u, q: float, window_grid) -> SeminormProfile:
    """Prefix q-means of |u|: the window is anchored at 0."""
    u = _as_series(u)
    if not q >= 1:
        raise ValueError(f"q must be at least 1, got {q}")
    grid = _window_grid_ok(window_grid, u.horizon)
    powers = np.abs(u.values) ** q
    csum = np.cumsum(powers)
    estimates = [float((csum[L - 1] / L) ** (1.0 / q)) for L in grid]
    return SeminormProfile(
        q=float(q),
        window_grid=grid,
        estimates=tuple(estimates),
        headline=estimates[-1],
        horizon=u.horizon,
    )


def _class_ranges(values: np.ndarray, modulus: int) -> np.ndarray:
    """Per-residue-class (max - min) for classes n mod modulus.

    The sup of |f(a) - f(b)| over pairs in one class equals the class range,
    so the modulus reduces to a columnwise min/max after padding the array
    to a whole number of rows.
    """
    n = values.size
    rows = -(-n // modulus)
    pad = rows * modulus - n
    hi = np.pad(values, (0, pad), constant_values=-np.inf).reshape(rows, modulus)
    lo = np.pad(values, (0, pad), constant_values=np.inf).reshape(rows, modulus)
    return hi.max(axis=0) - lo.min(axis=0)


def padic_modulus(f, ctx: PadicContext, K: int) -> float:
    """omega(K): worst |f(n + p**K u) - f(n)| over in-horizon pairs."""
    f = _as_series(f)
    modulus = checked_modulus(ctx.p, K)
    if modulus >= f.horizon:
        raise ValueError(f"p**K = {modulus} admits no pairs inside horizon {f.horizon}")
    return float(np.max(_class_ranges(f.values, modulus)))


def padic_modulus_field(grid_values, ctx: PadicContext, K: int) -> float:
    """Field modulus: worst |f(n + p**K m) - f(n)| over in-box pairs.

    `grid_values` is either a FieldPath or a d-dimensional array over the
    box {0..side}**d.  Residue classes are componentwise mod p**K; each
    class attains its sup at (class max, class min).
    """
    grid = grid_values.grid() if hasattr(grid_values, "grid") else np.asarray(grid_values, dtype=np.float64)
    if grid.ndim < 1:
        raise ValueError("field must have at least one axis")
    side = grid.shape[0] - 1
    if any(s != side + 1 for s in grid.shape):
        raise ValueError(f"field grid must be a cube, got shape {grid.shape}")
    modulus = checked_modulus(ctx.p, K)
    if modulus > side:
        raise ValueError(f"p**K = {modulus} exceeds box side {side}")
    worst = 0.0
    for residue in itertools.product(range(modulus), repeat=grid.ndim):
        block = grid[tuple(slice(c, None, modulus) for c in residue)]
        worst = max(worst, float(block.max() - block.min()))
    return worst


@dataclass(frozen=True)
class FieldTranslationReport:
    """Accepted translation vectors h in {0..h_max}**d and box-density stats.

    worst_empty_side: the largest box side L such that some box
    a + {0..L}**d inside the tested range contains no accepted vector
    (0 when every box of every side contains one).  covering_side: the
    smallest L such that every such box contains an accepted vector.
    """

    epsilon: float
    h_max: int
    dim: int
    accepted: tuple[tuple[int, ...], ...]
    worst_empty_side: int
    covering_side: int

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "h_max": self.h_max,
            "dim": self.dim,
            "accepted": [list(h) for h in self.accepted],
            "worst_empty_side": self.worst_empty_side,
            "covering_side": self.covering_side,
        }


def _box_all_occupied(acc: np.ndarray, side: int) -> bool:
    """True iff every box a + {0..side}**d inside the index range has a hit.

    Separable windowed sums: along each axis replace counts by sums over
    sliding windows of length side+1 (c[i+w-1] - c[i-1] on the cumsum).
    """
    window = side + 1
    counts = acc.astype(np.int64)
    for axis in range(acc.ndim):
        if window > counts.shape[axis]:
            raise ValueError(f"window {window} exceeds axis length {counts.shape[axis]}")
        c = np.cumsum(counts, axis=axis)
        head = np.take(c, [window - 1], axis=axis)
        if c.shape[axis] > window:
            body = np.take(c, np.arange(window, c.shape[axis]), axis=axis) - np.take(
                c, np.arange(0, c.shape[axis] - window), axis=axis
            )
            counts = np.concatenate([head, body], axis=axis)
        else:
            counts = head
    return bool(np.all(counts > 0))


def translation_vectors_field(grid_values, epsilon: float, h_max: int, enum_cap: int = 1 << 22) -> FieldTranslationReport:
    """Accepted translation vectors of a field and the density of their set.

    A vector h in {0..h_max}**d is accepted when
    max |f(n+h) - f(n)| < epsilon over pairs with both points in the box.
    h = 0 is trivially accepted.  The report carries the largest empty box
    side and the smallest covering box side of the accepted set within
    {0..h_max}**d.
    """
    grid = grid_values.grid() if hasattr(grid_values, "grid") else np.asarray(grid_values, dtype=np.float64)
    d = grid.ndim
    side = grid.shape[0] - 1
    if any(s != side + 1 for s in grid.shape):
        raise ValueError(f"field grid must be a cube, got shape {grid.shape}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 <= h_max <= side:
        raise ValueError(f"h_max must lie in 0..{side}, got {h_max}")
    if (h_max + 1) ** d > enum_cap:
        raise ValueError(f"enumerating {(h_max + 1) ** d} candidate vectors exceeds cap {enum_cap}")

    acc = np.zeros((h_max + 1,) * d, dtype=bool)
    for h in itertools.product(range(h_max + 1), repeat=d):
        if all(c == 0 for c in h):
            acc[h] = True
            continue
        shifted = grid[tuple(slice(c, None) for c in h)]
        base = grid[tuple(slice(None, grid.shape[a] - c) for a, c in enumerate(h))]
        acc[h] = bool(np.max(np.abs(shifted - base)) < epsilon)

    covering = None
    for L in range(h_max + 1):
        if _box_all_occupied(acc, L):
            covering = L
            break
    if covering is None:
        covering = h_max + 1  # not covered even by the whole tested range
    worst_empty = covering - 1 if covering > 0 else 0

    accepted = tuple(tuple(int(c) for c in h) for h in np.argwhere(acc))
    return FieldTranslationReport(
        epsilon=float(epsilon),
        h_max=int(h_max),
        dim=d,
        accepted=accepted,
        worst_empty_side=int(worst_empty),
        covering_side=int(covering),
    )


def limit_periodic_approx(f, ctx: PadicContext, K: int) -> tuple[SeriesView, float]:
    """Least-residue periodization g(n) = f(n mod p**K) and its sup error.

    When p**K covers the whole horizon, g equals f and the error is 0.
    The error never exceeds padic_modulus at the same K, because each
    pair (n, n mod p**K) differs by a multiple of p**K.
    """
    f = _as_series(f)
    modulus = checked_modulus(ctx.p, K)
    v = f.values
    if modulus >= f.horizon:
        return SeriesView(values=v.copy(), offset=f.offset), 0.0
    g = v[np.arange(f.horizon, dtype=np.int64) % modulus]
    return SeriesView(values=g, offset=f.offset), float(np.max(np.abs(v - g)))


def finite_reduction_radius(f, eta: float, radius_grid, h_samples) -> int | None:
    """Smallest grid radius L with a matching base point for every sampled shift.

    For each h in h_samples we ask for some r <= L with
    max_m |(f(m+h) - f(h)) - (f(m+r) - f(r))| < eta over in-horizon m.
    Returns the smallest L in radius_grid accepted for all h, or None when
    no grid entry works.
    """
    f = _as_series(f)
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    grid = sorted(int(L) for L in radius_grid)
    if not grid:
        raise ValueError("radius grid must be nonempty")
    if grid[0] < 0:
        raise ValueError("radii must be non-negative")
    hs = [int(h) for h in h_samples]
    if not hs:
        raise ValueError("h_samples must be nonempty")
    if any(h < 0 or h >= f.horizon for h in hs):
        raise ValueError(f"sampled shifts must lie in 0..{f.horizon - 1}")
    v = f.values
    lmax = grid[-1]

    def min_radius_for(h: int) -> int | None:
        gh = v[h:] - v[h]
        for r in range(min(lmax, f.horizon - 1) + 1):
            gr = v[r:] - v[r]
            m = min(gh.size, gr.size)
            if np.max(np.abs(gh[:m] - gr[:m])) < eta:
                return r
        return None

    needed = 0
    for h in hs:
        r = min_radius_for(h)
        if r is None:
            return None
        needed = max(needed, r)
    for L in grid:
        if L >= needed:
            return L
    return None


def sup_norm(f) -> float:
    """max |f(n)| over the horizon."""
    f = _as_series(f)
    return float(np.max(np.abs(f.values)))


def running_max(f, grid=None) -> tuple[tuple[int, ...], np.ndarray]:
    """Prefix maxima M(N') = max_{n < N'} |f(n)| on a dyadic default grid.

    Returns (grid, values).  The default grid is the powers of two up to
    the horizon, with the horizon itself appended when not a power of two.
    """
    f = _as_series(f)
    n = f.horizon
    if grid is None:
        grid = []
        L = 1
        while L <= n:
            grid.append(L)
            L *= 2
        if grid[-1] != n:
            grid.append(n)
    grid = tuple(int(g) for g in grid)
    if any(g < 1 or g > n for g in grid):
        raise ValueError(f"grid entries must lie in 1..{n}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    prefix = np.maximum.accumulate(np.abs(f.values))
    return grid, prefix[np.array(grid, dtype=np.int64) - 1]
