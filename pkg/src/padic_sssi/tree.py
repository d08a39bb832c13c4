"""Truncated layered-noise simulation of p-adic H-sssi processes.

The process is a weighted sum of independent periodically-extended noise
layers: level k holds i.i.d. values xi_{k,r} indexed by residues
r mod p**(k+1) (residue tuples in dimension d), extended periodically, and

    X_n = sum_{k=0}^{Kmax} p**(-k*H) * (xi_{k, n} - xi_{k, 0}).

Truncation at Kmax is explicit: the expected absolute tail error at any
fixed index is at most truncation_tail_bound(spec).  Because each xi is
addressed by (seed, k, r) through a counter-based generator, levels can be
materialized densely, evaluated lazily at arbitrary indices without
storage, and extended to a larger Kmax without disturbing existing levels.

Sublattice increment paths u -> X_{r + p**K u} - X_r are computed from
levels k >= K only: a step of p**K leaves residues mod p**(k+1) unchanged
for every k < K, so those levels cancel exactly and the direct k >= K sum
avoids the float cancellation noise of naive differencing.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass

import numpy as np

from . import laws
from .errors import ResourceCapError
from .laws import IncrementLaw
from .padic import PadicContext, checked_modulus

# Ceiling on total stored level entries (counts, not bytes); one entry is a
# float64, so the default allows about 270 MB of level data.
DEFAULT_MEMORY_CAP = 1 << 25

_U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class TreeSpec:
    """Complete description of one simulated process.

    p: prime branching base; hurst: scaling exponent H > 0; kmax: truncation
    level (levels 0..kmax are simulated); law: increment distribution;
    seed: 64-bit master seed; dim: lattice dimension.
    """

    p: int
    hurst: float
    kmax: int
    law: IncrementLaw
    seed: int
    dim: int = 1

    def __post_init__(self) -> None:
        PadicContext(self.p)  # primality check
        if not self.hurst > 0:
            raise ValueError(f"hurst must be positive, got {self.hurst}")
        if self.kmax < 0:
            raise ValueError(f"kmax must be non-negative, got {self.kmax}")
        if self.dim < 1:
            raise ValueError(f"dim must be at least 1, got {self.dim}")
        if not 0 <= self.seed <= _U64_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        laws.require_valid(self.law, for_tree=True)
        # residue tuples are linearized into a 64-bit stream tag, so the
        # deepest level's index space must fit that domain.
        checked_modulus(self.p, (self.kmax + 1) * self.dim)

    def level_modulus(self, k: int) -> int:
        """Per-axis period p**(k+1) of level k."""
        if not 0 <= k <= self.kmax:
            raise ValueError(f"level {k} outside 0..{self.kmax}")
        return self.p ** (k + 1)

    def level_entry_count(self, k: int) -> int:
        return self.level_modulus(k) ** self.dim

    def total_entry_count(self) -> int:
        return sum(self.level_entry_count(k) for k in range(self.kmax + 1))

    def weight(self, k: int) -> float:
        """Level weight p**(-k*H)."""
        return float(self.p) ** (-k * self.hurst)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "hurst": self.hurst,
            "kmax": self.kmax,
            "law": laws.law_to_dict(self.law),
            "seed": self.seed,
            "dim": self.dim,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TreeSpec":
        try:
            return cls(
                p=int(obj["p"]),
                hurst=float(obj["hurst"]),
                kmax=int(obj["kmax"]),
                law=laws.law_from_dict(obj["law"]),
                seed=int(obj["seed"]),
                dim=int(obj.get("dim", 1)),
            )
        except KeyError as missing:
            raise ValueError(f"tree spec is missing field {missing}") from None


def level_values(spec: TreeSpec, k: int, residues: np.ndarray) -> np.ndarray:
    """Lazily evaluate xi_{k, r} at the given residues (no storage).

    For dim = 1, `residues` is an integer array of residues mod p**(k+1).
    For dim >= 2, the trailing axis indexes coordinates: shape (..., dim).
    Values are identical to the corresponding build_levels entries.
    """
    m = spec.level_modulus(k)
    r = np.asarray(residues, dtype=np.int64)
    if spec.dim == 1:
        flat = r
    else:
        if r.ndim == 0 or r.shape[-1] != spec.dim:
            raise ValueError(f"residue tuples must have trailing axis of size {spec.dim}")
        flat = r[..., 0].astype(np.uint64)
        for axis in range(1, spec.dim):
            flat = flat * np.uint64(m) + r[..., axis].astype(np.uint64)
    if np.any(r < 0) or np.any(r >= m):
        raise ValueError(f"residues must lie in [0, {m}) at level {k}")
    return laws.keyed_values(spec.law, spec.seed, k, flat)


@dataclass(frozen=True)
class TreeLevels:
    """Dense per-level noise arrays; level k has shape (p**(k+1),) * dim."""

    spec: TreeSpec
    arrays: tuple[np.ndarray, ...]

    def xi(self, k: int, point) -> float:
        """xi at level k, periodically extended to the whole lattice."""
        m = self.spec.level_modulus(k)
        if self.spec.dim == 1:
            if not np.ndim(point) == 0:
                raise ValueError("scalar index expected for dim=1")
            return float(self.arrays[k][int(point) % m])
        point = tuple(int(c) for c in np.atleast_1d(point))
        if len(point) != self.spec.dim:
            raise ValueError(f"index must have {self.spec.dim} coordinates")
        return float(self.arrays[k][tuple(c % m for c in point)])


def build_levels(spec: TreeSpec, memory_cap: int = DEFAULT_MEMORY_CAP) -> TreeLevels:
    """Materialize all levels 0..kmax as dense arrays.

    Raises ResourceCapError naming the offending level if cumulative entry
    counts would exceed `memory_cap`.
    """
    total = 0
    arrays = []
    for k in range(spec.kmax + 1):
        count = spec.level_entry_count(k)
        total += count
        if total > memory_cap:
            raise ResourceCapError(
                f"level {k} pushes stored entries to {total}, above the cap of {memory_cap}"
            )
        m = spec.level_modulus(k)
        if spec.dim == 1:
            vals = level_values(spec, k, np.arange(m, dtype=np.int64))
        else:
            idx = np.indices((m,) * spec.dim).reshape(spec.dim, -1).T
            vals = level_values(spec, k, idx).reshape((m,) * spec.dim)
        vals.setflags(write=False)
        arrays.append(vals)
    return TreeLevels(spec=spec, arrays=tuple(arrays))


def xi_at(levels: TreeLevels, k: int, point) -> float:
    """Periodic lookup xi_{k, point mod p**(k+1)} (componentwise residue)."""
    return levels.xi(k, point)


@dataclass(frozen=True)
class Path:
    """A sample path X_0..X_{N-1} on the non-negative integers."""

    values: np.ndarray
    spec: TreeSpec
    horizon: int


@dataclass(frozen=True)
class FieldPath:
    """A sample field over the box {0..side}**dim, stored as a dim-d grid."""

    values: np.ndarray
    spec: TreeSpec
    side: int

    def grid(self) -> np.ndarray:
        return self.values

    def flat(self) -> np.ndarray:
        """Values over box_points((0,..,0), side) in lexicographic order."""
        return self.values.ravel()


def path(levels: TreeLevels, horizon: int) -> Path:
    """Evaluate X_0..X_{horizon-1} from dense levels (dim = 1 only)."""
    spec = levels.spec
    if spec.dim != 1:
        raise ValueError("path requires dim=1; use field for higher dimensions")
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    n = np.arange(horizon, dtype=np.int64)
    acc = np.zeros(horizon, dtype=np.float64)
    # smallest weights first keeps the float accumulation error tiny
    for k in range(spec.kmax, -1, -1):
        arr = levels.arrays[k]
        m = spec.level_modulus(k)
        acc += spec.weight(k) * (arr[n % m] - arr[0])
    return Path(values=acc, spec=spec, horizon=horizon)


def lazy_path(spec: TreeSpec, horizon: int) -> Path:
    """Evaluate a path without materializing dense levels.

    Produces bit-identical values to path(build_levels(spec), horizon):
    the same addressed draws are combined in the same order.
    """
    if spec.dim != 1:
        raise ValueError("lazy_path requires dim=1")
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    n = np.arange(horizon, dtype=np.int64)
    acc = np.zeros(horizon, dtype=np.float64)
    for k in range(spec.kmax, -1, -1):
        m = spec.level_modulus(k)
        vals = level_values(spec, k, n % m)
        origin = level_values(spec, k, np.int64(0))
        acc += spec.weight(k) * (vals - origin)
    return Path(values=acc, spec=spec, horizon=horizon)


def path_values(spec: TreeSpec, indices, seeds=None) -> np.ndarray:
    """Evaluate X at arbitrary indices, optionally across replica seeds.

    `indices` and `seeds` broadcast against each other, so marginals of many
    independent replicas are one vectorized call: scalar index + seed array
    gives one value per replica.  dim = 1 only.
    """
    if spec.dim != 1:
        raise ValueError("path_values requires dim=1")
    idx = np.asarray(indices, dtype=np.int64)
    if np.any(idx < 0):
        raise ValueError("indices must be non-negative")
    seed = spec.seed if seeds is None else np.asarray(seeds, dtype=np.uint64)
    out_shape = np.broadcast_shapes(idx.shape, np.shape(seed))
    acc = np.zeros(out_shape, dtype=np.float64)
    for k in range(spec.kmax, -1, -1):
        m = spec.level_modulus(k)
        r = idx % m
        vals = laws.keyed_values(spec.law, seed, k, r)
        origin = laws.keyed_values(spec.law, seed, k, np.zeros_like(r))
        acc += spec.weight(k) * (vals - origin)
    return acc


def field(levels: TreeLevels, side: int) -> FieldPath:
    """Evaluate the field over the box {0..side}**dim."""
    spec = levels.spec
    if side < 0:
        raise ValueError(f"side must be non-negative, got {side}")
    shape = (side + 1,) * spec.dim
    acc = np.zeros(shape, dtype=np.float64)
    coords = np.arange(side + 1, dtype=np.int64)
    for k in range(spec.kmax, -1, -1):
        arr = levels.arrays[k]
        m = spec.level_modulus(k)
        ax = coords % m
        if spec.dim == 1:
            block = arr[ax]
            origin = arr[0]
        else:
            block = arr[np.ix_(*([ax] * spec.dim))]
            origin = arr[(0,) * spec.dim]
        acc += spec.weight(k) * (block - origin)
    return FieldPath(values=acc, spec=spec, side=side)


def sublattice_path(levels: TreeLevels, r: int, K: int, horizon: int) -> Path:
    """The recentered sublattice path u -> X_{r + p**K u} - X_r.

    Computed directly from levels K..Kmax; levels below K cancel exactly
    because a step of p**K does not move residues mod p**(k+1) for k < K.
    """
    spec = levels.spec
    if spec.dim != 1:
        raise ValueError("sublattice_path requires dim=1")
    if not 0 <= K <= spec.kmax:
        raise ValueError(f"K must lie in 0..kmax={spec.kmax}, got {K}")
    if r < 0:
        raise ValueError(f"base point must be non-negative, got {r}")
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    step = checked_modulus(spec.p, K)
    top = r + step * (horizon - 1)
    if top > (1 << 62):
        raise OverflowError(f"sublattice index {top} exceeds the supported range")
    u = np.arange(horizon, dtype=np.int64)
    acc = np.zeros(horizon, dtype=np.float64)
    for k in range(spec.kmax, K - 1, -1):
        arr = levels.arrays[k]
        m = spec.level_modulus(k)
        acc += spec.weight(k) * (arr[(r + step * u) % m] - arr[r % m])
    return Path(values=acc, spec=spec, horizon=horizon)


def truncation_tail_bound(spec: TreeSpec) -> float:
    """Upper bound on E|X_n - X_n^trunc| from the discarded levels > Kmax."""
    e_abs = laws.mean_abs(spec.law)
    ratio = float(spec.p) ** (-spec.hurst)
    return 2.0 * e_abs * ratio ** (spec.kmax + 1) / (1.0 - ratio)


# ---------------------------------------------------------------------------
# serialization: CSV for spreadsheets, a binary record for exact roundtrips

_MAGIC = b"PSSI"
_FORMAT_VERSION = 1
_KIND_PATH = 0
_KIND_FIELD = 1


def write_path_csv(p: Path, stream: io.TextIOBase) -> None:
    """index,value rows; repr keeps float64 roundtrip exactness."""
    stream.write("index,value\n")
    for i, v in enumerate(p.values):
        stream.write(f"{i},{float(v)!r}\n")


def write_field_csv(f: FieldPath, stream: io.TextIOBase) -> None:
    dim = f.spec.dim
    header = ",".join(f"i{a}" for a in range(dim))
    stream.write(header + ",value\n")
    flat = f.flat()
    for pos, v in enumerate(flat):
        coords = np.unravel_index(pos, f.values.shape)
        stream.write(",".join(str(int(c)) for c in coords) + f",{float(v)!r}\n")


def _spec_json_bytes(spec: TreeSpec) -> bytes:
    return json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_binary(obj: Path | FieldPath, stream: io.BufferedIOBase) -> None:
    """Binary dump: magic, version, spec record, then little-endian float64."""
    if isinstance(obj, Path):
        kind, extent, values = _KIND_PATH, obj.horizon, obj.values
    elif isinstance(obj, FieldPath):
        kind, extent, values = _KIND_FIELD, obj.side, obj.flat()
    else:
        raise TypeError(f"expected Path or FieldPath, got {obj!r}")
    blob = _spec_json_bytes(obj.spec)
    stream.write(_MAGIC)
    stream.write(struct.pack("<B", _FORMAT_VERSION))
    stream.write(struct.pack("<BIQQ", kind, len(blob), extent, values.size))
    stream.write(blob)
    stream.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def read_binary(stream: io.BufferedIOBase) -> Path | FieldPath:
    """Parse a binary dump back into a Path or FieldPath."""
    magic = stream.read(4)
    if magic != _MAGIC:
        raise ValueError(f"bad magic {magic!r}; not a path/field dump")
    (version,) = struct.unpack("<B", stream.read(1))
    if version != _FORMAT_VERSION:
        raise ValueError(f"unsupported format version {version}")
    kind, blob_len, extent, count = struct.unpack("<BIQQ", stream.read(21))
    spec = TreeSpec.from_dict(json.loads(stream.read(blob_len).decode("utf-8")))
    raw = stream.read(8 * count)
    if len(raw) != 8 * count:
        raise ValueError("truncated value block")
    values = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    if kind == _KIND_PATH:
        if count != extent:
            raise ValueError("path length disagrees with horizon")
        return Path(values=values, spec=spec, horizon=int(extent))
    if kind == _KIND_FIELD:
        side = int(extent)
        shape = (side + 1,) * spec.dim
        if count != int(np.prod(shape)):
            raise ValueError("field size disagrees with box side")
        return FieldPath(values=values.reshape(shape), spec=spec, side=side)
    raise ValueError(f"unknown record kind {kind}")
