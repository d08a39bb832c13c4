"""Hierarchical tree construction: paths, fields, truncation, storage."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_sssi import tree
from padic_sssi.errors import ResourceCapError
from padic_sssi.laws import Gaussian, Rademacher, SymmetricPareto
from padic_sssi.tree import TreeSpec


def make_spec(p=2, hurst=1.0, kmax=3, law=None, seed=12345, dim=1):
    return TreeSpec(p=p, hurst=hurst, kmax=kmax, law=law or Rademacher(), seed=seed, dim=dim)


def test_level_sizes_example():
    spec = make_spec(p=2, kmax=3)
    assert [spec.level_modulus(k) for k in range(4)] == [2, 4, 8, 16]
    assert [spec.level_entry_count(k) for k in range(4)] == [2, 4, 8, 16]
    assert spec.total_entry_count() == 30
    spec2 = make_spec(p=3, kmax=2, dim=2)
    assert [spec2.level_entry_count(k) for k in range(3)] == [9, 81, 729]


def test_spec_validation():
    with pytest.raises(ValueError):
        make_spec(p=4)
    with pytest.raises(ValueError):
        make_spec(hurst=0.0)
    with pytest.raises(ValueError):
        make_spec(hurst=-1.0)
    with pytest.raises(ValueError):
        make_spec(kmax=-1)
    with pytest.raises(ValueError):
        make_spec(dim=0)
    with pytest.raises(ValueError):
        make_spec(seed=-1)
    with pytest.raises(ValueError):
        make_spec(seed=2**64)
    with pytest.raises(ValueError):
        make_spec(law=SymmetricPareto(0.9))  # integrability gate
    with pytest.raises(OverflowError):
        make_spec(p=2, kmax=63)
    with pytest.raises(OverflowError):
        make_spec(p=2, kmax=33, dim=2)


def test_spec_weights():
    spec = make_spec(p=2, hurst=0.5, kmax=4)
    for k in range(5):
        assert spec.weight(k) == pytest.approx(2.0 ** (-0.5 * k))
    assert spec.weight(0) == 1.0


def test_spec_dict_roundtrip():
    for spec in (
        make_spec(),
        make_spec(p=3, hurst=0.7, kmax=5, law=Gaussian(2.0), seed=9, dim=2),
        make_spec(law=SymmetricPareto(1.5)),
    ):
        assert TreeSpec.from_dict(spec.to_dict()) == spec


def test_path_starts_at_zero():
    levels = tree.build_levels(make_spec(law=Gaussian(1.0), kmax=5))
    x = tree.path(levels, 64)
    assert x.values[0] == 0.0
    assert x.values.shape == (64,)
    assert np.all(np.isfinite(x.values))


def test_rademacher_single_level_support():
    # Kmax = 0: X_1 = xi_{0,1} - xi_{0,0} with xi = +-1
    seen = set()
    for seed in range(40):
        spec = make_spec(kmax=0, seed=seed)
        x = tree.lazy_path(spec, 2)
        seen.add(float(x.values[1]))
    assert seen <= {-2.0, 0.0, 2.0}
    assert len(seen) == 3


def test_lazy_matches_dense_bitwise():
    for law in (Gaussian(1.0), SymmetricPareto(1.25), Rademacher()):
        spec = make_spec(law=law, kmax=6, hurst=0.7, seed=77)
        dense = tree.path(tree.build_levels(spec), 200)
        lazy = tree.lazy_path(spec, 200)
        assert np.array_equal(dense.values, lazy.values)


def test_path_against_naive_differencing():
    # direct per-index accumulation with scalar lookups
    spec = make_spec(law=Gaussian(1.0), kmax=4, hurst=0.6, seed=5)
    levels = tree.build_levels(spec)
    x = tree.path(levels, 50)
    for n in range(50):
        acc = 0.0
        for k in range(spec.kmax, -1, -1):
            m = spec.level_modulus(k)
            acc += spec.weight(k) * (tree.xi_at(levels, k, n % m) - tree.xi_at(levels, k, 0))
        assert abs(acc - x.values[n]) <= 1e-9 * max(1.0, abs(acc))


def test_xi_periodicity():
    spec = make_spec(law=Gaussian(1.0), kmax=3, seed=21)
    levels = tree.build_levels(spec)
    for k in range(4):
        m = spec.level_modulus(k)
        for n in (0, 1, m - 1):
            assert tree.xi_at(levels, k, n) == tree.xi_at(levels, k, n + m)
            assert tree.xi_at(levels, k, n) == tree.xi_at(levels, k, n - m)


def test_truncation_extension_stability():
    # adding levels beyond kmax changes the path by at most the extension's
    # own tail; for Rademacher each level contributes at most 2 * weight
    base = make_spec(kmax=3, hurst=1.0, seed=3)
    ext = make_spec(kmax=5, hurst=1.0, seed=3)
    xb = tree.lazy_path(base, 64).values
    xe = tree.lazy_path(ext, 64).values
    cap = 2.0 * (base.weight(4) + base.weight(5)) + 1e-12
    assert float(np.max(np.abs(xe - xb))) <= cap


def test_determinism_across_builds():
    spec = make_spec(law=SymmetricPareto(1.5), kmax=5, seed=44)
    a = tree.lazy_path(spec, 128).values
    b = tree.path(tree.build_levels(spec), 128).values
    c = tree.lazy_path(spec, 128).values
    assert np.array_equal(a, b) and np.array_equal(a, c)
    other = tree.lazy_path(make_spec(law=SymmetricPareto(1.5), kmax=5, seed=45), 128).values
    assert not np.array_equal(a, other)


def test_truncation_tail_bound_examples():
    # E|xi| = 1, p = 2, H = 1, Kmax = 3: 2 * 2**-4 / (1 - 1/2) = 0.25
    assert tree.truncation_tail_bound(make_spec(kmax=3, hurst=1.0)) == pytest.approx(0.25)
    # each extra level halves the bound at H = 1, p = 2
    b3 = tree.truncation_tail_bound(make_spec(kmax=3, hurst=1.0))
    b4 = tree.truncation_tail_bound(make_spec(kmax=4, hurst=1.0))
    assert b4 == pytest.approx(b3 / 2.0)
    # bound vanishes as the truncation deepens
    assert tree.truncation_tail_bound(make_spec(kmax=40, hurst=1.0)) < 1e-11
    # Gaussian E|xi| enters linearly
    g1 = tree.truncation_tail_bound(make_spec(law=Gaussian(1.0), kmax=3, hurst=1.0))
    g2 = tree.truncation_tail_bound(make_spec(law=Gaussian(2.0), kmax=3, hurst=1.0))
    assert g2 == pytest.approx(2.0 * g1)


def test_path_bounded_by_weighted_tail_sum():
    # Rademacher: |X_n| <= 2 * sum_k w_k deterministically
    spec = make_spec(kmax=6, hurst=0.5, seed=10)
    x = tree.lazy_path(spec, 128).values
    cap = 2.0 * sum(spec.weight(k) for k in range(7)) + 1e-12
    assert float(np.max(np.abs(x))) <= cap


def test_sublattice_path_identity_case():
    spec = make_spec(law=Gaussian(1.0), kmax=4, hurst=0.7, seed=8)
    levels = tree.build_levels(spec)
    direct = tree.path(levels, 32).values
    sub = tree.sublattice_path(levels, 0, 0, 32).values
    assert np.allclose(sub, direct, atol=1e-12)


def test_sublattice_path_matches_decimated_construction():
    # Y_u = sum_{k >= K} w_k (xi_{k, (r + p**K u) mod m} - xi_{k, r mod m})
    spec = make_spec(law=Gaussian(1.0), kmax=4, hurst=0.7, seed=8)
    levels = tree.build_levels(spec)
    r, K, horizon = 3, 2, 16
    got = tree.sublattice_path(levels, r, K, horizon).values
    pK = spec.p**K
    for u in range(horizon):
        acc = 0.0
        for k in range(spec.kmax, K - 1, -1):
            m = spec.level_modulus(k)
            acc += spec.weight(k) * (tree.xi_at(levels, k, (r + pK * u) % m) - tree.xi_at(levels, k, r % m))
        assert abs(acc - got[u]) <= 1e-9 * max(1.0, abs(acc))


def test_field_zero_at_deep_lattice_points():
    spec = make_spec(law=Gaussian(1.0), kmax=1, dim=2, seed=17)
    levels = tree.build_levels(spec)
    fp = tree.field(levels, 8)
    grid = fp.grid()
    step = spec.p ** (spec.kmax + 1)  # both coords multiples of 4
    assert grid[0, 0] == 0.0
    assert grid[step, 0] == 0.0
    assert grid[0, step] == 0.0
    assert grid[step, step] == 0.0
    assert grid[2 * step, 2 * step] == 0.0
    assert grid[1, 0] != 0.0


def test_field_diagonal_consistency():
    # the d = 1 path and the d = 2 field are driven by different level
    # tables, but both must vanish at the origin and be finite everywhere
    spec = make_spec(law=Gaussian(1.0), kmax=2, dim=2, seed=33)
    fp = tree.field(tree.build_levels(spec), 10)
    assert fp.grid().shape == (11, 11)
    assert np.all(np.isfinite(fp.grid()))


def test_path_values_matches_lazy_path():
    spec = make_spec(law=Gaussian(1.0), kmax=5, hurst=0.7, seed=66)
    x = tree.lazy_path(spec, 40).values
    idx = np.array([0, 1, 7, 39])
    got = tree.path_values(spec, idx)
    assert np.allclose(got, x[idx], atol=0, rtol=0)


def test_path_values_broadcasts_over_seeds():
    spec = make_spec(law=Gaussian(1.0), kmax=4, hurst=0.7, seed=66)
    seeds = np.array([100, 200, 300], dtype=np.uint64)
    got = tree.path_values(spec, np.array([5]), seeds=seeds)
    for j, s in enumerate(seeds):
        alone = tree.lazy_path(make_spec(law=Gaussian(1.0), kmax=4, hurst=0.7, seed=int(s)), 6).values[5]
        assert got.ravel()[j] == alone


def test_memory_cap_error_names_level():
    spec = make_spec(law=Gaussian(1.0), kmax=12, dim=2)
    with pytest.raises(ResourceCapError) as err:
        tree.build_levels(spec)
    assert "level" in str(err.value)


def test_level_arrays_read_only():
    levels = tree.build_levels(make_spec(kmax=2))
    with pytest.raises(ValueError):
        levels.arrays[0][0] = 99.0


def test_csv_roundtrip_path():
    spec = make_spec(law=Gaussian(1.0), kmax=3, seed=2)
    x = tree.lazy_path(spec, 17)
    buf = io.StringIO()
    tree.write_path_csv(x, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "index,value"
    assert len(lines) == 18
    parsed = np.array([float(ln.split(",")[1]) for ln in lines[1:]])
    assert np.array_equal(parsed, x.values)  # repr round-trips exactly


def test_binary_roundtrip_path_and_field():
    spec = make_spec(law=SymmetricPareto(1.5), kmax=3, seed=2)
    x = tree.lazy_path(spec, 23)
    buf = io.BytesIO()
    tree.write_binary(x, buf)
    buf.seek(0)
    back = tree.read_binary(buf)
    assert back.spec == spec
    assert back.horizon == 23
    assert np.array_equal(back.values, x.values)

    fspec = make_spec(law=Gaussian(1.0), kmax=1, dim=2, seed=4)
    fp = tree.field(tree.build_levels(fspec), 6)
    buf = io.BytesIO()
    tree.write_binary(fp, buf)
    buf.seek(0)
    fback = tree.read_binary(buf)
    assert fback.spec == fspec
    assert np.array_equal(np.asarray(fback.grid()), np.asarray(fp.grid()))


def test_binary_rejects_corrupt_stream():
    buf = io.BytesIO(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError):
        tree.read_binary(buf)


@given(
    st.sampled_from([2, 3, 5]),
    st.integers(min_value=0, max_value=4),
    st.integers(min_value=0, max_value=2**32),
)
@settings(max_examples=25, deadline=None)
def test_path_zero_invariant_any_spec(p, kmax, seed):
    spec = TreeSpec(p=p, hurst=0.8, kmax=kmax, law=Gaussian(1.0), seed=seed, dim=1)
    assert tree.lazy_path(spec, 4).values[0] == 0.0
