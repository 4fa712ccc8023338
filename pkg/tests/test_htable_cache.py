# tests/test_htable_cache.py
import numpy as np
import pytest

from cycleweights.errors import CacheError, CapacityError, DomainError
from cycleweights.exact_oracle import build_h_table
from cycleweights.htable_cache import (
    ENTRY_DTYPE,
    HEADER,
    MAGIC,
    cache_path,
    load_htable,
    load_or_build,
    save_htable,
)
from cycleweights.weights import FAMILY_TAGS, Family, WeightSequence


@pytest.fixture
def saved(linear, cache_dir):
    table = build_h_table(linear, 300)
    return table, save_htable(table, cache_path(linear, cache_dir))


def test_cache_file_name(linear, cache_dir):
    assert cache_path(linear, cache_dir).name == "polynomial-1.0.cwht"
    with pytest.raises(DomainError):
        cache_path(WeightSequence.table([1.0, 2.0]), cache_dir)


def test_save_and_load(saved, linear):
    table, path = saved
    loaded = load_htable(path)
    assert loaded.weight == linear
    assert loaded.n_max == 300
    np.testing.assert_array_equal(loaded.mantissa, table.mantissa)
    np.testing.assert_array_equal(loaded.exponent, table.exponent)
    assert not path.with_suffix(".cwht.tmp").exists()


def test_bad_magic(saved):
    _, path = saved
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(CacheError, match="magic"):
        load_htable(path)


def test_unsupported_version(saved):
    _, path = saved
    raw = path.read_bytes()
    header = HEADER.pack(MAGIC, 2, FAMILY_TAGS[Family.POLYNOMIAL], 1.0, 300)
    path.write_bytes(header + raw[HEADER.size:])
    with pytest.raises(CacheError, match="version"):
        load_htable(path)


def test_truncated_file(saved):
    _, path = saved
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(CacheError):
        load_htable(path)


def test_corrupted_entries_fail_residual_check(saved):
    _, path = saved
    raw = path.read_bytes()
    entries = np.frombuffer(raw, dtype=ENTRY_DTYPE, offset=HEADER.size).copy()
    entries["exponent"][1::2] += 1
    path.write_bytes(raw[:HEADER.size] + entries.tobytes())
    with pytest.raises(CacheError, match="residual"):
        load_htable(path)


def test_missing_cache(tmp_path):
    with pytest.raises(CacheError):
        load_htable(tmp_path / "nothing.cwht")


def test_load_or_build(linear, cache_dir):
    first = load_or_build(linear, 120, cache_dir)
    assert cache_path(linear, cache_dir).exists()
    second = load_or_build(linear, 100, cache_dir)
    assert second.n_max == first.n_max == 120

    with pytest.raises(CapacityError):
        load_or_build(linear, 200, cache_dir)
    extended = load_or_build(linear, 200, cache_dir, build=True)
    assert extended.n_max == 200
    assert load_htable(cache_path(linear, cache_dir)).n_max == 200


def test_table_weights_are_built_in_memory(cache_dir):
    w = WeightSequence.table([1.0, 2.0, 3.0])
    table = load_or_build(w, 40, cache_dir)
    assert table.n_max == 40
    assert not cache_dir.exists()
