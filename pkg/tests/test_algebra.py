import pytest
from hypothesis import given
from hypothesis import strategies as st

from specroute.algebra import (
    BusConfig,
    bus_add,
    bus_remove,
    decode,
    encode,
    extract,
    max_buses,
    min_dimension,
)
from specroute.errors import BusAbsentError, BusOccupiedError, ConfigurationError


def test_encode_examples():
    cfg = BusConfig(16, 3)
    assert encode(1, [1, 0, 1], cfg) == 11
    assert encode(0, [0, 0, 0], cfg) == 0
    assert encode(1, [1, 1, 1], cfg) == 15 == 2 ** (cfg.K + 1) - 1


def test_encode_length_mismatch():
    with pytest.raises(ConfigurationError):
        encode(1, [1, 0], BusConfig(16, 3))


def test_extract_digits():
    assert extract(11, 2) == 0
    assert extract(11, 3) == 1
    assert extract(11, 0) == 1
    with pytest.raises(ValueError):
        extract(11, 4, BusConfig(16, 3))


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [0, 1])
@pytest.mark.parametrize("y", [0, 1])
def test_extract_recovers_routed_bit(k, x, y):
    assert extract(y + x * (1 << k), k) == x


def test_bus_add_remove_examples():
    cfg = BusConfig(16, 3)
    assert bus_add(3, {2}, cfg) == 7
    assert extract(7, 1) == 1
    assert bus_add(0, set(), cfg) == 0
    assert bus_remove(7, {2}, cfg) == 3
    assert bus_remove(15, {1, 2, 3}, cfg) == 1


def test_bus_errors():
    cfg = BusConfig(16, 3)
    with pytest.raises(BusOccupiedError):
        bus_add(7, {2}, cfg)
    with pytest.raises(BusAbsentError):
        bus_remove(3, {2}, cfg)
    with pytest.raises(ConfigurationError):
        bus_add(0, {4}, cfg)


def test_dimension_bounds():
    assert min_dimension(0) == 2
    assert min_dimension(1) == 4
    assert min_dimension(2) == 8
    assert max_buses(5) == 1
    assert max_buses(7) == 1
    assert max_buses(8) == 2
    assert max_buses(16) == 3
    with pytest.raises(ValueError):
        max_buses(1)


def test_config_rejects_aliasing():
    with pytest.raises(ConfigurationError):
        BusConfig(3, 1)
    with pytest.raises(ConfigurationError):
        BusConfig(7, 2)
    assert BusConfig(8, 2).routing_offsets() == (0, 2, 4, 6)


@given(st.integers(0, 4).flatmap(lambda K: st.tuples(st.just(K), st.lists(st.integers(0, 1), min_size=K + 1, max_size=K + 1))))
def test_encode_decode_round_trip(case):
    K, bits = case
    cfg = BusConfig(min_dimension(K), K)
    r = encode(bits[0], bits[1:], cfg)
    assert decode(r, cfg) == (bits[0], tuple(bits[1:]))
    assert 0 <= r <= cfg.max_value < cfg.d


@given(st.integers(1, 4).flatmap(lambda K: st.tuples(st.just(K), st.integers(0, 2 ** (K + 1) - 1), st.sets(st.integers(1, K)))))
def test_add_then_remove_is_identity(case):
    K, r, buses = case
    cfg = BusConfig(min_dimension(K), K)
    mask = sum(1 << k for k in buses)
    if r & mask:
        with pytest.raises(BusOccupiedError):
            bus_add(r, buses, cfg)
    else:
        up = bus_add(r, buses, cfg)
        assert extract(up, 0) == extract(r, 0)
        assert bus_remove(up, buses, cfg) == r


@given(st.integers(2, 1 << 12))
def test_max_buses_is_largest_admissible(d):
    K = max_buses(d)
    assert min_dimension(K) <= d < min_dimension(K + 1)
