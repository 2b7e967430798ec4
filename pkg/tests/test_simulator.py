import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specroute.algebra import BusConfig
from specroute.errors import ResourceError
from specroute.simulator import (
    HADAMARD,
    PAULI_X,
    GateKind,
    GateRecord,
    QuditRegister,
    apply_bcp,
    apply_block,
    apply_boolean_target,
    apply_cbl,
    apply_cur,
    apply_cx,
    apply_cxr,
    apply_gate,
    apply_shift,
    apply_single,
    apply_swap,
    block_matrix,
    boolean_target_matrix,
    dump_state,
    fidelity,
    init_basis,
    init_product,
    load_state,
    routing_population,
    site_distribution,
)


def levels(reg):
    """Levels of the single basis state ``reg`` holds."""
    nz = np.flatnonzero(np.abs(reg.amplitudes) > 1e-12)
    assert nz.size == 1
    return reg.levels_of(int(nz[0]))


def permutation_oracle(n, d, rule):
    """Map every level tuple through ``rule`` by explicit enumeration."""
    return {lv: tuple(rule(list(lv))) for lv in itertools.product(range(d), repeat=n)}


def check_against_oracle(n, d, apply, rule):
    for lv, want in permutation_oracle(n, d, rule).items():
        reg = init_basis(n, d, lv)
        apply(reg)
        assert levels(reg) == want, (lv, want)


def test_init_basis_index():
    reg = init_basis(2, 8, [1, 0])
    assert np.flatnonzero(reg.amplitudes).tolist() == [8]
    assert init_basis(1, 2, [0]).amplitudes.tolist() == [1, 0]
    with pytest.raises(ValueError):
        init_basis(2, 4, [4, 0])


def test_register_size_bound():
    with pytest.raises(ResourceError):
        QuditRegister(8, 8)


def test_shift_wraps():
    reg = init_basis(1, 8, [7])
    apply_shift(reg, 0, 1)
    assert levels(reg) == (0,)
    reg = init_basis(1, 8, [3])
    apply_shift(reg, 0, 0)
    assert levels(reg) == (3,)


def test_cbl_examples():
    reg = init_basis(2, 8, [1, 0])
    apply_cbl(reg, 0, 1, 1)
    assert levels(reg) == (1, 2)
    reg = init_basis(2, 8, [0, 5])
    apply_cbl(reg, 0, 1, 2)
    assert levels(reg) == (0, 5)


def test_bcp_examples():
    for w1, w2 in itertools.product((0, 1), repeat=2):
        reg = init_basis(2, 8, [w1 + 2, w2])
        apply_bcp(reg, 0, 1, 1)
        assert levels(reg) == (w1 + 2, w2 + 2)
        reg = init_basis(2, 8, [w1, w2])
        apply_bcp(reg, 0, 1, 1)
        assert levels(reg) == (w1, w2)


@pytest.mark.parametrize("d,k,sign", [(4, 1, 1), (4, 1, -1), (8, 2, 1), (8, 1, -1)])
def test_routing_permutations_match_oracle(d, k, sign):
    def cbl(lv):
        lv[2] = (lv[2] + sign * (lv[0] & 1) * (1 << k)) % d
        return lv

    def bcp(lv):
        lv[0] = (lv[0] + sign * ((lv[2] >> k) & 1) * (1 << k)) % d
        return lv

    check_against_oracle(3, d, lambda r: apply_cbl(r, 0, 2, k, sign), cbl)
    check_against_oracle(3, d, lambda r: apply_bcp(r, 2, 0, k, sign), bcp)


def test_cx_and_swap_match_oracle():
    def cx(lv):
        if lv[1] == 1 and lv[0] < 2:
            lv[0] ^= 1
        return lv

    def swap(lv):
        lv[0], lv[2] = lv[2], lv[0]
        return lv

    check_against_oracle(3, 4, lambda r: apply_cx(r, 1, 0), cx)
    check_against_oracle(3, 4, lambda r: apply_swap(r, 0, 2), swap)
    reg = init_basis(2, 2, [1, 0])
    apply_cx(reg, 0, 1)
    assert levels(reg) == (1, 1)


@pytest.mark.parametrize("d,k,sign", [(4, 1, 1), (8, 2, -1)])
def test_routing_primitives_invert(d, k, sign, nprng):
    psi = nprng.normal(size=d**2) + 1j * nprng.normal(size=d**2)
    reg = QuditRegister(2, d, psi / np.linalg.norm(psi))
    orig = reg.copy()
    apply_cbl(reg, 0, 1, k, sign)
    apply_bcp(reg, 1, 0, k, sign)
    apply_bcp(reg, 1, 0, k, -sign)
    apply_cbl(reg, 0, 1, k, -sign)
    assert fidelity(reg, orig) == pytest.approx(1.0, abs=1e-12)


def test_cur_examples():
    cfg = BusConfig(8, 1)
    reg = init_basis(1, 8, [3])
    apply_cur(reg, 0, 1, PAULI_X, cfg)
    assert levels(reg) == (2,)
    for v in (0, 1):
        reg = init_basis(1, 8, [v])
        apply_cxr(reg, 0, 1, cfg)
        assert levels(reg) == (v,)
    cfg2 = BusConfig(8, 2)
    for k in (1, 2):
        for x, y in itertools.product((0, 1), repeat=2):
            reg = init_basis(1, 8, [y + x * (1 << k)])
            apply_cxr(reg, 0, k, cfg2)
            assert levels(reg) == ((y ^ x) + x * (1 << k),)


def test_non_unitary_rejected():
    cfg = BusConfig(4, 1)
    with pytest.raises(ValueError):
        apply_cur(init_basis(1, 4, [0]), 0, 1, np.array([[1, 1], [0, 1]]), cfg)
    with pytest.raises(ValueError):
        apply_block(init_basis(1, 4, [0]), 0, 1, PAULI_X, cfg)


def test_block_and_boolean_target():
    cfg = BusConfig(8, 2)
    m = block_matrix(8, 4, HADAMARD)
    np.testing.assert_allclose(m[4:6, 4:6], HADAMARD)
    np.testing.assert_allclose(np.delete(np.delete(m, [4, 5], 0), [4, 5], 1), np.eye(6))
    np.testing.assert_allclose(boolean_target_matrix(cfg, (0, 0, 0, 0), PAULI_X), np.eye(8))
    reg = init_basis(1, 8, [6])
    apply_boolean_target(reg, 0, (0, 0, 0, 1), PAULI_X, cfg)
    assert levels(reg) == (7,)
    reg = init_basis(1, 8, [2])
    apply_boolean_target(reg, 0, (0, 0, 0, 1), PAULI_X, cfg)
    assert levels(reg) == (2,)


def test_boolean_target_equals_block_product():
    cfg = BusConfig(8, 2)
    for table in itertools.product((0, 1), repeat=4):
        prod = np.eye(8, dtype=complex)
        for s in cfg.routing_offsets():
            if table[s >> 1]:
                prod = block_matrix(8, s, HADAMARD) @ prod
        np.testing.assert_allclose(boolean_target_matrix(cfg, table, HADAMARD), prod, atol=1e-14)


def test_single_site_acts_on_computational_block():
    reg = init_basis(2, 4, [0, 2])
    apply_single(reg, 0, HADAMARD)
    apply_single(reg, 1, HADAMARD)
    np.testing.assert_allclose(site_distribution(reg, 0), [0.5, 0.5, 0, 0], atol=1e-14)
    np.testing.assert_allclose(site_distribution(reg, 1), [0, 0, 1, 0], atol=1e-14)


def test_fidelity_and_populations():
    a = init_basis(2, 4, [0, 1])
    b = init_basis(2, 4, [1, 1])
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(a, b) == 0.0
    with pytest.raises(ValueError):
        fidelity(a, init_basis(1, 4, [0]))
    assert routing_population(a, 1) == 0.0
    assert routing_population(init_basis(1, 4, [2]), 0) == 1.0


def test_gate_record_round_trip_and_inverse():
    g = GateRecord(GateKind.BOOLEAN, (3,), unitary=HADAMARD, table=(0, 1, 1, 0))
    assert GateRecord.from_dict(g.to_dict()) == g
    c = GateRecord(GateKind.CBL, (0, 1), k=2)
    assert c.inverse() == GateRecord(GateKind.CBL, (0, 1), k=2, sign=-1)
    assert c.inverse().inverse() == c
    with pytest.raises(ValueError):
        GateRecord(GateKind.CX, (1, 1))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gate_then_inverse_is_identity(seed):
    rs = np.random.default_rng(seed)
    cfg = BusConfig(8, 2)
    psi = rs.normal(size=8**3) + 1j * rs.normal(size=8**3)
    reg = QuditRegister(3, 8, psi / np.linalg.norm(psi))
    orig = reg.copy()
    a, b = (int(x) for x in rs.choice(3, size=2, replace=False))
    k = int(rs.integers(1, 3))
    gates = [
        GateRecord(GateKind.CBL, (a, b), k=k),
        GateRecord(GateKind.BCP, (b, a), k=k, sign=-1),
        GateRecord(GateKind.SHIFT, (a,), delta=int(rs.integers(-7, 8))),
        GateRecord(GateKind.CUR, (b,), k=k, unitary=HADAMARD),
        GateRecord(GateKind.BLOCK, (a,), offset=4, unitary=HADAMARD),
        GateRecord(GateKind.SWAP, (a, b)),
    ]
    for g in gates:
        apply_gate(reg, g, cfg)
    for g in reversed(gates):
        apply_gate(reg, g.inverse(), cfg)
    assert fidelity(reg, orig) == pytest.approx(1.0, abs=1e-12)


def test_dump_load_round_trip():
    reg = init_product(2, 4, [np.array([1, 1]) / np.sqrt(2), np.array([0, 1])])
    back = load_state(dump_state(reg))
    np.testing.assert_allclose(back.amplitudes, reg.amplitudes)
    assert (back.n_sites, back.d) == (2, 4)
