import math

import numpy as np
import pytest

from specroute.algebra import BusConfig
from specroute.circuits import Circuit, build_routed_fanin, conjunction, probe_state, star_fanin_paths
from specroute.noise_lab import (
    DEFAULT_T1,
    MasterResult,
    NoiseModel,
    TrajectoryConfig,
    TrajectoryResult,
    chain_pair,
    collapse_operators,
    distance_sweep,
    evolve,
    evolve_master,
    evolve_trajectories,
    leakage_channel,
    leakage_kraus,
    threshold_scan,
)
from specroute.simulator import GateKind, GateRecord, init_basis


def idle_circuit(d=2):
    return Circuit(1, BusConfig(d, 0) if d < 4 else BusConfig(d, 1), [GateRecord(GateKind.SHIFT, (0,), delta=0)])


def test_collapse_operators():
    assert collapse_operators(5, NoiseModel()) == []
    ops = collapse_operators(2, NoiseModel(t1=(10.0,)))
    assert len(ops) == 1
    assert ops[0].rate == pytest.approx(0.1)
    np.testing.assert_array_equal(ops[0].matrix, [[0, 1], [0, 0]])


def test_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(t1=(0.0,))
    with pytest.raises(ValueError):
        NoiseModel(leak_eps=1.0)
    m = NoiseModel(t1=(80.0, 40.0)).with_higher_level_multiplier(2.0, levels=4)
    assert m.t1 == (80.0, 80.0, 80.0)


def test_leakage_kraus_completeness():
    for eps in (0.0, 0.002, 0.5):
        k0, k1 = leakage_kraus(4, 1, eps)
        np.testing.assert_allclose(k0.conj().T @ k0 + k1.conj().T @ k1, np.eye(4), atol=1e-12)
    rho = np.diag([0.3, 0.7, 0, 0]).astype(complex)
    np.testing.assert_allclose(leakage_channel(rho, 0.0), rho)
    half = leakage_channel(np.diag([1.0, 0.0]).astype(complex), 0.5)
    np.testing.assert_allclose(np.diag(half).real, [0.5, 0.5], atol=1e-12)
    assert abs(np.trace(half) - 1) <= 1e-12


@pytest.mark.parametrize("t", [0.5, 3.0, 12.0])
def test_idle_decay_closed_form(t):
    model = NoiseModel(t1=(10.0,), routing_time=t)
    res = evolve_master(init_basis(1, 2, [1]), idle_circuit(), model)
    assert res.fidelity == pytest.approx(math.exp(-t / 10.0), abs=1e-6)
    assert res.trace_drift <= 1e-8


def test_idle_decay_trajectories():
    model = NoiseModel(t1=(10.0,), routing_time=3.0)
    res = evolve_trajectories(init_basis(1, 2, [1]), idle_circuit(), model, TrajectoryConfig(2000, 3))
    assert abs(res.fidelity - math.exp(-0.3)) <= 3 * res.stderr


def test_zero_duration_is_ideal():
    routed, _ = chain_pair(3, 5)
    model = NoiseModel(t1=DEFAULT_T1, routing_time=0.0, target_time=0.0, swap_time=0.0)
    res = evolve_master(probe_state(routed), routed, model)
    assert res.fidelity == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("L", [1, 2])
def test_ideal_fanin_both_backends(L):
    paths, n = star_fanin_paths(2, L)
    circ = build_routed_fanin(paths, conjunction(2), cfg=BusConfig(8, 2), n_sites=n)
    probe = probe_state(circ)
    traj = evolve_trajectories(probe, circ, NoiseModel(), TrajectoryConfig(5, 0))
    assert traj.fidelity == pytest.approx(1.0, abs=1e-12) and traj.stderr == 0.0
    assert max(traj.routing_populations) <= 1e-12
    if L == 1:
        res = evolve_master(probe, circ, NoiseModel())
        assert res.fidelity == pytest.approx(1.0, abs=1e-12)
        assert max(res.routing_populations) <= 1e-12


def test_trajectories_agree_with_master():
    routed, _ = chain_pair(2, 5)
    probe = probe_state(routed)
    model = NoiseModel(t1=DEFAULT_T1)
    exact = evolve_master(probe, routed, model)
    mc = evolve_trajectories(probe, routed, model, TrajectoryConfig(300, 11))
    assert abs(mc.fidelity - exact.fidelity) <= 3 * mc.stderr


def test_trajectories_deterministic():
    routed, _ = chain_pair(2, 5)
    probe = probe_state(routed)
    model = NoiseModel(t1=DEFAULT_T1, leak_eps=0.01)
    a = evolve_trajectories(probe, routed, model, TrajectoryConfig(40, 5))
    b = evolve_trajectories(probe, routed, model, TrajectoryConfig(40, 5))
    assert a.fidelity == b.fidelity and np.array_equal(a.samples, b.samples)


def test_leakage_lowers_fidelity():
    routed, _ = chain_pair(2, 5)
    probe = probe_state(routed)
    clean = evolve_master(probe, routed, NoiseModel())
    leaky = evolve_master(probe, routed, NoiseModel(leak_eps=0.01))
    assert clean.fidelity == pytest.approx(1.0, abs=1e-12)
    assert leaky.fidelity < 1.0 - 1e-3
    assert leaky.trace_drift <= 1e-8


def test_evolve_backend_rule():
    small, _ = chain_pair(2, 5)
    big, _ = chain_pair(4, 5)
    assert isinstance(evolve(probe_state(small), small, NoiseModel()), MasterResult)
    assert isinstance(evolve(probe_state(big), big, NoiseModel(), TrajectoryConfig(2)), TrajectoryResult)


def test_distance_sweep_limits():
    ideal = distance_sweep([2, 3], 5, NoiseModel(), TrajectoryConfig(5))
    assert all(r["fid_routed"] == pytest.approx(1.0) and r["fid_swap"] == pytest.approx(1.0) for r in ideal)
    relaxed = distance_sweep([2], 5, NoiseModel(t1=(0.05,)), TrajectoryConfig(5))
    assert relaxed[0]["fid_routed"] == pytest.approx(0.5, abs=1e-3)
    assert relaxed[0]["fid_swap"] == pytest.approx(0.5, abs=1e-3)


def test_distance_sweep_decreases_with_length():
    rows = distance_sweep([2, 3], 5, None, TrajectoryConfig(5))
    assert rows[0]["fid_routed"] > rows[1]["fid_routed"]
    assert rows[0]["fid_swap"] > rows[1]["fid_swap"]


def test_threshold_scan_ideal_corner():
    rows = threshold_scan([0.0], [1e6], L=2, d=8)
    assert rows[0]["win"] >= 0.0
