import json
import math

import numpy as np
import pytest

from advbound import bounds, problems, simulator


def grover_success(n, k):
    """Independent closed form for the marked-element hit probability."""
    theta = math.asin(1 / math.sqrt(n))
    return math.sin((2 * k + 1) * theta) ** 2


def test_super_oracle_is_permutation_and_involution():
    p = problems.build_search(3)
    oracle = simulator.super_oracle(p)
    assert set(np.unique(oracle)) == {0.0, 1.0}
    assert np.array_equal(oracle.sum(axis=0), np.ones(oracle.shape[0]))
    assert np.abs(oracle @ oracle - np.eye(oracle.shape[0])).max() == 0  # binary outputs
    pe = problems.build_index_erasure(1, 3)
    oe = simulator.super_oracle(pe)
    assert np.abs(oe @ oe.T - np.eye(oe.shape[0])).max() == 0  # permutation, not involution
    assert np.abs(oe @ oe - np.eye(oe.shape[0])).max() > 0


def test_super_oracle_entangles_function_register():
    p = problems.build_search(4)
    oracle = simulator.super_oracle(p)
    m, size = 2, 4
    state = np.zeros(4 * m * size, dtype=complex)
    # input letter 0, output 0, uniform over the family
    state[0 * m * size + 0 * size : 0 * m * size + size] = 0.5
    out = (oracle @ state).reshape(4, m, size)
    for f in range(size):
        expected_s = p.functions[f][0]
        assert abs(out[0, expected_s, f] - 0.5) < 1e-12


def test_empty_circuit_initial_state():
    p = problems.build_search(4)
    circuit = simulator.QueryCircuit(n_inputs=4, n_outputs=2, workspace=1, steps=())
    traj = simulator.run(circuit, p)
    delta = problems.uniform_state(p)
    assert np.abs(traj.rhos[0] - np.outer(delta, delta)).max() < 1e-12
    assert len(traj.oracle_calls) == 0


def test_unitary_validation():
    with pytest.raises(simulator.SimulationError):
        simulator.UnitaryStep(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(simulator.SimulationError):
        simulator.OracleStep("measure")


def test_computing_call_requires_zero_output():
    p = problems.build_search(2)
    flip = simulator.UnitaryStep(
        np.kron(np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])), name="flip-output"
    )
    circuit = simulator.QueryCircuit(
        n_inputs=2, n_outputs=2, workspace=1, steps=(flip, simulator.OracleStep("computing"))
    )
    with pytest.raises(simulator.SimulationError):
        simulator.run(circuit, p)


@pytest.mark.parametrize(
    "n,k",
    [(4, 0), (4, 1), (8, 2), (16, 3)],
)
def test_grover_success_probabilities(n, k):
    p = problems.build_search(n)
    traj = simulator.run(simulator.grover_for_search(n, k), p)
    assert simulator.success_probability(traj, p) == pytest.approx(
        grover_success(n, k), abs=1e-9
    )


def test_grover_on_non_power_alphabet():
    p = problems.build_search(5)
    traj = simulator.run(simulator.grover_for_search(5, 1), p)
    assert simulator.success_probability(traj, p) == pytest.approx(
        grover_success(5, 1), abs=1e-9
    )


def test_progress_starts_at_one_and_identity_is_flat():
    p = problems.build_search(4)
    traj = simulator.run(simulator.grover_for_search(4, 1), p)
    ident = bounds.AdversaryMatrix(matrix=np.eye(4), kind="multiplicative")
    w = simulator.progress_trajectory(traj, ident)
    assert np.abs(w - 1.0).max() < 1e-9
    adv = bounds.search_adversary(4)
    w2 = simulator.progress_trajectory(traj, adv)
    assert w2[0] == pytest.approx(1.0, abs=1e-12)
    assert w2[-1] < w2[0]


def test_per_query_additive_bound_holds():
    p = problems.build_search(4)
    adv = bounds.search_adversary(4)
    traj = simulator.run(simulator.grover_for_search(4, 1), p)
    rep = simulator.check_per_query(traj, adv, p, "additive")
    assert rep.passed
    assert rep.allowed_forward == pytest.approx(1 / math.sqrt(3), abs=1e-10)
    assert all(obs <= rep.allowed_forward + 1e-7 for obs in rep.observed)


def test_per_query_multiplicative_bound_holds():
    p = problems.build_search(8)
    fam = bounds.multiplicative_family(bounds.search_adversary(8), 1.0)
    traj = simulator.run(simulator.grover_for_search(8, 2), p)
    rep = simulator.check_per_query(traj, fam, p, "multiplicative")
    assert rep.passed
    assert rep.allowed_forward >= 1.0 and rep.allowed_backward >= 1.0


def test_local_only_circuit_keeps_function_state():
    p = problems.build_search(4)
    circuit = simulator.grover_for_search(4, 0)  # preparation only, no oracle
    traj = simulator.run(circuit, p)
    assert len(traj.rhos) == 1
    adv = bounds.search_adversary(4)
    assert np.abs(np.diff(simulator.progress_trajectory(traj, adv))).max(initial=0.0) == 0.0


def test_rho_update_identity():
    for n, k in ((4, 1), (16, 3)):
        p = problems.build_search(n)
        traj = simulator.run(simulator.grover_for_search(n, k), p)
        assert simulator.rho_update_gap(traj, p) <= 1e-8


def test_final_progress_budget():
    p = problems.build_search(16)
    adv = bounds.search_adversary(16)
    traj = simulator.run(simulator.grover_for_search(16, 3), p)
    eps_obs = 1 - simulator.success_probability(traj, p)
    w = simulator.progress_trajectory(traj, adv)
    assert w[-1] <= bounds.success_term(eps_obs) + 1e-6
    # hybrid-style budget with threshold zero
    eta = 1 / 16
    assert w[-1] <= 1 - (math.sqrt(1 - eps_obs) - math.sqrt(eta)) ** 2 + 1e-6


def test_coherent_success_probability():
    # A circuit that does nothing still "generates" something: compare the
    # overlap of the target with the fixed initial output configuration.
    p = problems.build_index_erasure(1, 2)
    circuit = simulator.QueryCircuit(
        n_inputs=1, n_outputs=2, workspace=1, steps=(), target_register="output"
    )
    traj = simulator.run(circuit, p)
    # target state for f is |f(0)>, initial output register is |0>
    expected = min(abs(p.target_vectors[f][0]) ** 2 for f in range(p.size))
    assert simulator.success_probability(traj, p) == pytest.approx(expected, abs=1e-12)


def test_circuit_file_round_trip(tmp_path):
    p = problems.build_search(4)
    doc = {
        "registers": {"workspace": 1},
        "target": "input",
        "steps": [
            {"type": "gate", "name": "hadamard-all-I"},
            {"type": "oracle", "call": "computing"},
            {"type": "gate", "name": "phase-flip-O"},
            {"type": "oracle", "call": "uncomputing"},
            {"type": "gate", "name": "grover-diffusion"},
        ],
    }
    path = tmp_path / "grover.json"
    path.write_text(json.dumps(doc))
    circuit = simulator.load_circuit(path, p)
    traj = simulator.run(circuit, p)
    assert simulator.success_probability(traj, p) == pytest.approx(1.0, abs=1e-9)


def test_joint_dimension_guard():
    p = problems.build_index_erasure(4, 8)
    circuit = simulator.QueryCircuit(
        n_inputs=4, n_outputs=8, workspace=100, steps=()
    )
    with pytest.raises(simulator.SimulationError):
        simulator.run(circuit, p)
