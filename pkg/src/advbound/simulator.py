"""Brute-force statevector simulation of query algorithms.

The simulated system carries the algorithm registers (input, output,
workspace) joined with a function register holding a superposition over
the whole family, so one run tracks the algorithm against every oracle at
once.  Reduced function-register states after each oracle call drive the
progress-function checks of the bound modules.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from advbound import linalg
from advbound.config import MAX_JOINT_DIM
from advbound.problems import (
    KIND_CLASSICAL,
    KIND_COHERENT,
    OracleProblem,
    uniform_state,
)
from advbound.bounds import AdversaryMatrix, masked

COMPUTING = "computing"
UNCOMPUTING = "uncomputing"


class SimulationError(RuntimeError):
    """Raised for register mismatches and violated oracle-call conventions."""


@dataclass(eq=False)
class UnitaryStep:
    matrix: np.ndarray
    name: str = "unitary"

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SimulationError(f"step {self.name}: matrix must be square")
        if linalg.norm(m.conj().T @ m - np.eye(m.shape[0])) > 1e-9:
            raise SimulationError(f"step {self.name}: matrix is not unitary")
        self.matrix = m


@dataclass(frozen=True)
class OracleStep:
    call: str  # computing | uncomputing

    def __post_init__(self) -> None:
        if self.call not in (COMPUTING, UNCOMPUTING):
            raise SimulationError(f"unknown oracle call type {self.call!r}")


@dataclass(eq=False)
class QueryCircuit:
    """Registers and step list; unitaries act on input x output x workspace."""

    n_inputs: int
    n_outputs: int
    workspace: int
    steps: tuple
    target_register: str = "input"

    @property
    def algo_dim(self) -> int:
        return self.n_inputs * self.n_outputs * self.workspace

    def __post_init__(self) -> None:
        for step in self.steps:
            if isinstance(step, UnitaryStep) and step.matrix.shape[0] != self.algo_dim:
                raise SimulationError(
                    f"step {step.name}: acts on dimension {step.matrix.shape[0]}, "
                    f"expected {self.algo_dim}"
                )
        if self.target_register not in ("input", "output", "workspace"):
            raise SimulationError(f"unknown target register {self.target_register!r}")


@dataclass(eq=False)
class Trajectory:
    """Joint states after every step plus function-register snapshots."""

    circuit: QueryCircuit
    problem: OracleProblem
    states: list[np.ndarray]            # joint (N, M, W, F) tensors
    oracle_calls: list[tuple[int, str]]  # (state index after the call, type)
    rhos: list[np.ndarray]              # function-register state per snapshot

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def super_oracle(p: OracleProblem) -> np.ndarray:
    """Oracle with the function in a register: permutation on input x output x family.

    The output register shifts by f(x) modulo the alphabet size; for a
    binary alphabet this is the usual XOR and the matrix is an involution.
    """
    n, m, size = p.n_inputs, p.n_outputs, p.size
    dim = n * m * size
    mat = np.zeros((dim, dim))
    arr = p.function_array()
    for x in range(n):
        for s in range(m):
            for f in range(size):
                src = (x * m + s) * size + f
                dst = (x * m + (s + arr[f, x]) % m) * size + f
                mat[dst, src] = 1.0
    return mat


def _apply_oracle(state: np.ndarray, p: OracleProblem, call: str, step_idx: int) -> np.ndarray:
    n, m = p.n_inputs, p.n_outputs
    w_dim, size = state.shape[2], state.shape[3]
    arr = p.function_array()
    if call == COMPUTING:
        mass = float(np.linalg.norm(state[:, 1:, :, :]))
        if mass > 1e-7:
            raise SimulationError(
                f"step {step_idx}: computing call with weight {mass:.2e} off the zero output state"
            )
    else:
        allowed = np.zeros((n, m, 1, size), dtype=bool)
        for x in range(n):
            allowed[x, :, 0, :] = arr[:, x][None, :] == np.arange(m)[:, None]
        mass = float(np.linalg.norm(state[~np.broadcast_to(allowed, state.shape)]))
        if mass > 1e-7:
            raise SimulationError(
                f"step {step_idx}: uncomputing call with weight {mass:.2e} off the computed output"
            )
    out = np.empty_like(state)
    w_idx = np.arange(w_dim)[None, :, None]
    f_idx = np.arange(size)[None, None, :]
    for x in range(n):
        fcol = arr[:, x]
        if call == COMPUTING:
            rows = (np.arange(m)[:, None] - fcol[None, :]) % m
        else:
            rows = (np.arange(m)[:, None] + fcol[None, :]) % m
        out[x] = state[x][rows[:, None, :], w_idx, f_idx]
    return out


def reduced_function_state(state: np.ndarray) -> np.ndarray:
    psi = state.reshape(-1, state.shape[3])
    return np.einsum("af,ag->fg", psi, psi.conj())


def run(circuit: QueryCircuit, p: OracleProblem) -> Trajectory:
    """Execute the circuit on the uniform function superposition.

    The joint state is recorded after every step; the reduced function
    state is snapshotted initially and after each oracle call (local
    unitaries cannot change it).
    """
    if circuit.n_inputs != p.n_inputs or circuit.n_outputs != p.n_outputs:
        raise SimulationError("circuit registers do not match the problem alphabets")
    n, m, w_dim, size = circuit.n_inputs, circuit.n_outputs, circuit.workspace, p.size
    if n * m * w_dim * size > MAX_JOINT_DIM:
        raise SimulationError("joint space exceeds the dense-simulation guard")
    state = np.zeros((n, m, w_dim, size), dtype=np.complex128)
    state[0, 0, 0, :] = uniform_state(p)
    states = [state]
    rhos = [reduced_function_state(state)]
    calls: list[tuple[int, str]] = []
    for idx, step in enumerate(circuit.steps):
        if isinstance(step, OracleStep):
            state = _apply_oracle(state, p, step.call, idx)
            states.append(state)
            rhos.append(reduced_function_state(state))
            calls.append((len(states) - 1, step.call))
        else:
            flat = state.reshape(circuit.algo_dim, size)
            state = (step.matrix @ flat).reshape(n, m, w_dim, size)
            states.append(state)
        drift = abs(float(np.linalg.norm(state)) - 1.0)
        if drift > 1e-9:
            raise SimulationError(f"step {idx}: state norm drifted by {drift:.2e}")
    return Trajectory(circuit=circuit, problem=p, states=states, oracle_calls=calls, rhos=rhos)


def _uniform_prep(n: int) -> np.ndarray:
    # Real reflection sending the first basis vector to the uniform vector.
    u = np.full(n, 1.0 / math.sqrt(n))
    w = np.zeros(n)
    w[0] = 1.0
    w = w - u
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        return np.eye(n)
    w /= nw
    return np.eye(n) - 2.0 * np.outer(w, w)


def grover_for_search(n: int, iterations: int) -> QueryCircuit:
    """Grover iterations compiled to computing/uncomputing oracle pairs.

    Each phase query computes the mark into the zeroed output register,
    flips the phase there, then uncomputes, so every oracle call meets the
    zero-or-computed output convention.
    """
    if n < 2:
        raise SimulationError("need n >= 2")
    eye_o = np.eye(2)
    prep = UnitaryStep(np.kron(_uniform_prep(n), eye_o), name="uniform-prep")
    phase = UnitaryStep(np.kron(np.eye(n), np.diag([1.0, -1.0])), name="phase-flip-output")
    u = np.full(n, 1.0 / math.sqrt(n))
    diffusion = UnitaryStep(
        np.kron(2.0 * np.outer(u, u) - np.eye(n), eye_o), name="diffusion"
    )
    steps: list = [prep]
    for _ in range(iterations):
        steps.extend([OracleStep(COMPUTING), phase, OracleStep(UNCOMPUTING), diffusion])
    return QueryCircuit(
        n_inputs=n, n_outputs=2, workspace=1, steps=tuple(steps), target_register="input"
    )


def progress_trajectory(traj: Trajectory, adv: AdversaryMatrix) -> np.ndarray:
    """Progress value per snapshot: trace of the adversary matrix against
    the reduced function state.  Starts at 1 for any valid adversary."""
    vals = [float(np.real(np.trace(adv.matrix @ rho))) for rho in traj.rhos]
    return np.asarray(vals)


@dataclass(frozen=True)
class PerQueryReport:
    variant: str
    allowed_forward: float
    allowed_backward: float
    observed: tuple[float, ...]
    passed: bool
    failing_call: int | None


def check_per_query(
    traj: Trajectory, adv: AdversaryMatrix, p: OracleProblem, variant: str
) -> PerQueryReport:
    """Per-call progress changes against the worst-case norms.

    Additive: absolute difference per call at most the worst masked
    difference norm.  Multiplicative: ratios, with the direction swapped on
    uncomputing calls.
    """
    w_series = progress_trajectory(traj, adv)
    slack = 1e-7
    if variant == "additive":
        allowed = max(
            linalg.norm(masked(adv.matrix, p, x) - adv.matrix) for x in range(p.n_inputs)
        )
        observed = []
        failing = None
        for i, (_, _call) in enumerate(traj.oracle_calls):
            change = abs(w_series[i + 1] - w_series[i])
            observed.append(change)
            if change > allowed + slack and failing is None:
                failing = i
        return PerQueryReport(
            variant=variant,
            allowed_forward=allowed,
            allowed_backward=allowed,
            observed=tuple(observed),
            passed=failing is None,
            failing_call=failing,
        )
    if variant != "multiplicative":
        raise SimulationError(f"unknown variant {variant!r}")
    root = linalg.psd_power(adv.matrix, 0.5)
    inv_root = linalg.psd_power(adv.matrix, -0.5)
    fwd = 0.0
    bwd = 0.0
    for x in range(p.n_inputs):
        masked_m = masked(adv.matrix, p, x)
        fwd = max(fwd, linalg.norm(linalg.psd_power(masked_m, 0.5) @ inv_root) ** 2)
        bwd = max(bwd, linalg.norm(root @ linalg.psd_power(masked_m, -0.5)) ** 2)
    observed = []
    failing = None
    for i, (_, call) in enumerate(traj.oracle_calls):
        ratio = w_series[i + 1] / w_series[i]
        observed.append(ratio)
        allowed = fwd if call == COMPUTING else bwd
        if ratio > allowed + slack and failing is None:
            failing = i
    return PerQueryReport(
        variant=variant,
        allowed_forward=fwd,
        allowed_backward=bwd,
        observed=tuple(observed),
        passed=failing is None,
        failing_call=failing,
    )


def rho_update_gap(traj: Trajectory, p: OracleProblem) -> float:
    """Largest deviation from the masked per-input update rule across
    computing calls: the post-call function state must equal the sum over
    inputs of the per-input conditional state masked by agreement."""
    from advbound.problems import agreement_matrix

    arr_calls = [c for c in traj.oracle_calls if c[1] == COMPUTING]
    worst = 0.0
    for after_idx, _ in arr_calls:
        pre = traj.states[after_idx - 1]
        post_rho = reduced_function_state(traj.states[after_idx])
        total = np.zeros_like(post_rho)
        sliced = pre[:, 0, :, :]
        for x in range(p.n_inputs):
            rho_x = np.einsum("wf,wg->fg", sliced[x], sliced[x].conj())
            total += rho_x * agreement_matrix(p, x)
        worst = max(worst, float(np.abs(total - post_rho).max(initial=0.0)))
    return worst


def _target_axis(circuit: QueryCircuit) -> int:
    return {"input": 0, "output": 1, "workspace": 2}[circuit.target_register]


def success_probability(traj: Trajectory, p: OracleProblem) -> float:
    """Worst-case success over the family, from the final joint state.

    Classical problems measure the target register against the per-function
    label; coherent generation projects onto the explicit target state with
    all other registers reset.
    """
    state = traj.final_state
    circuit = traj.circuit
    axis = _target_axis(circuit)
    size = p.size
    worst = 1.0
    if p.kind == KIND_CLASSICAL:
        labels = p.labels
        dim_target = state.shape[axis]
        if max(labels) >= dim_target:
            raise SimulationError("target register too small for the label range")
        for f in range(size):
            amp = state[..., f]
            weight = float(np.sum(np.abs(amp) ** 2))
            hit = np.take(amp, labels[f], axis=axis)
            good = float(np.sum(np.abs(hit) ** 2))
            worst = min(worst, good / weight)
        return worst
    if p.kind == KIND_COHERENT:
        if p.target_vectors is None:
            raise SimulationError("problem carries no explicit target vectors")
        vecs = p.target_vectors
        if vecs.shape[1] != state.shape[axis]:
            raise SimulationError("target register does not match the target vectors")
        for f in range(size):
            amp = state[..., f]
            weight = float(np.sum(np.abs(amp) ** 2))
            sel = [0, 0, 0]
            sel[axis] = slice(None)
            column = amp[tuple(sel)]
            good = abs(np.vdot(vecs[f], column)) ** 2
            worst = min(worst, good / weight)
        return worst
    raise SimulationError("success probability undefined for non-coherent problems here")


# ---------------------------------------------------------------------------
# circuit files
# ---------------------------------------------------------------------------


def _gate_matrix(name: str, circuit_dims: tuple[int, int, int]) -> np.ndarray:
    n, m, w = circuit_dims
    if name == "hadamard-all-I":
        return np.kron(np.kron(_uniform_prep(n), np.eye(m)), np.eye(w))
    if name == "phase-flip-O":
        phases = np.ones(m)
        if m > 1:
            phases[1:] = -1.0
        return np.kron(np.kron(np.eye(n), np.diag(phases)), np.eye(w))
    if name == "grover-diffusion":
        u = np.full(n, 1.0 / math.sqrt(n))
        return np.kron(np.kron(2.0 * np.outer(u, u) - np.eye(n), np.eye(m)), np.eye(w))
    raise SimulationError(f"unknown named gate {name!r}")


def circuit_from_dict(doc: dict, p: OracleProblem) -> QueryCircuit:
    registers = doc.get("registers", {})
    w_dim = int(registers.get("workspace", 1))
    target = doc.get("target", "input")
    dims = (p.n_inputs, p.n_outputs, w_dim)
    steps: list = []
    for entry in doc["steps"]:
        kind = entry["type"]
        if kind == "oracle":
            steps.append(OracleStep(entry.get("call", COMPUTING)))
        elif kind == "gate":
            steps.append(UnitaryStep(_gate_matrix(entry["name"], dims), name=entry["name"]))
        elif kind == "unitary":
            raw = np.asarray(entry["matrix"])
            if raw.ndim == 3:  # [re, im] pairs
                raw = raw[..., 0] + 1j * raw[..., 1]
            steps.append(UnitaryStep(raw, name=entry.get("name", "unitary")))
        else:
            raise SimulationError(f"unknown step type {kind!r}")
    return QueryCircuit(
        n_inputs=p.n_inputs,
        n_outputs=p.n_outputs,
        workspace=w_dim,
        steps=tuple(steps),
        target_register=target,
    )


def load_circuit(path: str | Path, p: OracleProblem) -> QueryCircuit:
    with Path(path).open() as fh:
        return circuit_from_dict(json.load(fh), p)
