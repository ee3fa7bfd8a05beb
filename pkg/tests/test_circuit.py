import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qconnect.circuit import (
    CNOT,
    CPhase,
    CZ,
    GATE_SPECS,
    H,
    Raxis,
    Rz,
    S,
    SWAP,
    T,
    X,
    XX,
    Z,
    Za,
    Circuit,
    Gate,
    GateCounts,
    apply_gate,
    dumps,
    equivalent_up_to_global_phase,
    gate_counts,
    gate_matrix,
    inverse,
    loads,
    permutation_matrix,
    unitary,
    wrap_za,
)
from qconnect.errors import DimensionMismatch, RegisterTooLarge

PI = math.pi


def expm_pauli(theta, pauli):
    # exp(-i theta P) for an involutory P
    return math.cos(theta) * np.eye(len(pauli)) - 1j * math.sin(theta) * pauli


PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]])
PZ = np.diag([1.0 + 0j, -1.0])


def test_gate_matrices_are_unitary():
    for name, (arity, nparams) in GATE_SPECS.items():
        qubits = (0, 1)[:arity]
        params = (0.37, -1.1)[:nparams]
        m = gate_matrix(Gate(name, qubits, params))
        assert m.shape == (2**arity, 2**arity)
        assert np.allclose(m.conj().T @ m, np.eye(2**arity), atol=1e-12)


def test_xx_definition():
    chi = 0.41
    assert np.allclose(gate_matrix(XX(chi, 0, 1)), expm_pauli(chi, np.kron(PX, PX)))


def test_raxis_definition():
    alpha, theta = 0.7, 1.3
    n = math.cos(alpha) * PX + math.sin(alpha) * PY
    assert np.allclose(gate_matrix(Raxis(0, alpha, theta)), expm_pauli(theta / 2, n))


def test_za_and_rz():
    assert np.allclose(gate_matrix(Za(0, 0.5)), np.diag([1, 1j]))
    assert np.allclose(gate_matrix(Za(0, 0.25)), gate_matrix(T(0)))
    assert np.allclose(gate_matrix(Rz(0, 0.3)), expm_pauli(0.15, PZ))


def test_wrap_za_range():
    for a in (-6.0, -2.0, -1.5, 0.0, 2.0, 2.5, 7.9):
        w = wrap_za(a)
        assert -2 < w <= 2
        assert math.isclose(math.cos(PI * w), math.cos(PI * a), abs_tol=1e-12)


def test_two_qubit_convention_first_operand_is_high_bit():
    m = gate_matrix(CNOT(0, 1))
    # basis |q_first q_second>: flips second when first is 1
    assert np.allclose(m, np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]))


def test_qubit_zero_is_least_significant():
    u = unitary(Circuit(3, [X(0)]))
    assert u[1, 0] == 1
    u = unitary(Circuit(3, [X(2)]))
    assert u[4, 0] == 1


def test_cnot_control_target_in_register():
    u = unitary(Circuit(2, [CNOT(0, 1)]))
    # |q0=1, q1=0> is index 1 and maps to index 3
    assert u[3, 1] == 1 and u[2, 2] == 1


def test_cphase_symmetric():
    a = unitary(Circuit(2, [CPhase(0.7, 0, 1)]))
    b = unitary(Circuit(2, [CPhase(0.7, 1, 0)]))
    assert np.allclose(a, b)
    assert np.allclose(np.diag(a), [1, 1, 1, np.exp(0.7j)])


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("cnot", (0, 0))
    with pytest.raises(ValueError):
        Gate("h", (0, 1))
    with pytest.raises(ValueError):
        Gate("rz", (0,), ())
    with pytest.raises(ValueError):
        Gate("nope", (0,))
    with pytest.raises(ValueError):
        Gate("za", (0,), (3.0,))
    with pytest.raises(ValueError):
        Circuit(2, [CNOT(0, 2)])


def test_inverse_gates_and_circuits():
    gates = [H(0), S(1), T(0), Za(1, 0.3), Raxis(0, 0.2, 0.9), Rz(1, -0.4), XX(0.3, 0, 1), CPhase(0.5, 1, 0)]
    c = Circuit(2, gates)
    u = unitary(c + inverse(c))
    assert equivalent_up_to_global_phase(u, np.eye(4))
    for g in gates:
        assert np.allclose(gate_matrix(g) @ gate_matrix(g.inverse()), np.eye(2**g.arity), atol=1e-12)


def test_apply_gate_matches_unitary():
    rng = np.random.default_rng(3)
    c = Circuit(3, [H(0), CNOT(0, 2), XX(0.3, 2, 1), Raxis(1, 0.4, 0.5)])
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    t = psi.reshape(2, 2, 2)
    for g in c.gates:
        t = apply_gate(t, g, 3)
    assert np.allclose(t.reshape(-1), unitary(c) @ psi)


def test_unitary_cap():
    with pytest.raises(RegisterTooLarge):
        unitary(Circuit(11, [H(0)]))


def test_global_phase_equivalence():
    u = unitary(Circuit(1, [H(0)]))
    assert equivalent_up_to_global_phase(np.exp(0.3j) * u, u)
    assert not equivalent_up_to_global_phase(unitary(Circuit(1, [X(0)])), u)
    with pytest.raises(DimensionMismatch):
        equivalent_up_to_global_phase(np.eye(2), np.eye(4))


def test_gate_counts():
    c = Circuit(3, [H(0), CNOT(0, 1), T(2), CZ(1, 2), SWAP(0, 2)])
    assert gate_counts(c) == GateCounts(2, 3)
    assert (GateCounts(1, 2) + GateCounts(3, 4)).total == 10


def test_permutation_matrix_moves_qubits():
    # qubit 0 goes to position 2
    p = permutation_matrix((2, 0, 1))
    assert p[4, 1] == 1
    swap = unitary(Circuit(2, [SWAP(0, 1)]))
    assert np.allclose(permutation_matrix((1, 0)), swap)


def test_text_format_example():
    c = Circuit(3, [H(0), XX(0.25, 0, 2), Za(1, 0.5), Raxis(2, 0.1, -0.2)], "demo")
    text = dumps(c)
    assert text.splitlines()[:3] == ["# demo", "qubits 3", "h 0"]
    assert "xx 0.25 0 2" in text
    assert loads(text) == c


def test_text_format_errors():
    with pytest.raises(ValueError):
        loads("h 0\n")
    with pytest.raises(ValueError):
        loads("qubits 2\nfoo 0\n")
    with pytest.raises(ValueError):
        loads("qubits 2\ncnot 0\n")


_angle = st.floats(min_value=-6, max_value=6, allow_nan=False)


@st.composite
def circuits(draw):
    n = draw(st.integers(1, 4))
    gates = []
    for _ in range(draw(st.integers(0, 10))):
        name = draw(st.sampled_from(sorted(GATE_SPECS)))
        arity, nparams = GATE_SPECS[name]
        if arity > n:
            continue
        qubits = draw(st.permutations(range(n)))[:arity]
        params = [draw(_angle) for _ in range(nparams)]
        if name == "za":
            params = [wrap_za(params[0])]
        gates.append(Gate(name, tuple(qubits), tuple(params)))
    return Circuit(n, gates, draw(st.sampled_from(["", "x", "bv:1011"])))


@settings(max_examples=200, deadline=None)
@given(circuits())
def test_text_round_trip(c):
    assert loads(dumps(c)) == c


@settings(max_examples=50, deadline=None)
@given(circuits())
def test_unitary_of_inverse(c):
    u = unitary(c)
    assert np.allclose(unitary(inverse(c)) @ u, np.eye(1 << c.n_qubits), atol=1e-9)
