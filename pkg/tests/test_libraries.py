import math

import numpy as np
import pytest

from qconnect.algorithms import margolus, qft, toffoli
from qconnect.circuit import (
    CNOT,
    CPhase,
    CZ,
    H,
    Raxis,
    Rz,
    S,
    SWAP,
    T,
    X,
    XX,
    Za,
    Circuit,
    equivalent_up_to_global_phase,
    gate_counts,
    gate_matrix,
    unitary,
)
from qconnect.errors import InvalidConfig, NotExactlyExpressible
from qconnect.libraries import (
    GateLibrary,
    cancel_two_qubit_pairs,
    clifford_t_table,
    clifford_t_word,
    cnot_as_xx,
    cphase_as_xx,
    lower_swap,
    optimize,
    rebase,
    rxx_single,
    split_x_rotation,
    squash_single_qubit_runs,
    toffoli_5xx,
    toffoli_6cnot,
    za_euler,
    zx_as_xx,
    zz_as_xx,
)

from randgen import random_circuit

PI = math.pi


def same(a: Circuit, b: Circuit, tol=1e-9) -> bool:
    n = max(a.n_qubits, b.n_qubits)
    return equivalent_up_to_global_phase(unitary(a.widened(n)), unitary(b.widened(n)), tol)


def toffoli_matrix(c0=0, c1=1, t=2, n=3):
    m = np.eye(1 << n)
    for i in range(1 << n):
        if i >> c0 & 1 and i >> c1 & 1:
            j = i ^ (1 << t)
            m[i, i] = 0
            m[j, i] = 1
    return m


def test_library_membership_and_parse():
    assert GateLibrary.parse("Clifford+T") is GateLibrary.CLIFFORD_T
    assert GateLibrary.parse("R/XX") is GateLibrary.RXX
    assert GateLibrary.CLIFFORD_ZA.admits(Za(0, 0.3))
    assert not GateLibrary.CLIFFORD_T.admits(Za(0, 0.3))
    assert not GateLibrary.RXX.admits(CNOT(0, 1))
    with pytest.raises(InvalidConfig):
        GateLibrary.parse("u3")


def test_cnot_as_xx_identity():
    assert same(Circuit(2, cnot_as_xx(0, 1)), Circuit(2, [CNOT(0, 1)]))
    assert same(Circuit(2, cnot_as_xx(1, 0)), Circuit(2, [CNOT(1, 0)]))
    assert sum(g.name == "xx" for g in cnot_as_xx(0, 1)) == 1


def test_zz_zx_cphase_identities():
    chi = 0.37
    zz = np.diag(np.exp(-1j * chi * np.array([1, -1, -1, 1])))
    assert equivalent_up_to_global_phase(unitary(Circuit(2, zz_as_xx(chi, 0, 1))), zz)
    for phi in (PI / 2, PI / 4, 0.3):
        assert same(Circuit(2, cphase_as_xx(phi, 0, 1)), Circuit(2, [CPhase(phi, 0, 1)]))
    # exp(-i chi Z_a X_b): Z on the first operand, X on the second
    zx = np.cos(chi) * np.eye(4) - 1j * np.sin(chi) * np.kron(np.diag([1, -1]), [[0, 1], [1, 0]])
    u = unitary(Circuit(2, zx_as_xx(chi, 1, 0)))
    assert equivalent_up_to_global_phase(u, zx)


def test_clifford_t_table():
    table = clifford_t_table()
    assert len(table) > 24  # all 24 Cliffords plus T-containing elements
    assert clifford_t_word(np.eye(2)) == ()
    h = gate_matrix(H(0))
    assert clifford_t_word(h) == ("h",)
    sqrt_t = np.diag([1, np.exp(1j * PI / 8)])
    assert clifford_t_word(sqrt_t) is None


@pytest.mark.parametrize("seed", range(20))
def test_rxx_single_decomposition(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    u, _ = np.linalg.qr(a)
    gates = rxx_single(u, 0)
    assert len(gates) <= 2
    assert equivalent_up_to_global_phase(unitary(Circuit(1, gates)), u)


@pytest.mark.parametrize("seed", range(10))
def test_za_euler_and_split(seed):
    rng = np.random.default_rng(100 + seed)
    u, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    gates = za_euler(u, 0)
    assert all(GateLibrary.CLIFFORD_ZA.admits(g) for g in gates)
    assert equivalent_up_to_global_phase(unitary(Circuit(1, gates)), u)
    x, rest = split_x_rotation(u)
    assert np.allclose(gate_matrix(Raxis(0, 0.0, x)) @ rest, u)
    # an equatorial rotation has equal diagonal entries
    assert abs(rest[0, 0] - rest[1, 1]) < 1e-9


def test_rebase_rejects_inexpressible():
    with pytest.raises(NotExactlyExpressible):
        rebase(Circuit(1, [Za(0, 0.125)]), GateLibrary.CLIFFORD_T)
    with pytest.raises(NotExactlyExpressible):
        rebase(qft(3), GateLibrary.CLIFFORD_T)
    # controlled-S is fine
    r = rebase(qft(2), GateLibrary.CLIFFORD_T)
    assert same(r, qft(2))


@pytest.mark.parametrize("lib", list(GateLibrary))
def test_rebase_preserves_unitary(lib):
    rng = np.random.default_rng(5)
    done = 0
    for _ in range(60):
        c = random_circuit(rng)
        try:
            r = rebase(c, lib)
        except NotExactlyExpressible:
            continue
        assert all(lib.admits(g) for g in r.gates)
        assert same(r, c)
        o = optimize(r, lib)
        assert all(lib.admits(g) for g in o.gates)
        assert same(o, c)
        assert gate_counts(o).two <= gate_counts(r).two
        done += 1
    assert done >= 30


def test_lower_swap():
    for lib in GateLibrary:
        gates = lower_swap(0, 1, lib)
        assert sum(g.arity == 2 for g in gates) == 3
        assert same(Circuit(2, gates), Circuit(2, [SWAP(0, 1)]))


def test_squash_and_cancel():
    c = Circuit(2, [H(0), H(0), T(1), T(1), CNOT(0, 1), CNOT(0, 1), S(0)])
    o = optimize(c, GateLibrary.CLIFFORD_T)
    assert gate_counts(o).two == 0
    assert gate_counts(o).single == 2  # S on both qubits
    assert same(o, c)
    c = Circuit(2, [XX(0.2, 0, 1), Raxis(0, 0.0, 0.4), XX(0.3, 0, 1)])
    assert [g.name for g in cancel_two_qubit_pairs(c).gates].count("xx") == 1
    assert same(cancel_two_qubit_pairs(c), c)
    s = squash_single_qubit_runs(Circuit(1, [Rz(0, 0.1), Raxis(0, 0.3, 0.2), Rz(0, -0.4)]), GateLibrary.RXX)
    assert gate_counts(s).single <= 2


def test_toffoli_constructions():
    t6 = toffoli_6cnot(a=0, b=1, c=2)
    assert gate_counts(t6) == gate_counts(toffoli())
    assert gate_counts(t6).two == 6
    assert np.allclose(unitary(t6), toffoli_matrix(), atol=1e-9)
    t5 = toffoli_5xx(a=0, b=1, c=2)
    assert all(GateLibrary.RXX.admits(g) for g in t5.gates)
    assert gate_counts(t5).two == 5
    assert equivalent_up_to_global_phase(unitary(t5), toffoli_matrix())
    assert equivalent_up_to_global_phase(unitary(toffoli(GateLibrary.RXX)), toffoli_matrix())


def test_margolus_rebases_keep_three_entanglers():
    for lib in GateLibrary:
        r = optimize(rebase(margolus(), lib), lib)
        assert gate_counts(r).two == 3
        assert same(r, margolus())


def test_qft_counts_on_complete_graph_libraries():
    assert gate_counts(optimize(rebase(qft(3), GateLibrary.RXX), GateLibrary.RXX)).two == 3
    assert gate_counts(optimize(rebase(qft(5), GateLibrary.RXX), GateLibrary.RXX)).two == 10


def test_cz_rebase_to_xx_single_entangler():
    r = optimize(rebase(Circuit(2, [CZ(0, 1)]), GateLibrary.RXX), GateLibrary.RXX)
    assert gate_counts(r).two == 1
    assert same(r, Circuit(2, [CZ(0, 1)]))


def test_xx_into_clifford_libraries():
    for k in (1, 2, 3):
        c = Circuit(2, [XX(k * PI / 4, 0, 1)])
        for lib in (GateLibrary.CLIFFORD_T, GateLibrary.CLIFFORD_ZA):
            assert same(rebase(c, lib), c)
    with pytest.raises(NotExactlyExpressible):
        rebase(Circuit(2, [XX(0.3, 0, 1)]), GateLibrary.CLIFFORD_T)
    assert same(rebase(Circuit(2, [XX(0.3, 0, 1)]), GateLibrary.CLIFFORD_ZA), Circuit(2, [XX(0.3, 0, 1)]))


def test_clifford_table_contains_t_and_x():
    for g in (T(0), X(0), S(0)):
        assert clifford_t_word(gate_matrix(g)) == (g.name,)
