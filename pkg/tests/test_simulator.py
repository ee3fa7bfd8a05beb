import json

import numpy as np
import pytest

from qconnect.algorithms import bernstein_vazirani, hidden_shift, index_of, toffoli
from qconnect.circuit import CNOT, H, Circuit, Raxis, XX
from qconnect.errors import EmptyMeasurement, RegisterTooLarge
from qconnect.pipeline import build_matrix
from qconnect.simulator import (
    ResultMatrix,
    StateVector,
    basis_family,
    distribution,
    marginal,
    result_matrix,
    row_rng,
    run,
    sample,
)


def test_empty_circuit_keeps_basis_state():
    s = run(Circuit(3, []), 3)
    assert s.amplitudes[3] == 1 and s.norm == pytest.approx(1)


def test_run_examples():
    assert distribution(run(toffoli(), index_of("110")))[index_of("111")] == pytest.approx(1)
    assert distribution(run(hidden_shift("1011")))[index_of("1011")] == pytest.approx(1)
    p = distribution(run(bernstein_vazirani("1111")), [0, 1, 2, 3])
    assert p[15] == pytest.approx(1)


def test_plus_state_and_ghz():
    assert np.allclose(distribution(run(Circuit(1, [H(0)]))), [0.5, 0.5])
    ghz = Circuit(3, [H(0), CNOT(0, 1), CNOT(1, 2)])
    p = distribution(run(ghz))
    assert p[0] == pytest.approx(0.5) and p[7] == pytest.approx(0.5)


def test_marginal_ordering():
    # qubit 2 set only
    probs = np.zeros(8)
    probs[4] = 1
    assert marginal(probs, 3, [2])[1] == 1
    assert marginal(probs, 3, [2, 0])[1] == 1  # measured[0] is the low bit
    assert marginal(probs, 3, [0, 2])[2] == 1
    with pytest.raises(EmptyMeasurement):
        marginal(probs, 3, [])
    with pytest.raises(ValueError):
        marginal(probs, 3, [0, 0])


def test_register_cap():
    with pytest.raises(RegisterTooLarge):
        run(Circuit(11, [H(0)]))
    with pytest.raises(RegisterTooLarge):
        StateVector.basis(11)


def test_norm_is_preserved():
    rng = np.random.default_rng(0)
    c = Circuit(4, [Raxis(int(q), float(a), float(t)) for q, a, t in zip(rng.integers(0, 4, 20), rng.normal(size=20), rng.normal(size=20))]
                + [XX(0.3, 0, 3), CNOT(1, 2)])
    assert run(c, 5).norm == pytest.approx(1, abs=1e-10)


def test_sampling_converges():
    rng = np.random.default_rng(1)
    gates = [H(q) for q in range(5)] + [XX(0.4, 0, 1), Raxis(2, 0.3, 1.1), CNOT(2, 4), XX(0.9, 3, 4)]
    p = distribution(run(Circuit(5, gates)))
    f = sample(p, 100_000, rng)
    assert 0.5 * np.abs(f - p).sum() < 0.01
    assert f.sum() == pytest.approx(1)


def test_row_streams_are_reproducible_and_distinct():
    a = row_rng(7, 0).random(4)
    assert np.array_equal(a, row_rng(7, 0).random(4))
    assert not np.array_equal(a, row_rng(7, 1).random(4))


def test_toffoli_result_matrix_is_a_permutation():
    m = result_matrix(basis_family(toffoli()), range(8))
    perm = np.eye(8)
    perm[:, [3, 7]] = perm[:, [7, 3]]
    assert np.allclose(m.probs, perm, atol=1e-12)
    assert m.col_labels[1] == "100"


def test_bv_matrix_is_identity_patterned():
    for lib, graph in (("cliffordt", "star5c2"), ("cliffordza", "line5"), ("rxx", "full5")):
        m, targets = build_matrix("bv", lib, graph)
        assert targets == list(range(16))
        assert np.allclose(m.probs, np.eye(16), atol=1e-9)
        assert m.row_labels[1] == "1000"


def test_routed_toffoli_matrix():
    m, targets = build_matrix("toffoli", "cliffordt", "star5c2")
    assert targets == [0, 1, 2, 7, 4, 5, 6, 3]
    assert np.allclose(m.probs.sum(axis=1), 1)
    assert np.allclose(m.diagonal(targets), 1, atol=1e-9)


def test_sampled_matrix_reproducible_and_serialized(tmp_path):
    fam = basis_family(Circuit(2, [H(0), CNOT(0, 1)]))
    a = result_matrix(fam, range(4), shots=1000, seed=3)
    b = result_matrix(fam, range(4), shots=1000, seed=3)
    assert np.array_equal(a.probs, b.probs)
    assert np.allclose(a.probs.sum(axis=1), 1)
    csv_path, json_path = a.save(tmp_path / "m")
    lines = open(csv_path).read().splitlines()
    assert lines[0] == "input,00,10,01,11"
    assert len(lines) == 5
    back = ResultMatrix.from_json(open(json_path).read())
    assert np.allclose(back.probs, a.probs)
    assert json.loads(open(json_path).read())["metadata"]["seed"] == 3
