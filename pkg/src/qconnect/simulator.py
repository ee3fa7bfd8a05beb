"""Dense state-vector execution and input/output result matrices."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algorithms import label
from .circuit import Circuit, apply_gate
from .errors import DimensionMismatch, EmptyMeasurement, RegisterTooLarge

MAX_QUBITS = 10
NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise DimensionMismatch(f"expected {1 << self.n_qubits} amplitudes, got {self.amplitudes.shape}")

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "StateVector":
        if n > MAX_QUBITS:
            raise RegisterTooLarge(f"state vectors are capped at {MAX_QUBITS} qubits, got {n}")
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def evolve(state: StateVector, gates: Sequence) -> StateVector:
    n = state.n_qubits
    t = state.amplitudes.reshape((2,) * n) if n else state.amplitudes
    for g in gates:
        t = apply_gate(t, g, n)
    return StateVector(n, np.ascontiguousarray(t).reshape(-1))


def run(circuit: Circuit, input: int = 0) -> StateVector:
    """Apply the circuit to the computational basis state ``input``."""
    if circuit.n_qubits > MAX_QUBITS:
        raise RegisterTooLarge(f"state vectors are capped at {MAX_QUBITS} qubits, got {circuit.n_qubits}")
    if not 0 <= input < 1 << circuit.n_qubits:
        raise ValueError(f"basis index {input} out of range for {circuit.n_qubits} qubits")
    return evolve(StateVector.basis(circuit.n_qubits, input), circuit.gates)


def marginal(probs: np.ndarray, n: int, measured: Sequence[int]) -> np.ndarray:
    """Marginal over ``measured``; measured[0] becomes bit 0 of the outcome index."""
    measured = list(measured)
    if not measured:
        raise EmptyMeasurement("at least one qubit must be measured")
    if len(set(measured)) != len(measured) or any(not 0 <= q < n for q in measured):
        raise ValueError(f"bad measured qubits {measured} for {n} qubits")
    t = probs.reshape((2,) * n)
    # tensor axis n-1-q holds qubit q; move the measured axes to the front in
    # reverse order so that measured[0] ends up least significant
    axes = [n - 1 - q for q in reversed(measured)]
    rest = [a for a in range(n) if a not in axes]
    t = np.transpose(t, axes + rest).reshape(1 << len(measured), -1)
    return t.sum(axis=1)


def distribution(state: StateVector, measured_qubits: Sequence[int] | None = None) -> np.ndarray:
    if measured_qubits is None:
        measured_qubits = range(state.n_qubits)
    return marginal(state.probabilities(), state.n_qubits, measured_qubits)


def sample(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Empirical frequencies of ``shots`` draws."""
    p = np.clip(probs, 0.0, None)
    p = p / p.sum()
    return rng.multinomial(shots, p) / shots


def row_rng(seed: int, row: int) -> np.random.Generator:
    """PCG64 stream for one row, derived from the master seed and row index."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, row])))


# --------------------------------------------------------------------------
# result matrices


@dataclass(frozen=True)
class ResultMatrix:
    row_labels: list[str]
    col_labels: list[str]
    probs: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.probs.shape != (len(self.row_labels), len(self.col_labels)):
            raise DimensionMismatch(f"probs {self.probs.shape} vs labels")

    def diagonal(self, targets: Sequence[int] | None = None) -> np.ndarray:
        """Probability of each row's target column (default: same index as the row)."""
        if targets is None:
            targets = range(len(self.row_labels))
        return np.array([self.probs[r, c] for r, c in enumerate(targets)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["input"] + list(self.col_labels))
        for lab, row in zip(self.row_labels, self.probs):
            w.writerow([lab] + [f"{p:.9f}" for p in row])
        return buf.getvalue()

    def to_json(self) -> str:
        obj = {
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "probs": [[float(f"{p:.9f}") for p in row] for row in self.probs],
            "metadata": self.metadata,
        }
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ResultMatrix":
        obj = json.loads(text)
        return cls(obj["row_labels"], obj["col_labels"], np.array(obj["probs"], dtype=float), obj.get("metadata", {}))

    def save(self, stem: str | os.PathLike) -> tuple[str, str]:
        """Write ``<stem>.csv`` and ``<stem>.json``."""
        stem = os.fspath(stem)
        if stem.endswith((".csv", ".json")):
            stem = os.path.splitext(stem)[0]
        paths = (stem + ".csv", stem + ".json")
        atomic_write(paths[0], self.to_csv())
        atomic_write(paths[1], self.to_json())
        return paths


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# A family maps an input condition to (circuit, basis input, measured qubits).
Family = Callable[[object], "tuple[Circuit, int, Sequence[int]]"]


def basis_family(circuit: Circuit, measured: Sequence[int] | None = None) -> Family:
    """Fixed circuit, input condition = basis state index."""
    m = list(measured) if measured is not None else list(range(circuit.n_qubits))
    return lambda index: (circuit, int(index), m)


def result_matrix(
    family: Family,
    inputs: Sequence,
    noise=None,
    shots: int | None = None,
    seed: int = 0,
    row_labels: Sequence[str] | None = None,
) -> ResultMatrix:
    """One row per input condition.

    Without noise the rows are exact Born probabilities, or sampled
    frequencies when ``shots`` is given. With a NoiseSpec each row is a Monte
    Carlo estimate (exact channel average when ``shots`` is None). Row ``r``
    draws from its own PCG64 stream seeded by ``(seed, r)``.
    """
    from .noise import monte_carlo

    rows = []
    width = None
    for r, inp in enumerate(inputs):
        circuit, start, measured = family(inp)
        if noise is None:
            p = distribution(run(circuit, start), measured)
            if shots is not None:
                p = sample(p, shots, row_rng(seed, r))
        else:
            p = monte_carlo(circuit, noise, shots, seed, input=start, measured=measured, row=r)
        if width is None:
            width = len(measured)
        elif width != len(measured):
            raise DimensionMismatch("all rows must measure the same number of qubits")
        rows.append(p)
    if row_labels is None:
        row_labels = [str(x) for x in inputs]
    cols = [label(i, width) for i in range(1 << width)]
    meta = {"seed": seed, "shots": shots, "noise": None if noise is None else noise.describe()}
    return ResultMatrix(list(row_labels), cols, np.array(rows, dtype=float), meta)
