"""Circuit intermediate representation and its exact unitary semantics.

Basis-state convention: qubit 0 is the least-significant bit of a basis index,
so the state |q2 q1 q0> = |100> has index 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, RegisterTooLarge

MAX_DENSE_QUBITS = 10

# name -> (arity, number of real parameters)
GATE_SPECS: dict[str, tuple[int, int]] = {
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "h": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "za": (1, 1),
    "raxis": (1, 2),
    "rz": (1, 1),
    "cnot": (2, 0),
    "cz": (2, 0),
    "xx": (2, 1),
    "swap": (2, 0),
    "cphase": (2, 1),
}

# Gates whose text form puts the angle before the qubit operands.
_ANGLE_FIRST = {"xx", "cphase"}


def wrap_za(a: float) -> float:
    """Map a Z^a exponent into (-2, 2]."""
    a = math.fmod(a, 4.0)
    if a <= -2.0:
        a += 4.0
    elif a > 2.0:
        a -= 4.0
    return a


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        spec = GATE_SPECS.get(self.name)
        if spec is None:
            raise ValueError(f"unknown gate kind {self.name!r}")
        arity, nparams = spec
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.qubits) != arity:
            raise ValueError(f"{self.name} takes {arity} qubit(s), got {self.qubits}")
        if len(self.params) != nparams:
            raise ValueError(f"{self.name} takes {nparams} parameter(s), got {self.params}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.name} operands must be distinct, got {self.qubits}")
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError(f"non-finite parameter in {self.params}")
        if self.name == "za" and not -2.0 < self.params[0] <= 2.0:
            raise ValueError(f"za exponent {self.params[0]} outside (-2, 2]")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def matrix(self) -> np.ndarray:
        return gate_matrix(self)

    def inverse(self) -> "Gate":
        n, q, p = self.name, self.qubits, self.params
        if n in ("x", "y", "z", "h", "cnot", "cz", "swap"):
            return self
        if n in _DAGGER:
            return Gate(_DAGGER[n], q)
        if n == "za":
            return Gate("za", q, (wrap_za(-p[0]),))
        if n == "raxis":
            return Gate("raxis", q, (p[0], -p[1]))
        return Gate(n, q, (-p[0],))

    def on(self, *qubits: int) -> "Gate":
        return Gate(self.name, qubits, self.params)

    def __str__(self) -> str:
        return format_gate(self)


_DAGGER = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}


# Convenience constructors, so generators read like circuit diagrams.
def X(q): return Gate("x", (q,))
def Y(q): return Gate("y", (q,))
def Z(q): return Gate("z", (q,))
def H(q): return Gate("h", (q,))
def S(q): return Gate("s", (q,))
def Sdg(q): return Gate("sdg", (q,))
def T(q): return Gate("t", (q,))
def Tdg(q): return Gate("tdg", (q,))
def Za(q, a): return Gate("za", (q,), (wrap_za(a),))
def Raxis(q, alpha, theta): return Gate("raxis", (q,), (alpha, theta))
def Rz(q, theta): return Gate("rz", (q,), (theta,))
def CNOT(c, t): return Gate("cnot", (c, t))
def CZ(a, b): return Gate("cz", (a, b))
def XX(chi, a, b): return Gate("xx", (a, b), (chi,))
def SWAP(a, b): return Gate("swap", (a, b))
def CPhase(phi, a, b): return Gate("cphase", (a, b), (phi,))


_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * math.pi / 4)]),
    # two-qubit matrices: the first operand is the high bit of the 4x4 index
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
_XX = np.kron(_FIXED["x"], _FIXED["x"])


def raxis_matrix(alpha: float, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -1j * np.exp(-1j * alpha) * s], [-1j * np.exp(1j * alpha) * s, c]]
    )


def gate_matrix(g: Gate) -> np.ndarray:
    m = _FIXED.get(g.name)
    if m is not None:
        return m
    if g.name == "za":
        return np.diag([1, np.exp(1j * math.pi * g.params[0])])
    if g.name == "raxis":
        return raxis_matrix(*g.params)
    if g.name == "rz":
        th = g.params[0]
        return np.diag([np.exp(-0.5j * th), np.exp(0.5j * th)])
    if g.name == "xx":
        chi = g.params[0]
        return math.cos(chi) * np.eye(4) - 1j * math.sin(chi) * _XX
    if g.name == "cphase":
        return np.diag([1, 1, 1, np.exp(1j * g.params[0])])
    raise AssertionError(g.name)


@dataclass(frozen=True)
class GateCounts:
    single: int = 0
    two: int = 0

    @property
    def total(self) -> int:
        return self.single + self.two

    def __add__(self, other: "GateCounts") -> "GateCounts":
        return GateCounts(self.single + other.single, self.two + other.two)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if not 1 <= self.n_qubits:
            raise ValueError("a circuit needs at least one qubit")
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise ValueError(f"{g} addresses a qubit outside a {self.n_qubits}-qubit register")

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        n = max(self.n_qubits, other.n_qubits)
        return Circuit(n, self.gates + other.gates, self.name)

    def with_gates(self, gates: Iterable[Gate], n_qubits: int | None = None) -> "Circuit":
        return Circuit(n_qubits or self.n_qubits, tuple(gates), self.name)

    def widened(self, n_qubits: int) -> "Circuit":
        if n_qubits < self.n_qubits:
            raise ValueError("cannot shrink a register")
        return Circuit(n_qubits, self.gates, self.name)

    def remapped(self, mapping: Sequence[int], n_qubits: int | None = None) -> "Circuit":
        """Relabel qubit q as mapping[q]."""
        gates = [g.on(*(mapping[q] for q in g.qubits)) for g in self.gates]
        return Circuit(n_qubits or self.n_qubits, gates, self.name)


# --------------------------------------------------------------------------
# dense semantics


def apply_gate(tensor: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Apply ``g`` to a tensor whose first ``n`` axes are qubits (axis 0 = qubit n-1).

    Trailing axes (if any) are carried along untouched, which lets the same
    routine act on a single state or on all columns of a matrix.
    """
    m = gate_matrix(g)
    if g.arity == 1:
        ax = n - 1 - g.qubits[0]
        out = np.tensordot(m, tensor, axes=([1], [ax]))
        return np.moveaxis(out, 0, ax)
    a, b = (n - 1 - q for q in g.qubits)
    m = m.reshape(2, 2, 2, 2)
    out = np.tensordot(m, tensor, axes=([2, 3], [a, b]))
    return np.moveaxis(out, [0, 1], [a, b])


def unitary(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise RegisterTooLarge(f"dense unitary capped at {MAX_DENSE_QUBITS} qubits, got {n}")
    dim = 1 << n
    t = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in circuit.gates:
        t = apply_gate(t, g, n)
    return t.reshape(dim, dim)


def equivalent_up_to_global_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise DimensionMismatch(f"{u.shape} vs {v.shape}")
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(u[idx]) < 1e-12:
        return False
    phase = u[idx] / v[idx]
    phase /= abs(phase)
    return float(np.max(np.abs(u - phase * v))) <= tol


def gate_counts(circuit: Circuit | Iterable[Gate]) -> GateCounts:
    single = two = 0
    for g in circuit:
        if g.arity == 1:
            single += 1
        else:
            two += 1
    return GateCounts(single, two)


def inverse(circuit: Circuit) -> Circuit:
    return circuit.with_gates(g.inverse() for g in reversed(circuit.gates))


def permutation_matrix(mapping: Sequence[int]) -> np.ndarray:
    """Unitary sending the value of qubit q to qubit mapping[q]."""
    n = len(mapping)
    dim = 1 << n
    p = np.zeros((dim, dim))
    for i in range(dim):
        j = 0
        for q in range(n):
            if i >> q & 1:
                j |= 1 << mapping[q]
        p[j, i] = 1
    return p


# --------------------------------------------------------------------------
# text format


def format_gate(g: Gate) -> str:
    angles = [repr(p) for p in g.params]
    qubits = [str(q) for q in g.qubits]
    if g.name in _ANGLE_FIRST:
        return " ".join([g.name, *angles, *qubits])
    return " ".join([g.name, *qubits, *angles])


def dumps(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_qubits}"]
    if circuit.name:
        lines.insert(0, f"# {circuit.name}")
    lines.extend(format_gate(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    n = None
    name = ""
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if n is None and not name:
                name = line[1:].strip()
            continue
        head, *rest = line.split()
        if head == "qubits":
            n = int(rest[0])
            continue
        if n is None:
            raise ValueError(f"line {lineno}: gate before 'qubits' header")
        spec = GATE_SPECS.get(head)
        if spec is None:
            raise ValueError(f"line {lineno}: unknown gate {head!r}")
        arity, nparams = spec
        if len(rest) != arity + nparams:
            raise ValueError(f"line {lineno}: expected {arity + nparams} fields after {head}")
        if head in _ANGLE_FIRST:
            params, qubits = rest[:nparams], rest[nparams:]
        else:
            qubits, params = rest[:arity], rest[arity:]
        gates.append(Gate(head, tuple(int(q) for q in qubits), tuple(float(p) for p in params)))
    if n is None:
        raise ValueError("missing 'qubits N' header")
    return Circuit(n, gates, name)
