"""Hardware-agnostic generators for the benchmark circuits.

Bit strings (oracle strings and basis-state labels) list qubit 0 first, so
``"1011"`` sets qubits 0, 2 and 3. As a basis index that string is
1 + 4 + 8 = 13, because qubit 0 is the least-significant bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CNOT, CZ, CPhase, Circuit, Gate, H, Raxis, X
from .libraries import GateLibrary, toffoli_5xx, toffoli_6cnot

PI = math.pi


def label(index: int, n: int) -> str:
    """Basis-state label of ``index`` with qubit 0 first."""
    return "".join("1" if index >> q & 1 else "0" for q in range(n))


def index_of(bits: str) -> int:
    return sum(1 << q for q, ch in enumerate(bits) if ch == "1")


@dataclass(frozen=True)
class OracleString:
    bits: str

    def __post_init__(self) -> None:
        if len(self.bits) != 4 or set(self.bits) - {"0", "1"}:
            raise ValueError(f"oracle strings are 4 bits, got {self.bits!r}")

    @classmethod
    def coerce(cls, value: "OracleString | str | int") -> "OracleString":
        if isinstance(value, OracleString):
            return value
        if isinstance(value, int):
            return cls(label(value, 4))
        return cls(value)

    @property
    def ones(self) -> list[int]:
        return [q for q, ch in enumerate(self.bits) if ch == "1"]

    @property
    def index(self) -> int:
        return index_of(self.bits)

    @classmethod
    def all(cls) -> list["OracleString"]:
        return [cls(label(i, 4)) for i in range(16)]


# --------------------------------------------------------------------------
# composite gates


def margolus() -> Circuit:
    """Relative-phase Toffoli: controls 0 and 1, target 2, with a -1 on |100>."""
    c = 2
    gates = [
        Raxis(c, PI / 2, -PI / 4),
        CNOT(1, c),
        Raxis(c, PI / 2, -PI / 4),
        CNOT(0, c),
        Raxis(c, PI / 2, PI / 4),
        CNOT(1, c),
        Raxis(c, PI / 2, PI / 4),
    ]
    return Circuit(3, gates, "margolus")


def toffoli(lib: GateLibrary | None = None) -> Circuit:
    """Controls 0 and 1, target 2.

    The six-CNOT Clifford+T form by default; with the R/XX library the
    five-XX construction built from controlled square roots of X.
    """
    if lib is GateLibrary.RXX:
        return toffoli_5xx(a=0, b=1, c=2)
    return toffoli_6cnot(a=0, b=1, c=2)


# --------------------------------------------------------------------------
# oracle algorithms

BV_ANCILLA = 4


def bernstein_vazirani(c: "OracleString | str | int", measure_ancilla: bool = False) -> Circuit:
    """Data qubits 0..3, ancilla 4 prepared in |-> for phase kickback.

    With ``measure_ancilla`` a closing H returns the ancilla to |1>, so a
    five-qubit readout is deterministic too (output c followed by 1).
    """
    c = OracleString.coerce(c)
    a = BV_ANCILLA
    gates: list[Gate] = [X(a), H(a)]
    gates += [H(q) for q in range(4)]
    gates += [CNOT(q, a) for q in c.ones]
    gates += [H(q) for q in range(4)]
    if measure_ancilla:
        gates.append(H(a))
    return Circuit(5, gates, f"bv:{c.bits}")


# f(x) = x0 x1 + x2 x3 (mod 2), written as its pairs of interacting qubits
BENT_PAIRS = ((0, 1), (2, 3))


def bent_function(x: int) -> int:
    bits = [(x >> q) & 1 for q in range(4)]
    return (bits[0] & bits[1]) ^ (bits[2] & bits[3])


def walsh_spectrum(f=bent_function, n: int = 4) -> list[int]:
    """Unnormalized Walsh-Hadamard coefficients of (-1)^f."""
    return [
        sum((-1) ** (f(x) ^ (bin(x & w).count("1") & 1)) for x in range(1 << n))
        for w in range(1 << n)
    ]


def hidden_shift(s: "OracleString | str | int") -> Circuit:
    s = OracleString.coerce(s)
    gates: list[Gate] = [H(q) for q in range(4)]
    gates += [X(q) for q in s.ones]
    gates += [CZ(a, b) for a, b in BENT_PAIRS]
    gates += [X(q) for q in s.ones]
    gates += [H(q) for q in range(4)]
    # the dual of f is f itself
    gates += [CZ(a, b) for a, b in BENT_PAIRS]
    gates += [H(q) for q in range(4)]
    return Circuit(4, gates, f"hs:{s.bits}")


# --------------------------------------------------------------------------
# Fourier transform


def qft(n: int) -> Circuit:
    """Quantum Fourier transform without the closing qubit reversal.

    The reversal is left as a classical relabeling: reading qubit q of the
    output as qubit n-1-q gives the DFT matrix exactly.
    """
    if not 1 <= n <= 5:
        raise ValueError("qft is provided for 1 to 5 qubits")
    gates: list[Gate] = []
    for j in reversed(range(n)):
        gates.append(H(j))
        for k in reversed(range(j)):
            gates.append(CPhase(PI / 2 ** (j - k), k, j))
    return Circuit(n, gates, f"qft{n}")


def qft_output_map(n: int) -> tuple[int, ...]:
    return tuple(reversed(range(n)))


def dft_matrix(n: int) -> np.ndarray:
    dim = 1 << n
    j = np.arange(dim)
    return np.exp(2j * PI * np.outer(j, j) / dim) / math.sqrt(dim)
