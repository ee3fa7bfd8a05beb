"""Gate libraries, rebasing into them, and library-preserving peephole passes.

Three libraries are supported:

* ``CLIFFORD_T``  -- X, Y, Z, H, S, S+, T, T+ and CNOT (discrete, exact only)
* ``CLIFFORD_ZA`` -- the above plus Z^a = diag(1, e^{i pi a}) for any real a
* ``RXX``         -- equatorial rotations R_alpha^theta, Rz and XX(chi) = exp(-i chi X.X)
"""

from __future__ import annotations

import enum
import math
from collections import deque
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .circuit import (
    CNOT,
    Circuit,
    Gate,
    H,
    Raxis,
    Rz,
    XX,
    Za,
    gate_matrix,
    wrap_za,
)
from .errors import InvalidConfig, NotExactlyExpressible

PI = math.pi
_ATOL = 1e-9


class GateLibrary(enum.Enum):
    CLIFFORD_T = "cliffordt"
    CLIFFORD_ZA = "cliffordza"
    RXX = "rxx"

    def admits(self, g: Gate) -> bool:
        return g.name in _MEMBERS[self]

    @classmethod
    def parse(cls, text: str) -> "GateLibrary":
        key = text.strip().lower().replace("+", "").replace("/", "").replace("_", "")
        for lib in cls:
            if lib.value == key:
                return lib
        raise InvalidConfig(f"unknown gate library {text!r}")


_CT_SINGLE = ("x", "y", "z", "h", "s", "sdg", "t", "tdg")
_MEMBERS = {
    GateLibrary.CLIFFORD_T: frozenset(_CT_SINGLE + ("cnot",)),
    GateLibrary.CLIFFORD_ZA: frozenset(_CT_SINGLE + ("za", "cnot")),
    GateLibrary.RXX: frozenset(("raxis", "rz", "xx")),
}
_DIAGONAL = frozenset(("z", "s", "sdg", "t", "tdg", "za", "rz"))


# --------------------------------------------------------------------------
# 2x2 helpers


def _su2(u: np.ndarray) -> np.ndarray:
    return u / np.sqrt(np.linalg.det(u))


def _phase_key(u: np.ndarray) -> tuple:
    """Hashable key identifying a 2x2 unitary up to global phase."""
    flat = u.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 1e-6)]
    v = flat * (abs(pivot) / pivot)
    return tuple(np.round(np.concatenate([v.real, v.imag]), 7) + 0.0)


def _is_identity(u: np.ndarray, tol: float = _ATOL) -> bool:
    return abs(abs(np.trace(u)) - 2.0) < tol * 10 and abs(u[0, 1]) < tol and abs(u[1, 0]) < tol


def _run_matrix(gates: Iterable[Gate]) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for g in gates:
        m = gate_matrix(g) @ m
    return m


@lru_cache(maxsize=None)
def clifford_t_table(max_len: int = 7) -> dict[tuple, tuple[str, ...]]:
    """Shortest single-qubit Clifford+T words for every unitary reachable in ``max_len`` gates.

    Breadth-first search over words, deduplicated by unitary modulo phase.
    """
    mats = {n: gate_matrix(Gate(n, (0,))) for n in _CT_SINGLE}
    start = np.eye(2, dtype=complex)
    table: dict[tuple, tuple[str, ...]] = {_phase_key(start): ()}
    frontier = deque([(start, ())])
    while frontier:
        m, word = frontier.popleft()
        if len(word) == max_len:
            continue
        for name in _CT_SINGLE:
            nm = mats[name] @ m
            key = _phase_key(nm)
            if key not in table:
                table[key] = word + (name,)
                frontier.append((nm, word + (name,)))
    return table


def clifford_t_word(u: np.ndarray) -> tuple[str, ...] | None:
    return clifford_t_table().get(_phase_key(np.asarray(u, dtype=complex)))


def _pauli_coefficients(u: np.ndarray) -> tuple[float, float, float, float]:
    """(u0, u1, u2, u3) with su2(u) = u0 I - i(u1 X + u2 Y + u3 Z)."""
    v = _su2(u)
    a, b = v[0, 0], v[1, 0]
    return a.real, -b.imag, b.real, -a.imag


def rxx_single(u: np.ndarray, q: int) -> list[Gate]:
    """At most two RXX-library gates (Rz then R_alpha^theta) equal to ``u`` up to phase."""
    v = _su2(np.asarray(u, dtype=complex))
    a, b = v[0, 0], v[1, 0]
    if abs(b) < 1e-12:
        phi = -2 * np.angle(a)
        return [] if _angle_is_trivial(phi) else [Rz(q, _wrap_2pi(phi))]
    if abs(a) < 1e-12:
        phi = 0.0
    else:
        phi = -2 * np.angle(a)
    c, s = abs(a), abs(b)
    theta = 2 * math.atan2(s, c)
    alpha = float(np.angle(1j * b * np.exp(0.5j * phi)))
    out = [] if _angle_is_trivial(phi) else [Rz(q, _wrap_2pi(phi))]
    out.append(Raxis(q, alpha, theta))
    return out


def _wrap_2pi(x: float) -> float:
    return math.remainder(x, 4 * PI) if abs(x) > 2 * PI else x


def _angle_is_trivial(phi: float) -> bool:
    r = math.remainder(phi, 2 * PI)
    return abs(r) < 1e-10


def split_x_rotation(u: np.ndarray) -> tuple[float, np.ndarray]:
    """Write u = Rx(x) @ E with E a rotation about an equatorial axis (or identity)."""
    _, _, u2, u3 = _pauli_coefficients(u)
    x = 2 * math.atan2(u3, u2) if abs(u3) > 1e-12 else 0.0
    rest = gate_matrix(Raxis(0, 0.0, -x)) @ u
    return x, rest


# --------------------------------------------------------------------------
# frozen two-qubit identities (time order, verified in tests)

# CNOT(c, t) = Ry(pi/2)_c . XX(pi/4) . Rx(-pi/2)_c . Ry(-pi/2)_c . Rx(-pi/2)_t
def cnot_as_xx(c: int, t: int) -> list[Gate]:
    return [
        Raxis(c, PI / 2, PI / 2),
        XX(PI / 4, c, t),
        Raxis(c, 0.0, -PI / 2),
        Raxis(c, PI / 2, -PI / 2),
        Raxis(t, 0.0, -PI / 2),
    ]


def zz_as_xx(chi: float, a: int, b: int) -> list[Gate]:
    """exp(-i chi Z.Z) from one XX(chi) conjugated by Ry(pi/2) on both qubits."""
    return [
        Raxis(a, PI / 2, PI / 2),
        Raxis(b, PI / 2, PI / 2),
        XX(chi, a, b),
        Raxis(a, PI / 2, -PI / 2),
        Raxis(b, PI / 2, -PI / 2),
    ]


def zx_as_xx(chi: float, a: int, b: int) -> list[Gate]:
    """exp(-i chi Z_a X_b)."""
    return [Raxis(a, PI / 2, PI / 2), XX(chi, a, b), Raxis(a, PI / 2, -PI / 2)]


def cphase_as_xx(phi: float, a: int, b: int) -> list[Gate]:
    # diag(1,1,1,e^{i phi}) = Rz_a(phi/2) Rz_b(phi/2) exp(+i phi/4 Z.Z) up to phase
    return [Rz(a, phi / 2), Rz(b, phi / 2), *zz_as_xx(-phi / 4, a, b)]


def _cphase_za(phi: float, a: int, b: int) -> list[Gate]:
    h = phi / (2 * PI)
    return [Za(a, h), Za(b, h), CNOT(a, b), Za(b, -h), CNOT(a, b)]


def _xx_clifford(chi: float, a: int, b: int) -> list[Gate]:
    k = chi / (PI / 4)
    if abs(k - round(k)) < 1e-9:
        k = int(round(k)) % 4
        if k == 0:
            return []
        if k == 2:
            return [Gate("x", (a,)), Gate("x", (b,))]
        # XX(pi/4) = (post)^-1 . CNOT . (pre)^-1, read off the frozen CNOT identity
        out = [
            Raxis(a, PI / 2, -PI / 2),
            CNOT(a, b),
            Raxis(b, 0.0, PI / 2),
            Raxis(a, PI / 2, PI / 2),
            Raxis(a, 0.0, PI / 2),
        ]
        if k == 3:
            out += [Gate("x", (a,)), Gate("x", (b,))]
        return out
    return [H(a), H(b), CNOT(a, b), Rz(b, 2 * chi), CNOT(a, b), H(a), H(b)]


def _swap_as_cnots(a: int, b: int) -> list[Gate]:
    return [CNOT(a, b), CNOT(b, a), CNOT(a, b)]


# --------------------------------------------------------------------------
# rebasing


def _expand_two_qubit(g: Gate, lib: GateLibrary) -> list[Gate]:
    a, b = g.qubits
    if lib is GateLibrary.RXX:
        if g.name == "xx":
            return [g]
        if g.name == "cnot":
            return cnot_as_xx(a, b)
        if g.name == "cz":
            return cphase_as_xx(PI, a, b)
        if g.name == "cphase":
            return cphase_as_xx(g.params[0], a, b)
        if g.name == "swap":
            return [x for c, t in ((a, b), (b, a), (a, b)) for x in cnot_as_xx(c, t)]
    else:
        if g.name == "cnot":
            return [g]
        if g.name == "cz":
            return [H(b), CNOT(a, b), H(b)]
        if g.name == "swap":
            return _swap_as_cnots(a, b)
        if g.name == "cphase":
            phi = g.params[0]
            k = phi / PI
            if abs(k - round(k)) < 1e-9 and int(round(k)) % 2 == 1:
                return [H(b), CNOT(a, b), H(b)]
            if abs(k - round(k)) < 1e-9:
                return []
            return _cphase_za(phi, a, b)
        if g.name == "xx":
            return _xx_clifford(g.params[0], a, b)
    raise AssertionError(g.name)


def _single_into(u: np.ndarray, q: int, lib: GateLibrary, what: str) -> list[Gate]:
    if lib is GateLibrary.RXX:
        return rxx_single(u, q)
    word = clifford_t_word(u)
    if word is not None:
        return [Gate(n, (q,)) for n in word]
    if lib is GateLibrary.CLIFFORD_T:
        raise NotExactlyExpressible(f"{what} has no exact Clifford+T form")
    return za_euler(u, q)


def za_euler(u: np.ndarray, q: int) -> list[Gate]:
    """u as Z^a . H . Z^b . H . Z^c (time order), dropping trivial factors."""
    v = _su2(np.asarray(u, dtype=complex))
    if abs(v[1, 0]) < 1e-12:
        return _za_gate(q, 2 * np.angle(v[1, 1]) / PI)
    # Rz(l) Rx(m) Rz(n) Euler angles, v = Rz(l) @ Rx(m) @ Rz(n)
    m = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) < 1e-12:
        s = 0.0
        d = 2 * (np.angle(v[1, 0]) + PI / 2)
    else:
        s = -2 * np.angle(v[0, 0])  # l + n
        d = 2 * (np.angle(v[1, 0]) + PI / 2)  # l - n
    l, n = (s + d) / 2, (s - d) / 2
    return [*_za_gate(q, n / PI), H(q), *_za_gate(q, m / PI), H(q), *_za_gate(q, l / PI)]


def _za_gate(q: int, a: float) -> list[Gate]:
    a = wrap_za(a)
    if abs(a) < 1e-12 or abs(abs(a) - 2.0) < 1e-12:
        return []
    word = clifford_t_word(np.diag([1, np.exp(1j * PI * a)]))
    if word is not None and len(word) <= 1:
        return [Gate(n, (q,)) for n in word]
    return [Za(q, a)]


def rebase(circuit: Circuit, lib: GateLibrary) -> Circuit:
    """Translate every gate into ``lib``, preserving the unitary up to global phase."""
    out: list[Gate] = []
    for g in circuit.gates:
        if lib.admits(g):
            out.append(g)
            continue
        if g.arity == 1:
            out.extend(_single_into(gate_matrix(g), g.qubits[0], lib, str(g)))
            continue
        for h in _expand_two_qubit(g, lib):
            if lib.admits(h):
                out.append(h)
            elif h.arity == 1:
                out.extend(_single_into(gate_matrix(h), h.qubits[0], lib, f"{h} (from {g})"))
            else:
                raise AssertionError(f"expansion of {g} produced foreign gate {h}")
    return circuit.with_gates(out)


def lower_swap(a: int, b: int, lib: GateLibrary) -> list[Gate]:
    if lib is GateLibrary.RXX:
        return _expand_two_qubit(Gate("swap", (a, b)), lib)
    return _swap_as_cnots(a, b)


# --------------------------------------------------------------------------
# peephole passes


def _runs_by_qubit(gates: Sequence[Gate]):
    """Yield (qubit, [indices]) for every maximal single-qubit run."""
    current: dict[int, list[int]] = {}
    for i, g in enumerate(gates):
        if g.arity == 1:
            current.setdefault(g.qubits[0], []).append(i)
        else:
            for q in g.qubits:
                run = current.pop(q, None)
                if run:
                    yield q, run
    for q in sorted(current):
        yield q, current[q]


def _resynth_clifford(run: list[Gate], q: int, lib: GateLibrary) -> list[Gate]:
    """Shortest equivalent of a single-qubit run via dynamic programming over sub-runs."""
    n = len(run)
    best: list[tuple[int, list[Gate]] | None] = [None] * (n + 1)
    best[0] = (0, [])
    for i in range(1, n + 1):
        m = np.eye(2, dtype=complex)
        for j in range(i - 1, -1, -1):
            m = m @ gate_matrix(run[j])
            if best[j] is None:
                continue
            cand = _short_form(m, q, lib, i - j)
            if cand is None:
                continue
            cost = best[j][0] + len(cand)
            if best[i] is None or cost < best[i][0]:
                best[i] = (cost, best[j][1] + cand)
    return best[n][1]


def _short_form(m: np.ndarray, q: int, lib: GateLibrary, length: int) -> list[Gate] | None:
    word = clifford_t_word(m)
    if word is not None:
        return [Gate(n, (q,)) for n in word]
    if lib is GateLibrary.CLIFFORD_ZA:
        if abs(m[0, 1]) < 1e-12 and abs(m[1, 0]) < 1e-12:
            return _za_gate(q, np.angle(m[1, 1] / m[0, 0]) / PI)
        if length > 3:
            return za_euler(m, q)
    return None


def _squash_clifford(circuit: Circuit, lib: GateLibrary) -> Circuit:
    gates = list(circuit.gates)
    replace: dict[int, list[Gate]] = {}
    drop: set[int] = set()
    for q, idx in _runs_by_qubit(gates):
        run = [gates[i] for i in idx]
        if len(run) < 2 and not (len(run) == 1 and _is_identity(gate_matrix(run[0]))):
            continue
        new = _resynth_clifford(run, q, lib)
        if len(new) < len(run):
            replace[idx[-1]] = new
            drop.update(idx)
    if not drop:
        return circuit
    out: list[Gate] = []
    for i, g in enumerate(gates):
        if i in replace:
            out.extend(replace[i])
        elif i not in drop:
            out.append(g)
    return circuit.with_gates(out)


def _rxx_emit(u: np.ndarray, q: int) -> list[Gate]:
    if _is_identity(_su2(u)) or _is_identity(-_su2(u)):
        return []
    return rxx_single(u, q)


def _squash_rxx(circuit: Circuit) -> Circuit:
    """Merge RXX single-qubit runs, sliding X rotations through XX gates.

    Rx commutes with XX on either operand, so the X-rotation part of each run
    is carried into the next run on that qubit. Each qubit independently keeps
    whichever of the carried / uncarried renderings is shorter.
    """
    gates = list(circuit.gates)
    n = circuit.n_qubits
    # Per qubit, candidate emissions keyed by the position they are inserted at.
    plans = {}
    for carry in (False, True):
        pending = [np.eye(2, dtype=complex) for _ in range(n)]
        touched = [False] * n
        emit: dict[tuple[int, int], list[Gate]] = {}
        for i, g in enumerate(gates):
            if g.arity == 1:
                q = g.qubits[0]
                pending[q] = gate_matrix(g) @ pending[q]
                touched[q] = True
                continue
            for q in g.qubits:
                if not touched[q]:
                    continue
                u = pending[q]
                if carry and g.name == "xx":
                    x, rest = split_x_rotation(u)
                    emit[(q, i)] = _rxx_emit(rest, q)
                    pending[q] = gate_matrix(Raxis(q, 0.0, x))
                    touched[q] = abs(math.remainder(x, 4 * PI)) > 1e-12
                else:
                    emit[(q, i)] = _rxx_emit(u, q)
                    pending[q] = np.eye(2, dtype=complex)
                    touched[q] = False
        for q in range(n):
            if touched[q]:
                emit[(q, len(gates))] = _rxx_emit(pending[q], q)
        plans[carry] = emit

    def cost(emit, q):
        return sum(len(v) for (qq, _), v in emit.items() if qq == q)

    original = [0] * n
    for g in gates:
        if g.arity == 1:
            original[g.qubits[0]] += 1

    choice: dict[int, dict | None] = {}
    for q in range(n):
        options = [(cost(plans[True], q), 0, plans[True]), (cost(plans[False], q), 1, plans[False])]
        best = min(options, key=lambda t: t[:2])
        choice[q] = best[2] if best[0] < original[q] else None

    out: list[Gate] = []
    for i, g in enumerate(gates + [None]):
        for q in range(n):
            plan = choice[q]
            if plan is not None and (q, i) in plan:
                out.extend(plan[(q, i)])
        if g is None:
            break
        if g.arity == 1 and choice[g.qubits[0]] is not None:
            continue
        out.append(g)
    return circuit.with_gates(out)


def squash_single_qubit_runs(circuit: Circuit, lib: GateLibrary) -> Circuit:
    if lib is GateLibrary.RXX:
        return _squash_rxx(circuit)
    return _squash_clifford(circuit, lib)


def _commutes_through(g: Gate, q: int, role: str) -> bool:
    """Whether single-qubit gate g on operand q commutes with a two-qubit gate.

    role is 'control' / 'target' for CNOT, 'x' for XX operands.
    """
    if role == "control":
        return g.name in _DIAGONAL
    if g.name == "x":
        return True
    if g.name == "raxis":
        alpha = g.params[0]
        return abs(math.sin(alpha)) < 1e-12
    return False


def cancel_two_qubit_pairs(circuit: Circuit) -> Circuit:
    """Cancel CNOT pairs and fuse XX pairs separated only by commuting single-qubit gates."""
    gates: list[Gate | None] = list(circuit.gates)
    changed = True
    while changed:
        changed = False
        last2q: dict[int, int] = {}
        for i, g in enumerate(gates):
            if g is None or g.arity == 1:
                continue
            a, b = g.qubits
            j = last2q.get(a)
            if j is not None and j == last2q.get(b) and _fusable(gates, j, i):
                prev = gates[j]
                if g.name == "cnot":
                    gates[j] = gates[i] = None
                else:
                    chi = math.remainder(prev.params[0] + g.params[0], PI)
                    gates[i] = None
                    gates[j] = None if abs(chi) < 1e-12 else XX(chi, *prev.qubits)
                changed = True
                break
            last2q[a] = last2q[b] = i
    return circuit.with_gates(g for g in gates if g is not None)


def _fusable(gates: list[Gate | None], j: int, i: int) -> bool:
    prev, g = gates[j], gates[i]
    if g.name != prev.name:
        return False
    if g.name == "cnot":
        if prev.qubits != g.qubits:
            return False
        roles = {g.qubits[0]: "control", g.qubits[1]: "target"}
    elif g.name == "xx":
        if set(prev.qubits) != set(g.qubits):
            return False
        roles = {q: "x" for q in g.qubits}
    else:
        return False
    for k in range(j + 1, i):
        h = gates[k]
        if h is None:
            continue
        for q in h.qubits:
            if q in roles and not _commutes_through(h, q, roles[q]):
                return False
    return True


def optimize(circuit: Circuit, lib: GateLibrary) -> Circuit:
    """Iterate pair cancellation and single-qubit squashing to a fixed point."""
    prev = None
    cur = circuit
    while prev is None or cur.gates != prev.gates:
        prev = cur
        cur = squash_single_qubit_runs(cancel_two_qubit_pairs(cur), lib)
    return cur


# --------------------------------------------------------------------------
# Toffoli constructions


def toffoli_6cnot(a: int = 2, b: int = 1, c: int = 0, n: int = 3) -> Circuit:
    """Clifford+T Toffoli with controls a, b and target c.

    The controlled-S block on (a, b) is diagonal in the controls, so it commutes
    with the four target CNOTs; it is kept last, where a router can bring the
    controls together after the target's interactions are done.
    """
    gates = [
        H(c),
        CNOT(b, c), Gate("tdg", (c,)),
        CNOT(a, c), Gate("t", (c,)),
        CNOT(b, c), Gate("tdg", (c,)),
        CNOT(a, c), Gate("t", (b,)), Gate("t", (c,)),
        H(c),
        CNOT(a, b), Gate("t", (a,)), Gate("tdg", (b,)),
        CNOT(a, b),
    ]
    return Circuit(n, gates, "toffoli")


def toffoli_5xx(a: int = 2, b: int = 1, c: int = 0, n: int = 3) -> Circuit:
    """R/XX Toffoli with five XX gates.

    Controlled-sqrt(X) gates are locally equivalent to XX(pi/8), so the
    construction CV(b,c) CNOT(a,b) CV+(b,c) CNOT(a,b) CV(a,c) uses three half
    angle and two full angle entanglers.
    """
    gates: list[Gate] = []
    gates += _controlled_sqrt_x(b, c, +1)
    gates += cnot_as_xx(a, b)
    gates += _controlled_sqrt_x(b, c, -1)
    gates += cnot_as_xx(a, b)
    gates += _controlled_sqrt_x(a, c, +1)
    return optimize(Circuit(n, gates, "toffoli"), GateLibrary.RXX)


def _controlled_sqrt_x(ctrl: int, tgt: int, sign: int) -> list[Gate]:
    # controlled (e^{i pi/4} Rx(pi/2))^sign
    #   = P_ctrl(sign pi/4) . Rx_tgt(sign pi/4) . exp(+i sign pi/8 Z_ctrl X_tgt)
    return [
        Rz(ctrl, sign * PI / 4),
        Raxis(tgt, 0.0, sign * PI / 4),
        *zx_as_xx(-sign * PI / 8, ctrl, tgt),
    ]
