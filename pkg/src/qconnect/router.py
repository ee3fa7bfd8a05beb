"""Placement search, SWAP insertion and CNOT orientation fixing on coupling graphs."""

from __future__ import annotations

import heapq
import itertools
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .circuit import (
    CNOT,
    Circuit,
    Gate,
    GateCounts,
    H,
    SWAP,
    gate_counts,
    permutation_matrix,
    unitary,
)
from .errors import InvalidConfig, PlacementArityMismatch, SearchSpaceTooLarge, UnroutableGate
from .libraries import GateLibrary, lower_swap, optimize, rebase

MAX_SEARCH_QUBITS = 6
LOOKAHEAD = 6

_SYMMETRIC = frozenset(("cz", "xx", "cphase", "swap"))
DIAGONAL = frozenset(("z", "s", "sdg", "t", "tdg", "za", "rz"))


@dataclass(frozen=True)
class CouplingGraph:
    """Allowed two-qubit interactions.

    For a directed graph an edge (c, t) means a native CNOT with control c and
    target t; the reverse orientation costs four Hadamards but no extra
    entangling gate.
    """

    n_qubits: int
    edges: frozenset[tuple[int, int]]
    directed: bool = False
    label: str = ""

    @classmethod
    def star(cls, n: int, center: int = 0) -> "CouplingGraph":
        if not 0 <= center < n:
            raise ValueError(f"hub {center} outside a {n}-qubit star")
        edges = frozenset((i, center) for i in range(n) if i != center)
        return cls(n, edges, True, f"star{n}c{center}")

    @classmethod
    def line(cls, n: int) -> "CouplingGraph":
        edges = frozenset(e for i in range(n - 1) for e in ((i, i + 1), (i + 1, i)))
        return cls(n, edges, False, f"line{n}")

    @classmethod
    def complete(cls, n: int) -> "CouplingGraph":
        edges = frozenset((i, j) for i in range(n) for j in range(n) if i != j)
        return cls(n, edges, False, f"full{n}")

    @classmethod
    def parse(cls, spec: str) -> "CouplingGraph":
        """Accepts ``star5c2``, ``line5`` and ``full5`` style specs."""
        m = re.fullmatch(r"star(\d+)(?:c(\d+))?", spec)
        if m:
            return cls.star(int(m[1]), int(m[2] or 0))
        m = re.fullmatch(r"(line|full)(\d+)", spec)
        if m:
            return (cls.line if m[1] == "line" else cls.complete)(int(m[2]))
        raise InvalidConfig(f"unknown graph spec {spec!r}")

    def adjacent(self, p: int, q: int) -> bool:
        return (p, q) in self.edges or (q, p) in self.edges

    def native(self, c: int, t: int) -> bool:
        return (c, t) in self.edges

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(sorted(q for q in range(self.n_qubits) if self.adjacent(p, q)))
            for p in range(self.n_qubits)
        )

    @cached_property
    def distance(self) -> tuple[tuple[float, ...], ...]:
        inf = float("inf")
        rows = []
        for s in range(self.n_qubits):
            d = [inf] * self.n_qubits
            d[s] = 0
            todo = deque([s])
            while todo:
                p = todo.popleft()
                for q in self.neighbors[p]:
                    if d[q] == inf:
                        d[q] = d[p] + 1
                        todo.append(q)
            rows.append(tuple(d))
        return tuple(rows)

    @property
    def is_complete(self) -> bool:
        return len(self.edges) == self.n_qubits * (self.n_qubits - 1)


@dataclass(frozen=True)
class Placement:
    """Logical qubit q sits on physical qubit mapping[q]."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"placement {self.mapping} is not a bijection")

    @classmethod
    def identity(cls, n: int) -> "Placement":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.mapping)

    def __getitem__(self, q: int) -> int:
        return self.mapping[q]


@dataclass(frozen=True)
class RoutingReport:
    routed: Circuit
    placement: Placement
    final: Placement
    inserted_swaps: int
    direction_fixes: int

    @property
    def counts(self) -> GateCounts:
        return gate_counts(self.routed)


# --------------------------------------------------------------------------


def _emit_two_qubit(g: Gate, pa: int, pb: int, graph: CouplingGraph, out: list[Gate]) -> None:
    if g.name in _SYMMETRIC and graph.directed and not graph.native(pa, pb):
        out.append(g.on(pb, pa))
    else:
        out.append(g.on(pa, pb))


def _flip_zz_sandwiches(gates: list[Gate], graph: CouplingGraph) -> list[Gate]:
    """Turn reversed CNOT(c,t) D_t CNOT(c,t) into CNOT(t,c) D_c CNOT(t,c).

    With D diagonal the sandwich only depends on c XOR t, so it is symmetric in
    the two qubits. Diagonal gates on c inside the sandwich commute with the
    original CNOTs and are moved in front of it.
    """
    out = list(gates)
    i = 0
    while i < len(out):
        g = out[i]
        if g.name != "cnot" or graph.native(*g.qubits):
            i += 1
            continue
        c, t = g.qubits
        j = i + 1
        inner: list[int] = []
        ok = False
        while j < len(out):
            h = out[j]
            touched = {c, t} & set(h.qubits)
            if not touched:
                j += 1
                continue
            if h.name == "cnot" and h.qubits == (c, t):
                ok = True
                break
            if h.arity == 1 and h.name in DIAGONAL:
                inner.append(j)
                j += 1
                continue
            break
        if not ok:
            i += 1
            continue
        on_c = [out[k] for k in inner if out[k].qubits[0] == c]
        on_t = [out[k].on(c) for k in inner if out[k].qubits[0] == t]
        middle = [out[k] for k in range(i + 1, j) if k not in inner]
        out[i:j + 1] = on_c + [CNOT(t, c)] + middle + on_t + [CNOT(t, c)]
        i += len(on_c) + 1
    return out


def _fix_directions(gates: list[Gate], graph: CouplingGraph) -> tuple[list[Gate], int]:
    if not graph.directed:
        return gates, 0
    out: list[Gate] = []
    fixes = 0
    for g in _flip_zz_sandwiches(gates, graph):
        if g.name == "cnot" and not graph.native(*g.qubits):
            c, t = g.qubits
            out += [H(c), H(t), CNOT(t, c), H(c), H(t)]
            fixes += 1
        else:
            out.append(g)
    return out, fixes


def _restore_swaps(current: list[int], target: Sequence[int], graph: CouplingGraph) -> list[tuple[int, int]]:
    """Fewest edge swaps taking the logical->physical map ``current`` to ``target``."""
    n = graph.n_qubits
    start, goal = tuple(current), tuple(target)
    if start == goal:
        return []
    edges = sorted({tuple(sorted(e)) for e in graph.edges})
    prev: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[int, int]] | None] = {start: None}
    todo = deque([start])
    while todo:
        state = todo.popleft()
        inv = [0] * n
        for q, p in enumerate(state):
            inv[p] = q
        for p, r in edges:
            nxt = list(state)
            nxt[inv[p]], nxt[inv[r]] = r, p
            nxt = tuple(nxt)
            if nxt in prev:
                continue
            prev[nxt] = (state, (p, r))
            if nxt == goal:
                path = []
                while prev[nxt] is not None:
                    nxt, e = prev[nxt]
                    path.append(e)
                return path[::-1]
            todo.append(nxt)
    raise UnroutableGate("cannot restore the initial placement on a disconnected graph")


def route(
    circuit: Circuit,
    graph: CouplingGraph,
    placement: Placement | Sequence[int],
    lib: GateLibrary | None = None,
    restore: bool = False,
) -> RoutingReport:
    """Greedy SWAP insertion along shortest paths.

    Single-qubit gates are held back per logical qubit until that qubit next
    takes part in a two-qubit gate, so every inserted SWAP lands directly
    after the last entangling gate on its pair. A SWAP that follows a CNOT on
    the same pair then costs only two CNOTs once lowered.

    With ``lib`` given, SWAPs are lowered into the library and the result is
    peephole-optimized. With ``restore`` the initial placement is re-established
    at the end; otherwise the final placement is reported and left in place.
    """
    if not isinstance(placement, Placement):
        placement = Placement(tuple(placement))
    n = graph.n_qubits
    if circuit.n_qubits > n or len(placement) != n:
        raise PlacementArityMismatch(
            f"circuit has {circuit.n_qubits} qubits, graph {n}, placement {len(placement)}"
        )
    gates = circuit.gates
    l2p = list(placement.mapping)
    p2l = [0] * n
    for q, p in enumerate(l2p):
        p2l[p] = q

    # dependency DAG over gate indices
    indeg = [0] * len(gates)
    succ: list[list[int]] = [[] for _ in gates]
    last: dict[int, int] = {}
    for i, g in enumerate(gates):
        for q in set(g.qubits):
            j = last.get(q)
            if j is not None:
                succ[j].append(i)
                indeg[i] += 1
            last[q] = i
    ready = [i for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(ready)

    out: list[Gate] = []
    buffered: dict[int, list[Gate]] = {}
    last_pair: dict[int, frozenset[int] | None] = {}
    swaps = 0
    dist = graph.distance

    def flush(q: int) -> None:
        for g in buffered.pop(q, ()):
            out.append(g.on(l2p[q]))

    def finish(i: int) -> None:
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)

    pending_2q = [i for i, g in enumerate(gates) if g.arity == 2]
    done = [False] * len(gates)

    while ready:
        blocked: list[int] = []
        while ready:
            i = heapq.heappop(ready)
            g = gates[i]
            if g.arity == 1:
                buffered.setdefault(g.qubits[0], []).append(g)
            else:
                a, b = g.qubits
                pa, pb = l2p[a], l2p[b]
                if not graph.adjacent(pa, pb):
                    blocked.append(i)
                    continue
                flush(a)
                flush(b)
                _emit_two_qubit(g, pa, pb, graph, out)
                last_pair[pa] = last_pair[pb] = frozenset((pa, pb))
            done[i] = True
            finish(i)
        if not blocked:
            break
        for i in blocked:
            heapq.heappush(ready, i)
        i = blocked[0]
        a, b = gates[i].qubits
        if dist[l2p[a]][l2p[b]] == float("inf"):
            raise UnroutableGate(f"no path between physical qubits {l2p[a]} and {l2p[b]}")
        upcoming = [j for j in pending_2q if not done[j]][:LOOKAHEAD]
        p, r = _choose_swap(a, b, l2p, p2l, graph, last_pair, upcoming, gates)
        out.append(SWAP(p, r))
        swaps += 1
        qp, qr = p2l[p], p2l[r]
        l2p[qp], l2p[qr] = r, p
        p2l[p], p2l[r] = qr, qp
        last_pair[p] = last_pair[r] = None

    if restore:
        for p, r in _restore_swaps(l2p, placement.mapping, graph):
            out.append(SWAP(p, r))
            swaps += 1
            qp, qr = p2l[p], p2l[r]
            l2p[qp], l2p[qr] = r, p
            p2l[p], p2l[r] = qr, qp
    for q in sorted(buffered):
        flush(q)

    out, fixes = _fix_directions(out, graph)
    routed = Circuit(n, out, circuit.name)
    if lib is not None:
        routed = optimize(lower_swaps(routed, lib, graph), lib)
    return RoutingReport(routed, placement, Placement(tuple(l2p)), swaps, fixes)


def _choose_swap(a, b, l2p, p2l, graph, last_pair, upcoming, gates) -> tuple[int, int]:
    dist = graph.distance
    pa, pb = l2p[a], l2p[b]
    here = dist[pa][pb]
    best = None
    for p in (pa, pb):
        for r in graph.neighbors[p]:
            trial = list(l2p)
            qp, qr = p2l[p], p2l[r]
            trial[qp], trial[qr] = r, p
            gain = here - dist[trial[a]][trial[b]]
            if gain <= 0:
                continue
            merge = last_pair.get(p) == frozenset((p, r)) and last_pair.get(r) == frozenset((p, r))
            ahead = sum(dist[trial[gates[j].qubits[0]]][trial[gates[j].qubits[1]]] for j in upcoming)
            key = (-gain, not merge, ahead, min(p, r), max(p, r))
            if best is None or key < best[0]:
                best = (key, (min(p, r), max(p, r)))
    assert best is not None
    return best[1]


def lower_swaps(circuit: Circuit, lib: GateLibrary, graph: CouplingGraph | None = None) -> Circuit:
    """Expand every SWAP into three library entanglers.

    CNOT orientation is chosen so that, where a neighbouring CNOT acts on the
    same pair, the outer CNOTs of the expansion line up with it.
    """
    gates = circuit.gates
    if not any(g.name == "swap" for g in gates):
        return circuit
    out: list[Gate] = []
    for i, g in enumerate(gates):
        if g.name != "swap":
            out.append(g)
            continue
        p, r = g.qubits
        if lib is GateLibrary.RXX:
            out.extend(rebase(Circuit(circuit.n_qubits, [g]), lib).gates)
            continue
        if graph is not None and graph.directed:
            c, t = (p, r) if graph.native(p, r) else (r, p)
            out += [CNOT(c, t), H(c), H(t), CNOT(c, t), H(c), H(t), CNOT(c, t)]
            continue
        c, t = _swap_orientation(out, gates, i, p, r)
        out += lower_swap(c, t, lib)
    return circuit.with_gates(out)


def _swap_orientation(out: list[Gate], gates: Sequence[Gate], i: int, p: int, r: int) -> tuple[int, int]:
    pair = {p, r}
    for g in reversed(out):
        if g.arity == 2 and pair & set(g.qubits):
            if g.name == "cnot" and set(g.qubits) == pair:
                return g.qubits
            break
    for g in gates[i + 1:]:
        if g.arity == 2 and pair & set(g.qubits):
            if g.name == "cnot" and set(g.qubits) == pair:
                return g.qubits
            break
    return (p, r)


def best_placement(
    circuit: Circuit,
    graph: CouplingGraph,
    lib: GateLibrary | None = None,
    restore: bool = False,
) -> tuple[Placement, RoutingReport]:
    """Exhaustive placement search.

    Minimizes the two-qubit count, then the single-qubit count, then the
    placement tuple. Only the physical positions of qubits that carry gates
    are enumerated; idle qubits fill the remaining positions in order.
    """
    n = graph.n_qubits
    if n > MAX_SEARCH_QUBITS:
        raise SearchSpaceTooLarge(f"exhaustive placement is limited to {MAX_SEARCH_QUBITS} qubits")
    if circuit.n_qubits > n:
        raise PlacementArityMismatch(f"circuit has {circuit.n_qubits} qubits, graph {n}")
    active = sorted({q for g in circuit.gates for q in g.qubits})
    idle = [q for q in range(n) if q not in active]
    best = None
    # on a complete undirected graph every placement is a relabeling of the
    # identity, so the lexicographically first one already wins the tie-break
    candidates = (
        [tuple(range(len(active)))]
        if graph.is_complete and not graph.directed
        else itertools.permutations(range(n), len(active))
    )
    for chosen in candidates:
        mapping = [0] * n
        for q, p in zip(active, chosen):
            mapping[q] = p
        rest = sorted(set(range(n)) - set(chosen))
        for q, p in zip(idle, rest):
            mapping[q] = p
        placement = Placement(tuple(mapping))
        report = route(circuit, graph, placement, lib=lib, restore=restore)
        c = report.counts
        key = (c.two, c.single, placement.mapping)
        if best is None or key < best[0]:
            best = (key, report)
    return best[1].placement, best[1]


def routing_error(original: Circuit, report: RoutingReport) -> float:
    """Max-norm distance between the routed unitary and the relabeled original.

    The routed circuit starting from ``placement`` must act like the original
    followed by moving each logical qubit to its ``final`` physical position.
    Global phase is divided out.
    """
    n = report.routed.n_qubits
    u = unitary(report.routed) @ permutation_matrix(report.placement.mapping)
    v = permutation_matrix(report.final.mapping) @ unitary(original.widened(n))
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    phase = u[idx] / v[idx] if abs(u[idx]) > 1e-12 else 1.0
    phase /= abs(phase)
    return float(np.max(np.abs(u - phase * v)))


def routing_preserved(original: Circuit, report: RoutingReport, tol: float = 1e-9) -> bool:
    return routing_error(original, report) <= tol
