"""Algorithm specs, the generate -> rebase -> route chain, and the summary tables."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from . import algorithms as alg
from .circuit import Circuit, GateCounts
from .errors import InvalidConfig
from .libraries import GateLibrary, rebase
from .noise import CountManifest, HardwareProfile, NoiseSpec, load_profile, predict_random, predict_systematic
from .router import CouplingGraph, RoutingReport, best_placement
from .simulator import ResultMatrix, distribution, result_matrix, run

# Table 1 columns: connectivity, its gate library and graph
COLUMNS = {
    "star": (GateLibrary.CLIFFORD_T, "star5c2"),
    "lnn": (GateLibrary.CLIFFORD_ZA, "line5"),
    "full": (GateLibrary.RXX, "full5"),
}
MACHINES = {"superconductor": "star", "ion": "full"}
TABLE1_ROWS = ("margolus", "toffoli", "bv", "hs", "qft3", "qft5")
TABLE2_ROWS = ("margolus", "toffoli", "bv", "hs")
SINGLE_SLACK = 4
MODEL_TOL = 0.03


@lru_cache(maxsize=None)
def reference() -> dict:
    """Transcribed published values (never computed)."""
    text = resources.files("qconnect.data").joinpath("reference.json").read_text()
    return json.loads(text)


# --------------------------------------------------------------------------
# algorithm specs


@dataclass(frozen=True)
class Algorithm:
    """``margolus``, ``toffoli``, ``bv:<bits>``, ``hs:<bits>`` or ``qft:<n>``.

    ``bv`` and ``hs`` without bits name the whole 16-member family.
    """

    kind: str
    arg: str | int | None = None
    measure_ancilla: bool = False

    @classmethod
    def parse(cls, text: str, measure_ancilla: bool = False) -> "Algorithm":
        t = text.strip().lower()
        if t in ("margolus", "toffoli"):
            return cls(t)
        m = re.fullmatch(r"(bv|hs)(?::([01]{4}))?", t)
        if m:
            return cls(m[1], m[2], measure_ancilla and m[1] == "bv")
        m = re.fullmatch(r"qft:?(\d+)", t)
        if m and 1 <= int(m[1]) <= 5:
            return cls("qft", int(m[1]))
        raise InvalidConfig(f"unknown algorithm {text!r}")

    @property
    def spec(self) -> str:
        if self.kind == "qft":
            return f"qft:{self.arg}"
        if self.arg is None:
            return self.kind
        return f"{self.kind}:{self.arg}"

    @property
    def is_family(self) -> bool:
        return self.kind in ("bv", "hs") and self.arg is None

    def instances(self) -> list["Algorithm"]:
        if not self.is_family:
            return [self]
        return [Algorithm(self.kind, s.bits, self.measure_ancilla) for s in alg.OracleString.all()]

    @property
    def restore(self) -> bool:
        # composite gates keep their input-to-output assignment
        return self.kind in ("margolus", "toffoli")

    def circuit(self, lib: GateLibrary | None = None) -> Circuit:
        if self.is_family:
            raise InvalidConfig(f"{self.spec} is a family; pick one oracle string")
        if self.kind == "margolus":
            return alg.margolus()
        if self.kind == "toffoli":
            return alg.toffoli(lib)
        if self.kind == "bv":
            return alg.bernstein_vazirani(self.arg, self.measure_ancilla)
        if self.kind == "hs":
            return alg.hidden_shift(self.arg)
        return alg.qft(self.arg)

    def outputs(self) -> list[int]:
        """Logical qubits read out, least-significant first."""
        if self.kind in ("margolus", "toffoli"):
            return [0, 1, 2]
        if self.kind == "bv":
            return [0, 1, 2, 3, 4] if self.measure_ancilla else [0, 1, 2, 3]
        if self.kind == "hs":
            return [0, 1, 2, 3]
        return list(alg.qft_output_map(self.arg))

    @property
    def n_inputs(self) -> int:
        """Basis inputs swept by a result matrix (oracle families use |0...0>)."""
        if self.kind in ("bv", "hs"):
            return 1
        return 1 << (3 if self.kind in ("margolus", "toffoli") else self.arg)


# --------------------------------------------------------------------------
# compilation


@dataclass(frozen=True)
class Compiled:
    algorithm: Algorithm
    lib: GateLibrary
    graph: CouplingGraph
    report: RoutingReport

    @property
    def circuit(self) -> Circuit:
        return self.report.routed

    @property
    def counts(self) -> GateCounts:
        return self.report.counts

    def measured(self) -> list[int]:
        return [self.report.final[q] for q in self.algorithm.outputs()]

    def physical_input(self, index: int) -> int:
        return sum(1 << self.report.placement[q] for q in range(len(self.report.placement)) if index >> q & 1)


def resolve_graph(graph: str | CouplingGraph) -> CouplingGraph:
    return graph if isinstance(graph, CouplingGraph) else CouplingGraph.parse(graph)


def compile_algorithm(algorithm: Algorithm | str, lib: GateLibrary | str, graph: str | CouplingGraph) -> Compiled:
    if isinstance(algorithm, str):
        algorithm = Algorithm.parse(algorithm)
    if isinstance(lib, str):
        lib = GateLibrary.parse(lib)
    g = resolve_graph(graph)
    return _compile(algorithm, lib, g)


@lru_cache(maxsize=None)
def _compile(algorithm: Algorithm, lib: GateLibrary, graph: CouplingGraph) -> Compiled:
    source = rebase(algorithm.circuit(lib), lib)
    _, report = best_placement(source, graph, lib=lib, restore=algorithm.restore)
    return Compiled(algorithm, lib, graph, report)


def count_range(algorithm: Algorithm, lib: GateLibrary, graph: str | CouplingGraph) -> tuple[tuple[int, int], tuple[int, int], list[GateCounts]]:
    """(single lo, hi), (two lo, hi) and the per-instance counts."""
    per = [compile_algorithm(a, lib, graph).counts for a in algorithm.instances()]
    singles = [c.single for c in per]
    twos = [c.two for c in per]
    return (min(singles), max(singles)), (min(twos), max(twos)), per


# --------------------------------------------------------------------------
# result matrices


def build_matrix(
    algorithm: Algorithm | str,
    lib: GateLibrary | str,
    graph: str | CouplingGraph,
    noise: NoiseSpec | None = None,
    shots: int | None = None,
    seed: int = 0,
) -> tuple[ResultMatrix, list[int]]:
    """Result matrix over basis inputs (or oracle strings) plus each row's ideal column."""
    if isinstance(algorithm, str):
        algorithm = Algorithm.parse(algorithm)
    if isinstance(lib, str):
        lib = GateLibrary.parse(lib)
    g = resolve_graph(graph)

    if algorithm.kind in ("bv", "hs"):
        members = algorithm.instances()
        rows = [(compile_algorithm(a, lib, g), 0) for a in members]
        labels = [a.arg for a in members]
    else:
        comp = compile_algorithm(algorithm, lib, g)
        n = algorithm.n_inputs.bit_length() - 1
        rows = [(comp, i) for i in range(algorithm.n_inputs)]
        labels = [alg.label(i, n) for i in range(algorithm.n_inputs)]

    def family(r: int):
        comp, i = rows[r]
        return comp.circuit, comp.physical_input(i), comp.measured()

    targets = []
    for r in range(len(rows)):
        c, start, measured = family(r)
        targets.append(int(np.argmax(distribution(run(c, start), measured))))
    m = result_matrix(family, range(len(rows)), noise=noise, shots=shots, seed=seed, row_labels=labels)
    first = rows[0][0]
    meta = dict(m.metadata)
    meta.update(
        {
            "algorithm": algorithm.spec,
            "lib": lib.value,
            "graph": g.label,
            "placement": list(first.report.placement.mapping),
            "final": list(first.report.final.mapping),
            "targets": targets,
        }
    )
    return ResultMatrix(m.row_labels, m.col_labels, m.probs, meta), targets


def success_probability(matrix: ResultMatrix, targets: list[int]) -> float:
    return float(np.mean(matrix.diagonal(targets)))


# --------------------------------------------------------------------------
# Table 1


@dataclass(frozen=True)
class Table1Cell:
    row: str
    column: str
    lib: str
    single: tuple[int, int] | None
    two: tuple[int, int] | None
    ref_single: tuple[int, int]
    ref_two: tuple[int, int]
    error: str | None
    two_match: bool
    single_ok: bool
    gated: bool
    single_gated: bool


def _row_algorithm(row: str) -> Algorithm:
    return {"qft3": Algorithm("qft", 3), "qft5": Algorithm("qft", 5)}.get(row) or Algorithm(row)


def _cell_lib(row: str, column: str) -> GateLibrary:
    # the five-qubit QFT on the star is only available with Z^a rotations
    if row == "qft5" and column == "star":
        return GateLibrary.CLIFFORD_ZA
    return COLUMNS[column][0]


def _within(value: tuple[int, int], ref: tuple[int, int]) -> bool:
    if ref[0] == ref[1]:
        return value == ref
    return ref[0] <= value[0] and value[1] <= ref[1]


def table1_cell(row: str, column: str) -> Table1Cell:
    ref = reference()["table1"]["rows"][row][column]
    ref_single, ref_two = tuple(ref[0]), tuple(ref[1])
    lib = _cell_lib(row, column)
    a = _row_algorithm(row)
    gated = not (row == "qft3" and column == "star")
    # BV under R/XX: single-qubit bookkeeping of the published range is unstated
    single_gated = gated and not (row == "bv" and column == "full")
    try:
        single, two, per = count_range(a, lib, COLUMNS[column][1])
    except ValueError as exc:
        return Table1Cell(row, column, lib.value, None, None, ref_single, ref_two,
                          type(exc).__name__, False, False, gated, single_gated)
    match = _within(two, ref_two)
    if row == "bv" and column in ("star", "full"):
        match = match and all(c.two == len(m.arg.replace("0", "")) for c, m in zip(per, a.instances()))
    single_ok = single[1] <= ref_single[1] + SINGLE_SLACK
    return Table1Cell(row, column, lib.value, single, two, ref_single, ref_two, None, match, single_ok, gated, single_gated)


def table1() -> list[Table1Cell]:
    return [table1_cell(r, c) for r in TABLE1_ROWS for c in COLUMNS]


def _span(v: tuple[int, int] | None) -> str:
    if v is None:
        return ""
    return str(v[0]) if v[0] == v[1] else f"{v[0]}-{v[1]}"


def table1_csv(cells: list[Table1Cell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["circuit", "connectivity", "library", "single", "two", "ref_single", "ref_two",
                "two_match", "single_within_slack", "gated", "error"])
    for c in cells:
        w.writerow([c.row, c.column, c.lib, _span(c.single), _span(c.two), _span(c.ref_single),
                    _span(c.ref_two), int(c.two_match), int(c.single_ok), int(c.gated), c.error or ""])
    return buf.getvalue()


# --------------------------------------------------------------------------
# Table 2


def readout_m(row: str, bv_m: int = 4) -> int:
    if row in ("margolus", "toffoli"):
        return 3
    return bv_m if row == "bv" else 4


@dataclass(frozen=True)
class Table2Row:
    row: str
    machine: str
    model: str
    lo: float
    hi: float
    published: float
    observed: float
    within: bool
    computed_lo: float
    computed_hi: float


def model_band(row: str, profile: HardwareProfile, column: str, model: str, bv_m: int = 4) -> tuple[float, float]:
    """Predictions at both ends of the published count ranges."""
    ref = reference()["table1"]["rows"][row][column]
    f = predict_random if model == "rand" else predict_systematic
    m = readout_m(row, bv_m)
    vals = [f(CountManifest(ref[0][k], ref[1][k], m), profile) for k in (0, 1)]
    return min(vals), max(vals)


def computed_band(row: str, profile: HardwareProfile, column: str, model: str, bv_m: int = 4) -> tuple[float, float]:
    """The same predictors fed with this package's compiled counts."""
    f = predict_random if model == "rand" else predict_systematic
    lib, graph = COLUMNS[column]
    _, _, per = count_range(_row_algorithm(row), lib, graph)
    m = readout_m(row, bv_m)
    vals = [f(CountManifest(c.single, c.two, m), profile) for c in per]
    return min(vals), max(vals)


def table2(bv_m: int = 4, tol: float = MODEL_TOL) -> list[Table2Row]:
    ref = reference()["table2"]["rows"]
    out = []
    for row in TABLE2_ROWS:
        for machine, column in MACHINES.items():
            prof = load_profile(machine)
            for model in ("rand", "sys"):
                lo, hi = model_band(row, prof, column, model, bv_m)
                clo, chi = computed_band(row, prof, column, model, bv_m)
                published = ref[row][machine][model]
                within = lo - tol <= published <= hi + tol
                out.append(Table2Row(row, machine, model, lo, hi, published, ref[row][machine]["obs"], within, clo, chi))
    return out


def table2_csv(rows: list[Table2Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "machine", "model", "predicted_lo", "predicted_hi", "ref_model",
                "ref_observed", "within_tolerance", "computed_counts_lo", "computed_counts_hi"])
    for r in rows:
        w.writerow([r.row, r.machine, r.model, f"{r.lo:.4f}", f"{r.hi:.4f}", f"{r.published:.3f}",
                    f"{r.observed:.3f}", int(r.within), f"{r.computed_lo:.4f}", f"{r.computed_hi:.4f}"])
    return buf.getvalue()
