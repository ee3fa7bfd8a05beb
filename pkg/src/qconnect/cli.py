"""Command-line front end: compile, simulate, matrix, predict, table1, table2."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .circuit import dumps
from .errors import (
    InvalidConfig,
    NotExactlyExpressible,
    PlacementArityMismatch,
    QConnectError,
    SearchSpaceTooLarge,
    UnroutableGate,
    UnsupportedLibraryForSystematic,
)
from .libraries import GateLibrary
from .noise import PROFILE_NAMES, CountManifest, NoiseMode, NoiseSpec, load_profile, predict_random, predict_systematic
from .pipeline import (
    COLUMNS,
    MACHINES,
    Algorithm,
    build_matrix,
    compile_algorithm,
    success_probability,
    table1,
    table1_csv,
    table2,
    table2_csv,
)
from .router import CouplingGraph
from .simulator import atomic_write

EXIT_OK, EXIT_COMPILE, EXIT_CONFIG = 0, 2, 3
_COMPILE_ERRORS = (NotExactlyExpressible, UnroutableGate, PlacementArityMismatch, SearchSpaceTooLarge)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        # bad flags are configuration errors, not compile failures
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qconnect", description=__doc__)
    p.add_argument("--version", action="version", version=f"qconnect {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def target(sp):
        sp.add_argument("algorithm", help="margolus | toffoli | bv:<4 bits> | hs:<4 bits> | qft:<n>")
        sp.add_argument("--lib", choices=[lib.value for lib in GateLibrary])
        sp.add_argument("--graph", help="star5c2, line5, full5, ...")
        sp.add_argument("--profile", help="ion | superconductor | path to a profile JSON")
        sp.add_argument("--bv-readout-m", type=int, choices=(4, 5), default=4)

    def noisy(sp):
        sp.add_argument("--noise", choices=("none", "rand", "sys"), default="none")
        sp.add_argument("--scaling", choices=("absolute", "relative"), default="absolute")
        sp.add_argument("--shots", type=int)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("compile", help="rebase and route; write the circuit and a JSON report")
    target(sp)
    sp.add_argument("--out", help="circuit file; the report goes next to it as <out>.report.json")

    sp = sub.add_parser("simulate", help="output distribution for one basis input")
    target(sp)
    noisy(sp)
    sp.add_argument("--input", default=None, help="input bits, qubit 0 first (default all zeros)")
    sp.add_argument("--out", help="CSV path")

    sp = sub.add_parser("matrix", help="input/output result matrix as CSV and JSON")
    target(sp)
    noisy(sp)
    sp.add_argument("--out", required=True, help="output stem; writes <out>.csv and <out>.json")

    sp = sub.add_parser("predict", help="rand/sys success estimates from compiled gate counts")
    target(sp)
    sp.add_argument("--out", help="JSON path")

    sp = sub.add_parser("table1", help="gate-count grid against the published values")
    sp.add_argument("--out", help="CSV path")

    sp = sub.add_parser("table2", help="model predictions against the published values")
    sp.add_argument("--bv-readout-m", type=int, choices=(4, 5), default=4)
    sp.add_argument("--out", help="CSV path")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _profile(args):
    return load_profile(args.profile) if args.profile else None


def _target(args) -> tuple[Algorithm, GateLibrary, CouplingGraph]:
    algorithm = Algorithm.parse(args.algorithm, measure_ancilla=args.bv_readout_m == 5)
    lib, graph = args.lib, args.graph
    if lib is None or graph is None:
        machine = args.profile if args.profile in PROFILE_NAMES else None
        if machine is None:
            raise InvalidConfig("--lib and --graph are required unless --profile names a shipped machine")
        default_lib, default_graph = COLUMNS[MACHINES[machine]]
        lib = lib or default_lib.value
        graph = graph or default_graph
    lib = GateLibrary.parse(lib)
    g = CouplingGraph.parse(graph)
    if algorithm.kind == "qft" and lib is GateLibrary.CLIFFORD_T and algorithm.arg >= 3:
        raise NotExactlyExpressible(f"{algorithm.spec} needs controlled rotations finer than T")
    return algorithm, lib, g


def _noise(args, lib: GateLibrary) -> NoiseSpec | None:
    if args.noise == "none":
        return None
    prof = _profile(args)
    if prof is None:
        raise InvalidConfig("--noise needs --profile")
    if args.shots is not None and args.shots <= 0:
        raise InvalidConfig("--shots must be positive")
    if NoiseMode.parse(args.noise) is NoiseMode.SYSTEMATIC:
        if lib is not GateLibrary.RXX:
            raise InvalidConfig("systematic over-rotation needs the rxx library")
        return NoiseSpec.systematic(prof, args.scaling)
    return NoiseSpec.random(prof)


def _config_echo(args) -> dict:
    echo = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    echo["versions"] = {"qconnect": __version__, "numpy": np.__version__}
    return echo


def cmd_compile(args) -> int:
    algorithm, lib, g = _target(args)
    comp = compile_algorithm(algorithm, lib, g)
    rep = comp.report
    report = {
        "algorithm": algorithm.spec,
        "lib": lib.value,
        "graph": g.label,
        "counts": {"single": rep.counts.single, "two": rep.counts.two},
        "inserted_swaps": rep.inserted_swaps,
        "direction_fixes": rep.direction_fixes,
        "placement": list(rep.placement.mapping),
        "final": list(rep.final.mapping),
        "measured": comp.measured(),
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        atomic_write(args.out, dumps(comp.circuit))
        atomic_write(args.out + ".report.json", text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    algorithm, lib, g = _target(args)
    if algorithm.is_family:
        raise InvalidConfig("simulate needs a single oracle string")
    noise = _noise(args, lib)
    m, targets = build_matrix(algorithm, lib, g, noise=noise, shots=args.shots, seed=args.seed)
    row = 0
    if args.input is not None:
        bits = args.input
        if bits not in m.row_labels:
            raise InvalidConfig(f"input {bits!r} is not one of {m.row_labels}")
        row = m.row_labels.index(bits)
    lines = ["output,probability"]
    lines += [f"{lab},{p:.9f}" for lab, p in zip(m.col_labels, m.probs[row])]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_matrix(args) -> int:
    algorithm, lib, g = _target(args)
    noise = _noise(args, lib)
    m, targets = build_matrix(algorithm, lib, g, noise=noise, shots=args.shots, seed=args.seed)
    meta = dict(m.metadata)
    meta["config"] = _config_echo(args)
    meta["success_probability"] = round(success_probability(m, targets), 9)
    type(m)(m.row_labels, m.col_labels, m.probs, meta).save(args.out)
    return EXIT_OK


def cmd_predict(args) -> int:
    algorithm, lib, g = _target(args)
    prof = _profile(args)
    if prof is None:
        raise InvalidConfig("predict needs --profile")
    m = len(algorithm.outputs())
    results = []
    for a in algorithm.instances():
        c = compile_algorithm(a, lib, g).counts
        cm = CountManifest(c.single, c.two, m)
        results.append(
            {"algorithm": a.spec, "counts": asdict(cm), "rand": round(predict_random(cm, prof), 6),
             "sys": round(predict_systematic(cm, prof), 6)}
        )
    out = {"profile": prof.name, "lib": lib.value, "graph": g.label, "results": results}
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_table1(args) -> int:
    _emit(table1_csv(table1()), args.out)
    return EXIT_OK


def cmd_table2(args) -> int:
    _emit(table2_csv(table2(bv_m=args.bv_readout_m)), args.out)
    return EXIT_OK


COMMANDS = {
    "compile": cmd_compile,
    "simulate": cmd_simulate,
    "matrix": cmd_matrix,
    "predict": cmd_predict,
    "table1": cmd_table1,
    "table2": cmd_table2,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except _COMPILE_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    except (InvalidConfig, UnsupportedLibraryForSystematic) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QConnectError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
