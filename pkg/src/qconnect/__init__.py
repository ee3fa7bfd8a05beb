"""Compile, route, simulate and score small benchmark circuits on constrained qubit connectivity."""

__version__ = "0.1.0"

from .algorithms import bernstein_vazirani, hidden_shift, margolus, qft, toffoli
from .circuit import Circuit, Gate, GateCounts, gate_counts, unitary
from .libraries import GateLibrary, optimize, rebase
from .noise import CountManifest, HardwareProfile, NoiseSpec, load_profile, predict_random, predict_systematic
from .router import CouplingGraph, Placement, RoutingReport, best_placement, route
from .simulator import ResultMatrix, distribution, result_matrix, run

__all__ = [
    "Circuit", "CountManifest", "CouplingGraph", "Gate", "GateCounts", "GateLibrary", "HardwareProfile",
    "NoiseSpec", "Placement", "ResultMatrix", "RoutingReport", "bernstein_vazirani", "best_placement",
    "distribution", "gate_counts", "hidden_shift", "load_profile", "margolus", "optimize",
    "predict_random", "predict_systematic", "qft", "rebase", "result_matrix", "route", "run", "toffoli",
    "unitary",
]
