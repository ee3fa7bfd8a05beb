"""Analytic success predictors and a Monte Carlo noise model.

Two predictors estimate the chance that one run returns the ideal output:
per-gate survival (1 - eps) compounded over every gate (coherent errors add
up) or over the square root of the gate count (random-walk accumulation),
times a per-qubit readout survival for each measured qubit.

The Monte Carlo side runs the actual circuit with either random Pauli
faults or coherent over-rotations, then pushes the outcome distribution
through a readout confusion channel with state-dependent flips and
bright-to-dark crosstalk between neighbouring detector channels.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np

from .circuit import CNOT, Circuit, Gate, H, Raxis, S, X, XX, Y, Z, gate_matrix, unitary
from .errors import InvalidConfig, UnsupportedLibraryForSystematic
from .simulator import StateVector, distribution, evolve, row_rng

DEFAULT_SHOTS = 10_000
PROFILE_NAMES = ("ion", "superconductor")

# gates whose angle is the physical rotation that gets over-driven, with the
# parameter index and the angle unit (za counts half-turns)
SCALABLE = {"raxis": (1, 1.0), "rz": (0, 1.0), "xx": (0, 1.0), "za": (0, math.pi)}


@dataclass(frozen=True)
class HardwareProfile:
    name: str
    eps1: float
    eps2: float
    readout_err0: float
    readout_err1: float
    crosstalk_adjacent: float
    t_single: float
    t_two: float

    def __post_init__(self) -> None:
        for key in ("eps1", "eps2", "readout_err0", "readout_err1", "crosstalk_adjacent"):
            v = getattr(self, key)
            if not isinstance(v, (int, float)) or not 0.0 <= v < 1.0:
                raise InvalidConfig(f"{key} must be a probability in [0, 1), got {v!r}")
        for key in ("t_single", "t_two"):
            v = getattr(self, key)
            if not isinstance(v, (int, float)) or v <= 0:
                raise InvalidConfig(f"{key} must be a positive duration, got {v!r}")

    @property
    def eps_m(self) -> float:
        """Per-qubit readout error used by the predictors: mean of the two flip rates."""
        return 0.5 * (self.readout_err0 + self.readout_err1)

    @classmethod
    def from_dict(cls, obj: dict) -> "HardwareProfile":
        names = {f for f in cls.__dataclass_fields__}
        missing = names - obj.keys()
        extra = obj.keys() - names
        if missing or extra:
            raise InvalidConfig(f"profile fields: missing {sorted(missing)}, unknown {sorted(extra)}")
        return cls(**obj)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def load_profile(name_or_path: str | os.PathLike) -> HardwareProfile:
    """A shipped profile by name (``ion``, ``superconductor``) or a JSON file path."""
    key = os.fspath(name_or_path)
    try:
        if key in PROFILE_NAMES:
            text = resources.files("qconnect.data.profiles").joinpath(f"{key}.json").read_text()
        else:
            with open(key) as fh:
                text = fh.read()
        obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot load profile {key!r}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidConfig(f"profile {key!r} is not a JSON object")
    return HardwareProfile.from_dict(obj)


# --------------------------------------------------------------------------
# analytic predictors


@dataclass(frozen=True)
class CountManifest:
    n1: float
    n2: float
    M: int

    def __post_init__(self) -> None:
        if self.n1 < 0 or self.n2 < 0 or self.M < 0:
            raise ValueError("gate and readout counts must be non-negative")


def predict_systematic(counts: CountManifest, p: HardwareProfile) -> float:
    return (1 - p.eps1) ** counts.n1 * (1 - p.eps2) ** counts.n2 * (1 - p.eps_m) ** counts.M


def predict_random(counts: CountManifest, p: HardwareProfile) -> float:
    return (
        (1 - p.eps1) ** math.sqrt(counts.n1)
        * (1 - p.eps2) ** math.sqrt(counts.n2)
        * (1 - p.eps_m) ** counts.M
    )


# --------------------------------------------------------------------------
# readout


def readout_confusion(p: HardwareProfile, channels: Sequence[int]) -> np.ndarray:
    """Column-stochastic matrix C[y, x] = P(read y | true x).

    ``channels`` are the physical positions of the measured qubits; bit j of
    x and y belongs to channels[j]. Each qubit flips independently (0->1 with
    readout_err0, 1->0 with readout_err1). Then every truly bright qubit
    turns each neighbouring channel (physical distance 1) that reads 0 into a
    1 with probability crosstalk_adjacent.
    """
    channels = list(channels)
    m = len(channels)
    neighbours = [[k for k in range(m) if abs(channels[k] - channels[j]) == 1] for j in range(m)]
    dim = 1 << m
    c = np.empty((dim, dim))
    for x in range(dim):
        p1 = np.empty(m)
        for j in range(m):
            bright = sum(x >> k & 1 for k in neighbours[j])
            lit = 1 - (1 - p.crosstalk_adjacent) ** bright
            if x >> j & 1:
                p1[j] = (1 - p.readout_err1) + p.readout_err1 * lit
            else:
                p1[j] = p.readout_err0 + (1 - p.readout_err0) * lit
        for y in range(dim):
            c[y, x] = np.prod([p1[j] if y >> j & 1 else 1 - p1[j] for j in range(m)])
    return c


def average_readout_fidelity(p: HardwareProfile, n: int = 5) -> float:
    """Mean over all n-qubit basis states of the chance to read them correctly."""
    return float(np.mean(np.diag(readout_confusion(p, range(n)))))


def calibrate_crosstalk(p: HardwareProfile, target: float, n: int = 5, tol: float = 1e-12) -> float:
    """Crosstalk probability giving the requested n-qubit average readout fidelity."""
    lo, hi = 0.0, 0.5
    if average_readout_fidelity(replace(p, crosstalk_adjacent=lo), n) < target:
        raise ValueError("target fidelity is above the crosstalk-free value")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if average_readout_fidelity(replace(p, crosstalk_adjacent=mid), n) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# over-rotation calibration


@lru_cache(maxsize=None)
def stabilizer_states(n: int) -> tuple[np.ndarray, ...]:
    """All n-qubit stabilizer states (up to phase); a 3-design for any n."""
    gens = [H(q) for q in range(n)] + [S(q) for q in range(n)]
    gens += [CNOT(a, b) for a in range(n) for b in range(n) if a != b]
    mats = [_embed(g, n) for g in gens]

    def key(v):
        k = int(np.argmax(np.abs(v) > 1e-9))
        w = v * abs(v[k]) / v[k]
        return tuple(np.round(w, 8).view(float))

    start = np.zeros(1 << n, dtype=complex)
    start[0] = 1.0
    seen = {key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for m in mats:
                w = m @ v
                k = key(w)
                if k not in seen:
                    seen[k] = w
                    nxt.append(w)
        frontier = nxt
    return tuple(seen[k] for k in sorted(seen))


def _embed(g: Gate, n: int) -> np.ndarray:
    return unitary(Circuit(n, [g]))


def average_gate_fidelity(ideal: np.ndarray, actual: np.ndarray) -> float:
    """Mean of |<psi|U^dag V|psi>|^2 over the stabilizer 2-design."""
    n = int(round(math.log2(ideal.shape[0])))
    w = ideal.conj().T @ actual
    return float(np.mean([abs(np.vdot(s, w @ s)) ** 2 for s in stabilizer_states(n)]))


# reference pulses: a pi/2 single-qubit rotation and a fully entangling XX
REFERENCE_GATES = {1: Raxis(0, 0.0, math.pi / 2), 2: XX(math.pi / 4, 0, 1)}
REFERENCE_ANGLES = {1: math.pi / 2, 2: math.pi / 4}


def overrotated(g: Gate, fraction: float) -> Gate:
    """Scale the rotation angle of ``g`` by (1 + fraction)."""
    i, _ = _angle_slot(g)
    params = list(g.params)
    params[i] *= 1 + fraction
    return Gate(g.name, g.qubits, tuple(params))


def overdriven(g: Gate, delta: float) -> Gate:
    """Lengthen the rotation of ``g`` by ``delta`` radians, away from zero."""
    i, unit = _angle_slot(g)
    params = list(g.params)
    params[i] += math.copysign(delta / unit, params[i])
    return Gate(g.name, g.qubits, tuple(params))


def _angle_slot(g: Gate) -> tuple[int, float]:
    if g.name not in SCALABLE:
        raise UnsupportedLibraryForSystematic(f"gate {g.name!r} has no rotation angle to over-drive")
    return SCALABLE[g.name]


def overrotation_fraction(eps: float, arity: int) -> float:
    """Fraction f such that the over-driven reference gate has infidelity ``eps``."""
    if eps == 0:
        return 0.0
    g = REFERENCE_GATES[arity]
    ideal = gate_matrix(g)

    def infidelity(f: float) -> float:
        return 1 - average_gate_fidelity(ideal, gate_matrix(overrotated(g, f)))

    lo, hi = 0.0, 1.0
    if infidelity(hi) < eps:
        raise ValueError(f"gate error {eps} is out of reach of over-rotation")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if infidelity(mid) < eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# Monte Carlo


class NoiseMode(enum.Enum):
    RANDOM = "rand"
    SYSTEMATIC = "sys"

    @classmethod
    def parse(cls, text: str) -> "NoiseMode":
        for m in cls:
            if text.lower() in (m.value, m.name.lower()):
                return m
        raise InvalidConfig(f"unknown noise mode {text!r}")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise mode, profile and over-rotation fractions (single-, two-qubit).

    The fractions are calibrated on the reference pulses. ``scaling`` decides
    how they reach other gates: "absolute" adds the reference pulse's excess
    angle to every rotation, so each gate of a class has infidelity eps;
    "relative" multiplies every angle by (1 + fraction), so small rotations
    err less and large ones more.
    """

    mode: NoiseMode
    profile: HardwareProfile
    overrotation_fraction: tuple[float, float] = (0.0, 0.0)
    scaling: str = "absolute"

    def __post_init__(self) -> None:
        if self.scaling not in ("absolute", "relative"):
            raise InvalidConfig(f"unknown over-rotation scaling {self.scaling!r}")

    @classmethod
    def random(cls, profile: HardwareProfile) -> "NoiseSpec":
        return cls(NoiseMode.RANDOM, profile)

    @classmethod
    def systematic(cls, profile: HardwareProfile, scaling: str = "absolute") -> "NoiseSpec":
        f = (overrotation_fraction(profile.eps1, 1), overrotation_fraction(profile.eps2, 2))
        return cls(NoiseMode.SYSTEMATIC, profile, f, scaling)

    def distort(self, g: Gate) -> Gate:
        f = self.overrotation_fraction[g.arity - 1]
        if self.scaling == "relative":
            return overrotated(g, f)
        return overdriven(g, f * REFERENCE_ANGLES[g.arity])

    def describe(self) -> dict:
        return {
            "mode": self.mode.value,
            "profile": asdict(self.profile),
            "overrotation_fraction": list(self.overrotation_fraction),
            "scaling": self.scaling,
        }


_PAULI1 = (X, Y, Z)


def _pauli_gates(code: int, qubits: tuple[int, ...]) -> list[Gate]:
    """Non-identity Pauli number ``code`` (1-based, base 4 digits) on ``qubits``."""
    out = []
    for q in qubits:
        d = code % 4
        code //= 4
        if d:
            out.append(_PAULI1[d - 1](q))
    return out


def monte_carlo(
    circuit: Circuit,
    spec: NoiseSpec,
    shots: int | None,
    seed: int,
    input: int = 0,
    measured: Sequence[int] | None = None,
    row: int = 0,
) -> np.ndarray:
    """Noisy outcome frequencies over ``measured`` for one basis input.

    Random mode: after every gate, with the class error rate, apply a
    uniformly drawn non-identity Pauli to the qubits it touched. Shots with
    the same fault pattern share one simulation. Systematic mode: every
    rotation is over-driven (see NoiseSpec.scaling); the result is
    deterministic before readout, so ``shots=None`` returns the exact
    distribution. Readout confusion is applied in both modes.
    """
    n = circuit.n_qubits
    measured = list(range(n)) if measured is None else list(measured)
    prof = spec.profile
    conf = readout_confusion(prof, measured)
    rng = row_rng(seed, row)
    start = StateVector.basis(n, input)

    if spec.mode is NoiseMode.SYSTEMATIC:
        gates = [spec.distort(g) for g in circuit.gates]
        p = conf @ distribution(evolve(start, gates), measured)
        if shots is None:
            return p
        return _multinomial(rng, shots, p) / shots

    shots = DEFAULT_SHOTS if shots is None else shots
    gates = circuit.gates
    k = len(gates)
    eps = np.array([prof.eps1 if g.arity == 1 else prof.eps2 for g in gates])
    npauli = np.array([4 ** g.arity - 1 for g in gates])
    fail = rng.random((shots, k)) < eps
    codes = (rng.random((shots, k)) * npauli).astype(int) + 1
    patterns: dict[tuple, int] = {}
    for s in range(shots):
        idx = np.flatnonzero(fail[s])
        key = tuple(zip(idx.tolist(), codes[s, idx].tolist()))
        patterns[key] = patterns.get(key, 0) + 1

    counts = np.zeros(1 << len(measured))
    for key in sorted(patterns):
        faults = dict(key)
        noisy: list[Gate] = []
        for i, g in enumerate(gates):
            noisy.append(g)
            if i in faults:
                noisy += _pauli_gates(faults[i], g.qubits)
        p = conf @ distribution(evolve(start, noisy), measured)
        counts += _multinomial(rng, patterns[key], p)
    return counts / shots


def _multinomial(rng: np.random.Generator, n: int, p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    return rng.multinomial(n, p / p.sum()).astype(float)
