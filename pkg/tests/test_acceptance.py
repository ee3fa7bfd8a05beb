"""One verdict line per acceptance criterion, at the stated tolerances.

Each test prints ``criterion N: PASS|FAIL  <detail>`` and then asserts the
same verdict, so a failing criterion fails its test.
"""

import os
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from conftest import VERDICTS
from randgen import random_circuit
from qconnect.algorithms import OracleString, bernstein_vazirani, hidden_shift, margolus, toffoli, walsh_spectrum
from qconnect.circuit import unitary
from qconnect.errors import NotExactlyExpressible
from qconnect.libraries import GateLibrary, optimize, rebase
from qconnect.noise import CountManifest, NoiseSpec, load_profile, predict_systematic
from qconnect.pipeline import build_matrix, compile_algorithm, success_probability, table1, table2
from qconnect.router import CouplingGraph, route, routing_error
from qconnect.simulator import distribution, run

ION = load_profile("ion")


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    VERDICTS.append(line)
    assert ok, line


def _span(v):
    return "-" if v is None else (str(v[0]) if v[0] == v[1] else f"{v[0]}-{v[1]}")


def test_criterion_1_two_qubit_counts():
    cells = [c for c in table1() if c.gated]
    bad = [c for c in cells if not c.two_match]
    detail = f"{len(cells) - len(bad)}/{len(cells)} gated cells match"
    if bad:
        detail += "; mismatches: " + ", ".join(
            f"{c.row}/{c.column} got {_span(c.two)} want {_span(c.ref_two)}" for c in bad)
    verdict(1, not bad, detail)


def test_criterion_2_single_qubit_counts():
    cells = [c for c in table1() if c.single_gated]
    bad = [c for c in cells if not c.single_ok]
    detail = f"{len(cells) - len(bad)}/{len(cells)} gated cells within published + 4"
    if bad:
        detail += "; over: " + ", ".join(f"{c.row}/{c.column} {_span(c.single)} vs {_span(c.ref_single)}" for c in bad)
    verdict(2, not bad, detail)


def test_criterion_3_model_columns():
    rows = table2()
    bad = [r for r in rows if not r.within]
    worst = max(max(r.lo - r.published, r.published - r.hi, 0.0) for r in rows)
    detail = f"{len(rows) - len(bad)}/{len(rows)} entries within +-3 points (worst excess {100 * worst:.2f})"
    if bad:
        detail += "; " + ", ".join(f"{r.row}/{r.machine}/{r.model}" for r in bad)
    verdict(3, not bad and len(rows) == 16, detail)


def test_criterion_4_noiseless_determinism():
    worst = 0.0
    for s in OracleString.all():
        worst = max(worst, 1 - distribution(run(bernstein_vazirani(s)), [0, 1, 2, 3])[s.index])
        worst = max(worst, 1 - distribution(run(hidden_shift(s)))[s.index])
    tables = True
    for i in range(8):
        j = i ^ 4 if (i & 3) == 3 else i
        for c in (toffoli(), toffoli(GateLibrary.RXX), margolus()):
            tables &= abs(distribution(run(c, i))[j] - 1) < 1e-9
    verdict(4, worst < 1e-9 and tables, f"max miss over 32 oracles {worst:.1e}; truth tables exact: {tables}")


def test_criterion_5_equivalence_suite():
    rng = np.random.default_rng(2024)
    graphs = [CouplingGraph.star(5, 2), CouplingGraph.line(5), CouplingGraph.complete(5)]
    worst, routings, skipped = 0.0, 0, 0
    for _ in range(1000):
        c = random_circuit(rng)
        for lib in GateLibrary:
            try:
                r = optimize(rebase(c, lib), lib)
            except NotExactlyExpressible:
                skipped += 1
                continue
            for g in graphs:
                placement = tuple(int(x) for x in rng.permutation(5))
                rep = route(r, g, placement, lib=lib)
                worst = max(worst, routing_error(c, rep))
                routings += 1
    verdict(5, worst <= 1e-9, f"{routings} routings, max-norm error {worst:.1e} ({skipped} inexpressible rebases skipped)")


def test_criterion_6_margolus_phase():
    d = unitary(margolus()) - unitary(toffoli())
    off = [tuple(int(x) for x in ij) for ij in np.argwhere(np.abs(d) > 1e-9)]
    ok = off == [(1, 1)] and abs(unitary(margolus())[1, 1] + 1) < 1e-9
    verdict(6, ok, f"differing entries {off}")


def test_criterion_7_bent_function():
    spec = walsh_spectrum()
    ok = all(isinstance(w, (int, np.integer)) and abs(w) == 4 for w in spec) and len(spec) == 16
    verdict(7, ok, f"spectrum {list(map(int, spec))}")


def test_criterion_8_monte_carlo_consistency():
    comp = compile_algorithm("margolus", "rxx", "full5")
    c = comp.counts
    predicted = predict_systematic(CountManifest(c.single, c.two, 3), ION)
    m, targets = build_matrix("margolus", "rxx", "full5", NoiseSpec.systematic(ION), shots=100_000, seed=0)
    mc = success_probability(m, targets)
    m_rel, _ = build_matrix("margolus", "rxx", "full5", NoiseSpec.systematic(ION, "relative"), shots=100_000, seed=0)
    mc_rel = success_probability(m_rel, targets)
    close = abs(mc - predicted) <= 0.05

    sweep = []
    for e in (0.01, 0.03, 0.05, 0.1):
        spec = NoiseSpec.random(replace(ION, eps2=e))
        mm, t = build_matrix("margolus", "rxx", "full5", spec, shots=20_000, seed=7)
        sweep.append(success_probability(mm, t))
    monotone = all(a > b for a, b in zip(sweep, sweep[1:]))
    detail = (f"sys MC {mc:.4f} vs predicted {predicted:.4f} (relative scaling would give {mc_rel:.4f}); "
              f"eps2 sweep {[round(s, 4) for s in sweep]}")
    verdict(8, close and monotone, detail)


def test_criterion_9_readout_pattern():
    m, targets = build_matrix("hs", "rxx", "full5", NoiseSpec.random(ION), shots=10_000, seed=42)
    fewer = more = 0.0
    for r, t in enumerate(targets):
        w = bin(t).count("1")
        for col, p in enumerate(m.probs[r]):
            if col != t:
                k = bin(col).count("1")
                fewer += p * (k < w)
                more += p * (k > w)
    verdict(9, fewer > more, f"mass on fewer 1s {fewer:.4f} vs more 1s {more:.4f}")


def test_criterion_10_reproducibility(tmp_path):
    env = dict(os.environ)
    src = str(Path(__file__).resolve().parents[1] / "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    outs = []
    for k in range(2):
        stem = tmp_path / "m"
        cmd = [sys.executable, "-m", "qconnect.cli", "matrix", "hs", "--profile", "ion", "--noise", "rand",
               "--shots", "5000", "--seed", "42", "--out", str(stem)]
        subprocess.run(cmd, check=True, env=env, cwd=tmp_path)
        outs.append(((tmp_path / "m.csv").read_bytes(), (tmp_path / "m.json").read_bytes()))
    verdict(10, outs[0] == outs[1], f"csv {len(outs[0][0])} bytes, json {len(outs[0][1])} bytes, identical: {outs[0] == outs[1]}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
