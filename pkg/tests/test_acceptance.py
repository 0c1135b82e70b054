"""Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.

Runs the installed command line in subprocesses, so timings include start-up.
One ``verify --seed 42`` run feeds criteria 4, 5, 7, 8 and 9; criterion 10
adds two more runs (a repeat and a thread-count change).

    pytest tests/test_acceptance.py -v      # summary lines at the end
    python tests/test_acceptance.py         # summary lines only
"""
import json
import os
import subprocess
import sys
import time

import pytest

RESULTS = {}
TOL = 1e-2


def cli(*argv, threads=None):
    env = dict(os.environ)
    if threads is not None:
        env["SINGTRACE_THREADS"] = str(threads)
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "singtrace.cli", *argv], capture_output=True, text=True,
                          env=env)
    return proc, time.perf_counter() - start


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    assert ok, f"{key}: {detail}"


def checks_by_name(report):
    return {c["name"]: c for c in report["results"]["checks"]}


@pytest.fixture(scope="module")
def harmonic_run():
    proc, secs = cli("analyze", "--family", "harmonic", "--horizon", "1e7")
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)["results"], secs


@pytest.fixture(scope="module")
def oscillator_runs():
    out = {}
    for h in ("1e6", "1e7"):
        proc, _ = cli("analyze", "--family", "log_oscillator(0.5)", "--horizon", h, "--no-cross-checks")
        assert proc.returncode == 0, proc.stderr
        out[h] = json.loads(proc.stdout)["results"]
    return out


@pytest.fixture(scope="module")
def verify_run():
    proc, secs = cli("verify", "--seed", "42", "--threads", "1")
    assert proc.returncode in (0, 1), proc.stderr
    return proc.stdout, json.loads(proc.stdout), secs


def test_ac01_harmonic_trace(harmonic_run):
    r, secs = harmonic_run
    raw, ext = r["trace_value"], r["trace_value_extrapolated"]
    ok = (r["measurable"]["cls"] != "undetermined" and raw is not None and abs(raw - 1) < 0.04
          and ext is not None and abs(ext - 1) < 1e-3 and secs < 30)
    record("AC1", ok, f"cls {r['measurable']['cls']}, trace {raw!r}, extrapolated {ext!r}, {secs:.1f} s")


def test_ac02_cross_checks(harmonic_run):
    r, secs = harmonic_run
    trace = r["trace_value"]
    zeta = r["zeta_residue"]["value"] if r["zeta_residue"] else None
    heat = r["heat_kernel"]["value"] if r["heat_kernel"] else None
    ok = (trace is not None and zeta is not None and heat is not None
          and abs(zeta - trace) <= 0.02 and abs(heat - trace) <= 0.02 and secs < 60)
    record("AC2", ok, f"trace {trace!r}, zeta {zeta!r}, heat {heat!r}, {secs:.1f} s")


def test_ac03_log_oscillator(oscillator_runs):
    r6, r7 = oscillator_runs["1e6"], oscillator_runs["1e7"]
    b6, b7 = r6["trace_band"], r7["trace_band"]
    width = b7["hi"] - b7["lo"]
    inside = b7["lo"] >= 0.5 - 0.05 and b7["hi"] <= 1.5 + 0.05
    drift = max(abs(b7["lo"] - b6["lo"]), abs(b7["hi"] - b6["hi"]))
    ok = (r7["trace_value"] is None and r7["measurable"]["cls"] == "undetermined" and width >= 0.5
          and inside and drift < 0.02 and abs(r7["riesz"] - 1.5) <= 0.05)
    record("AC3", ok, f"band [{b7['lo']:.4f}, {b7['hi']:.4f}] width {width:.4f}, edge drift {drift:.2e}, "
                      f"rho_1 {r7['riesz']:.4f}")


def test_ac04_tauberian_band_equivalence(verify_run):
    _, rep, secs = verify_run
    c = checks_by_name(rep)["tauberian_band_equivalence"]
    done = checks_by_name(rep)["corpus_completed"]
    size = rep["results"]["corpus_size"]
    ok = size >= 200 and done["violations"] == 0 and c["violations"] == 0 and secs < 300
    record("AC4", ok, f"corpus {size}, {c['cases']} certified members, {c['violations']} violations, "
                      f"verify {secs:.0f} s")


def test_ac05_m_k_identity(verify_run):
    c = checks_by_name(verify_run[1])["m_k_identity"]
    err = c["max_error"]
    ok = c["cases"] >= 1000 and c["violations"] == 0 and err is not None and err < 1e-9
    record("AC5", ok, f"{c['cases']} triples, max relative error {err!r}")


GROWTH_TABLE = [
    # (psi, kappa, expected restricted, dominated present, exponential present)
    ("log1p", "exp", "pass_strong", True, True),
    ("log1p", "expm1", "pass_strong", True, True),
    ("log1p", "identity", "pass_strong", True, False),
    ("log1p", "pow2t", "pass_strong", True, True),
    ("identity", "exp", "fail", False, True),
]


def test_ac06_growth_table():
    mismatches = []
    for psi, kappa, restricted, dom, expo in GROWTH_TABLE:
        proc, _ = cli("classify-kappa", "--kappa", kappa, "--psi", psi)
        v = json.loads(proc.stdout)["results"]
        got = (v["restricted"], v["dominated"] is not None, v["exponential"] is not None)
        if got != (restricted, dom, expo):
            mismatches.append(f"{psi}/{kappa}: {got}")
    record("AC6", not mismatches, f"{len(GROWTH_TABLE)} rows, mismatches {mismatches}")


def test_ac07_two_sided_bound(verify_run):
    c = checks_by_name(verify_run[1])["two_sided_trace_bound"]
    record("AC7", c["cases"] > 0 and c["violations"] == 0, f"{c['cases']} members, {c['violations']} violations")


def test_ac08_chain_and_tauberian(verify_run):
    by = checks_by_name(verify_run[1])
    names = ["chain_S_F_C", "tauberian_implication", "discrete_derivative_bound",
             "corpus_chain_and_tauberian", "corpus_discrete_bound"]
    bad = {n: by[n]["violations"] for n in names if by[n]["violations"]}
    cases = sum(by[n]["cases"] for n in names)
    record("AC8", not bad and cases > 0, f"{cases} cases over {len(names)} checks, violations {bad}")


def test_ac09_structural_maps(verify_run):
    by = checks_by_name(verify_run[1])
    names = ["p_isometry", "section_retraction", "translation_compatibility", "linearity_positivity"]
    short = [n for n in names if by[n]["cases"] < 10_000]
    bad = {n: by[n]["violations"] for n in names if by[n]["violations"]}
    worst = max((by[n]["max_error"] or 0.0) for n in names)
    record("AC9", not bad and not short, f"cases {[by[n]['cases'] for n in names]}, max error {worst!r}")


def test_ac10_verify_determinism(verify_run):
    first = verify_run[0]
    again, _ = cli("verify", "--seed", "42", "--threads", "1")
    wide, _ = cli("verify", "--seed", "42", "--threads", "8", threads=8)
    same = again.stdout == first and wide.stdout == first
    record("AC10", same and first, f"repeat identical {again.stdout == first}, "
                                   f"threads 8 identical {wide.stdout == first}, {len(first)} bytes")


def summary_lines():
    lines = []
    for i in range(1, 11):
        ok, detail = RESULTS.get(f"AC{i}", (False, "not run"))
        lines.append(f"AC{i:<2} {'PASS' if ok else 'FAIL'}  {detail}")
    return lines


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
