"""End-to-end acceptance checks.

Each test exercises one headline guarantee at its stated tolerance and
prints a single PASS/FAIL line (on the real stdout, so the ledger survives
pytest's capture) before asserting.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest

from qipa.circuits import build_ansatz, apply
from qipa.cli import dump_encoding
from qipa.encoding import (
    BiprimeSpec,
    EncodingScheme,
    LevelEncoding,
    TransmonSpec,
    biprime_decode,
    build_biprime,
    build_transmon,
    load_test_hamiltonian_15,
)
from qipa.mclachlan import (
    EvaluationMode,
    OracleSpec,
    assemble_A,
    assemble_C_exact,
    assemble_C_qite,
    energy,
)
from qipa.pauli import Observable, PauliWord, load_pauli_file
from qipa.solver import (
    ConvergenceRule,
    Method,
    SolverConfig,
    TerminalStatus,
    evolve,
    extract_solutions,
)

DATA = Path(__file__).resolve().parent.parent / "src" / "qipa" / "data"

from qipa.circuits import AnsatzCircuit, Gate

HZ = Observable.from_word(1.0, PauliWord.single(0, "Z"), 1)
RY1 = AnsatzCircuit(1, (Gate("RY", (0,), param_slot=0),), 1)


# One line per criterion; echoed by the repo conftest in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[acceptance] {status} {name}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line, file=sys.__stdout__, flush=True)
    assert ok, line


def perturbed_plus(circ, sigma=0.01, seed=7):
    theta0 = np.zeros(circ.n_params)
    theta0[: circ.n_qubits] = np.pi / 2
    return theta0 + np.random.default_rng(seed).normal(0.0, sigma, circ.n_params)


def steps_to_threshold(h, circ, theta0, method, dtau, tau_total, threshold):
    cfg = SolverConfig(
        dtau=dtau,
        tau_total=tau_total,
        energy_shift="auto",
        flow_scale="auto",
        convergence=ConvergenceRule(kind="energy_threshold", threshold=threshold),
    )
    trace = evolve(h, circ, theta0, cfg, method)
    return trace.steps_to_threshold(threshold), trace


# -- 1. golden encodings -----------------------------------------------------------


def test_golden_encodings():
    start = time.monotonic()
    mismatches = []
    for op, tag in [("N", "n"), ("cos", "cos"), ("sin", "sin")]:
        for scheme in ("binary", "gray"):
            text = dump_encoding(op, 16, scheme)
            golden = (DATA / f"table1_{tag}_{scheme}.txt").read_text()
            if text != golden:
                mismatches.append(f"{op}/{scheme}")
    elapsed = time.monotonic() - start
    report(
        "golden encodings (d=16, six operator/scheme pairs, byte-for-byte)",
        not mismatches and elapsed < 1.0,
        f"{elapsed:.2f}s" + (f"; mismatched: {mismatches}" if mismatches else ""),
    )


# -- 2. biprime oracle equivalence ---------------------------------------------------


def test_biprime_oracle_equivalence():
    start = time.monotonic()
    failures = []
    for n in (9, 15, 21, 25, 33, 35, 49, 55, 65, 77, 91):
        spec = BiprimeSpec(n)
        diag = build_biprime(spec).diagonal()
        found = {
            biprime_decode(spec, int(i)) for i in np.flatnonzero(np.abs(diag) < 1e-9)
        }
        limit = 2 ** (spec.L + 1)  # largest representable register value + 1
        expected = {
            (q, n // q)
            for q in range(1, limit, 2)
            if n % q == 0 and n // q < limit
        }
        if found != expected or not found:
            failures.append(f"N={n}: found {sorted(found)} expected {sorted(expected)}")
    h15 = build_biprime(BiprimeSpec(15)).simplify()
    coeffs = sorted(c.real for c, w in h15.terms if w.ops)
    published = sorted([48, 96, 84, 48, 34, 68, 32, 96, 68, 136, 64, 84, 32, 64, 16])
    const = dict((tuple(w.ops), c.real) for c, w in h15.terms).get((), None)
    if coeffs != published or const != 186.0:
        failures.append("H15 expansion coefficients differ from the published list")
    elapsed = time.monotonic() - start
    report(
        "biprime oracle equivalence (11 odd biprimes; H15 coefficients exact)",
        not failures and elapsed < 10.0,
        f"{elapsed:.2f}s" + ("; " + "; ".join(failures) if failures else ""),
    )


# -- 3. McLachlan correctness --------------------------------------------------------


def test_mclachlan_correctness_random_instances():
    start = time.monotonic()
    rng = np.random.default_rng(2024)
    worst_a = worst_c = worst_h = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        circ = build_ansatz("Y" if rng.random() < 0.5 else "YZ", n, int(rng.integers(1, 3)))
        theta = rng.normal(0, 1.0, circ.n_params)
        letters = "IXYZ"
        terms = []
        for _ in range(4):
            ops = tuple(
                (q, letters[i])
                for q, i in enumerate(rng.integers(0, 4, n))
                if letters[i] != "I"
            )
            terms.append((float(rng.normal()), PauliWord(ops)))
        h = Observable(terms, n).simplify()

        eps = 1e-5
        d = []
        for k in range(circ.n_params):
            e = np.zeros(circ.n_params)
            e[k] = eps
            d.append((apply(circ, theta + e) - apply(circ, theta - e)) / (2 * eps))
        d = np.array(d)
        a = assemble_A(circ, theta)
        worst_a = max(worst_a, float(np.max(np.abs(a - np.real(d.conj() @ d.T)))))

        grad = np.zeros(circ.n_params)
        for k in range(circ.n_params):
            e = np.zeros(circ.n_params)
            e[k] = eps
            grad[k] = (energy(circ, theta + e, h) - energy(circ, theta - e, h)) / (
                2 * eps
            )
        c = assemble_C_qite(circ, theta, h)
        worst_c = max(worst_c, float(np.max(np.abs(c + 0.5 * grad))))

        mode = EvaluationMode.hadamard_exact()
        worst_h = max(
            worst_h,
            float(np.max(np.abs(assemble_A(circ, theta, mode) - a))),
            float(np.max(np.abs(assemble_C_qite(circ, theta, h, mode) - c))),
        )
    elapsed = time.monotonic() - start
    report(
        "McLachlan correctness (50 random instances: A vs FD Gram 1e-7, "
        "C vs -1/2 FD gradient 1e-7, Hadamard vs direct 1e-10)",
        worst_a < 1e-7 and worst_c < 1e-7 and worst_h < 1e-10 and elapsed < 60.0,
        f"max|dA|={worst_a:.2e} max|dC|={worst_c:.2e} max|dHad|={worst_h:.2e} {elapsed:.1f}s",
    )


# -- 4. analytic flow -----------------------------------------------------------------


def test_analytic_flow():
    worst = 0.0
    for theta in (0.2, 0.7, 1.3, 2.4):
        th = np.array([theta])
        a = assemble_A(RY1, th)[0, 0]
        c_qite = assemble_C_qite(RY1, th, HZ)[0]
        worst = max(worst, abs(c_qite / a - 2.0 * np.sin(theta)))
        for tau in (0.0, 0.5, 1.5):
            c_qipa = assemble_C_exact(RY1, th, HZ, tau, OracleSpec.double_exponential())[0]
            worst = max(worst, abs(c_qipa / a - 2.0 * np.sin(theta) * np.cosh(tau)))
    report(
        "analytic flow (theta_dot = 2 sin(theta) for QITE, "
        "2 sin(theta) cosh(tau) for QIPA, within 1e-8)",
        worst < 1e-8,
        f"max deviation {worst:.2e}",
    )


# -- 5. exact-propagator fidelity ------------------------------------------------------


def test_exact_propagator_fidelity():
    start = time.monotonic()
    rng = np.random.default_rng(42)
    letters = "IXYZ"
    min_fid = 1.0
    for _ in range(2):
        terms = []
        for i0 in range(4):
            for i1 in range(4):
                ops = tuple(
                    (q, l) for q, l in [(0, letters[i0]), (1, letters[i1])] if l != "I"
                )
                if ops:
                    terms.append((float(rng.normal(0, 0.5)), PauliWord(ops)))
        h = Observable(terms, 2).simplify()
        circ = build_ansatz("YZ", 2, 3)
        theta0 = rng.normal(0, 0.3, circ.n_params)
        for method in (Method.QITE, Method.QIPA_EXACT):
            cfg = SolverConfig(
                dtau=0.005,
                tau_total=2.0,
                track_fidelity=True,
                energy_shift="auto",
                flow_scale="auto",
                convergence=ConvergenceRule(eps_step=0.0),
            )
            trace = evolve(h, circ, theta0, cfg, method)
            fids = [r.fidelity for r in trace.records if r.fidelity is not None]
            min_fid = min(min_fid, min(fids))
    elapsed = time.monotonic() - start
    report(
        "exact-propagator fidelity (random 2-qubit H, n=1 and n=2, "
        "dtau=0.005, fidelity >= 0.999 at every step)",
        min_fid >= 0.999 and elapsed < 120.0,
        f"min fidelity {min_fid:.6f}, {elapsed:.0f}s",
    )


# -- 6. comparative speedup ------------------------------------------------------------


def test_comparative_speedup():
    start = time.monotonic()
    problems = []
    problems.append(("1-qubit Z", HZ, RY1, np.array([0.1]), 0.01, 30.0))
    h3 = load_test_hamiltonian_15()
    c3 = build_ansatz("Y", 3, 2)
    problems.append(("3-qubit factor-test", h3, c3, perturbed_plus(c3), 0.05, 200.0))
    h4 = build_biprime(BiprimeSpec(15))
    c4 = build_ansatz("Y", 4, 4)
    problems.append(("4-qubit H15", h4, c4, perturbed_plus(c4), 0.05, 200.0))

    rows = []
    ok = True
    best_reduction = 0.0
    for name, h, circ, theta0, dtau, tau_total in problems:
        evals = np.linalg.eigvalsh(h.to_dense())
        threshold = float(evals[0] + 1e-3 * (evals[-1] - evals[0]))
        s_qipa, _ = steps_to_threshold(h, circ, theta0, Method.QIPA_EXACT, dtau, tau_total, threshold)
        s_qite, _ = steps_to_threshold(h, circ, theta0, Method.QITE, dtau, tau_total, threshold)
        reached = s_qipa is not None and s_qite is not None
        ok = ok and reached and s_qipa <= s_qite
        if reached and s_qite > 0:
            best_reduction = max(best_reduction, 1.0 - s_qipa / s_qite)
        rows.append(f"{name}: QIPA {s_qipa} vs QITE {s_qite}")
    ok = ok and best_reduction >= 0.20
    elapsed = time.monotonic() - start
    report(
        "comparative speedup (steps to 1e-3-of-range threshold, equal dtau; "
        "QIPA <= QITE on all three problems, >=20% reduction somewhere)",
        ok and elapsed < 300.0,
        "; ".join(rows) + f"; best reduction {best_reduction:.0%}; {elapsed:.0f}s",
    )


# -- 7. twin-solution recovery ---------------------------------------------------------


def test_twin_solution_recovery():
    start = time.monotonic()
    spec = BiprimeSpec(15)
    h = build_biprime(spec)
    circ = build_ansatz("Y", 4, 4)
    theta0 = perturbed_plus(circ)

    def run(dtau, tau_total):
        cfg = SolverConfig(
            dtau=dtau,
            tau_total=tau_total,
            energy_shift="auto",
            flow_scale="auto",
            convergence=ConvergenceRule(eps_step=1e-12),
        )
        trace = evolve(h, circ, theta0, cfg, Method.QIPA_EXACT)
        state = apply(circ, trace.final_theta)
        return extract_solutions(state, 2, decoder=lambda i: biprime_decode(spec, i))

    small = run(0.01, 14.0)
    labels_small = {lab for _, _, lab in small}
    mags = [m for _, m, _ in small]
    rel = abs(mags[0] - mags[1]) / max(mags)

    large = run(0.35, 12.0)
    labels_large = {lab for _, _, lab in large}
    mags_l = [m for _, m, _ in large]
    rel_l = abs(mags_l[0] - mags_l[1]) / max(mags_l)

    ok = (
        labels_small == {(3, 5), (5, 3)}
        and rel < 0.05
        and labels_large == {(3, 5), (5, 3)}
        and rel_l > 0.05
    )
    elapsed = time.monotonic() - start
    report(
        "twin-solution recovery (top-2 decode to (3,5)/(5,3); magnitudes within "
        "5% at small dtau, unequal at large dtau)",
        ok and elapsed < 120.0,
        f"small-dtau amps {mags[0]:.4f}/{mags[1]:.4f} (rel {rel:.3f}), "
        f"large-dtau rel {rel_l:.3f}; {elapsed:.0f}s",
    )


# -- 8. transmon ground state -----------------------------------------------------------


def test_transmon_ground_state():
    start = time.monotonic()
    rows = []
    ok = True
    for f in (0.25, 0.0):
        for d in (4, 16):
            spec = TransmonSpec(EC=1.0, EJ=1.0, f=f, d=d)
            enc = LevelEncoding(EncodingScheme.GRAY, d)
            h = build_transmon(spec, enc)
            ground = float(np.linalg.eigvalsh(h.to_dense())[0])
            tol = 1e-3 * max(spec.EC, spec.EJ)
            circ = build_ansatz("Y", h.n_qubits, 4 if d == 16 else 2)
            theta0 = perturbed_plus(circ)
            dtau = 0.1 if d == 16 else 0.05
            s_qipa, t_qipa = steps_to_threshold(
                h, circ, theta0, Method.QIPA_EXACT, dtau, 400.0, ground + tol
            )
            s_qite, t_qite = steps_to_threshold(
                h, circ, theta0, Method.QITE, dtau, 400.0, ground + tol
            )
            good = (
                s_qipa is not None
                and s_qite is not None
                and s_qipa <= s_qite
                and abs(t_qipa.final_energy - ground) <= tol
                and abs(t_qite.final_energy - ground) <= tol
            )
            ok = ok and good
            rows.append(f"f={f} d={d}: QIPA {s_qipa} vs QITE {s_qite} steps")
    elapsed = time.monotonic() - start
    report(
        "transmon ground state (f in {0.25, 0}, d in {4, 16}, Gray; converged E1 "
        "within 1e-3*max(EC,EJ) of dense ground; QIPA steps <= QITE)",
        ok and elapsed < 300.0,
        "; ".join(rows) + f"; {elapsed:.0f}s",
    )


# -- 9. QITE monotone descent -----------------------------------------------------------


def shipped_problems():
    yield "1-qubit Z", HZ, RY1, np.array([0.7])
    h3 = load_test_hamiltonian_15()
    c3 = build_ansatz("Y", 3, 2)
    yield "3-qubit factor-test", h3, c3, perturbed_plus(c3)
    h4 = build_biprime(BiprimeSpec(15))
    c4 = build_ansatz("Y", 4, 4)
    yield "4-qubit H15", h4, c4, perturbed_plus(c4)
    for f in (0.25, 0.0):
        for d in (4, 16):
            spec = TransmonSpec(EC=1.0, EJ=1.0, f=f, d=d)
            h = build_transmon(spec, LevelEncoding(EncodingScheme.GRAY, d))
            circ = build_ansatz("Y", h.n_qubits, 4 if d == 16 else 2)
            yield f"transmon f={f} d={d}", h, circ, perturbed_plus(circ)
    h2 = load_pauli_file(DATA / "h2_r0.74.txt")
    c2 = build_ansatz("Y", 4, 3)
    yield "H2 r=0.74", h2, c2, perturbed_plus(c2)


def test_qite_monotone_descent():
    start = time.monotonic()
    violations = []
    for name, h, circ, theta0 in shipped_problems():
        cfg = SolverConfig(
            dtau=0.01,
            tau_total=3.0,
            cg_tol=1e-10,
            regularization=1e-6,  # damp near-null A directions; keeps the flow a descent
            energy_shift="auto",
            flow_scale="auto",
            convergence=ConvergenceRule(eps_step=0.0),
        )
        trace = evolve(h, circ, theta0, cfg, Method.QITE)
        increases = np.diff(trace.energies())
        worst = float(increases.max()) if increases.size else 0.0
        if worst > 1e-9:
            violations.append(f"{name}: +{worst:.2e}")
    elapsed = time.monotonic() - start
    report(
        "QITE monotone descent (E1 non-increasing within 1e-9/step at dtau=0.01 "
        "on every shipped problem)",
        not violations,
        ("; ".join(violations) if violations else "8 problems clean") + f"; {elapsed:.0f}s",
    )
