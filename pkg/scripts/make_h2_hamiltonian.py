#!/usr/bin/env python3
"""Build the minimal-basis H2 qubit Hamiltonian from first principles.

Computes STO-3G one- and two-electron integrals over 1s Gaussians
analytically, runs restricted Hartree-Fock, transforms to the molecular
spin-orbital basis, and maps to qubits with the Jordan-Wigner transform.
Writes both the fermionic integral file and the Pauli text file shipped
with the package.

Usage: python3 scripts/make_h2_hamiltonian.py [--bond 0.74] [--outdir src/qipa/data]
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np
from scipy.special import erf

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qipa.encoding import FermionOperator, jordan_wigner
from qipa.pauli import format_pauli_text

ANGSTROM_TO_BOHR = 1.8897259886

# STO-3G contraction for hydrogen 1s (exponents already scaled by zeta=1.24)
STO3G_ALPHA = np.array([3.42525091, 0.62391373, 0.16885540])
STO3G_COEF = np.array([0.15432897, 0.53532814, 0.44463454])


def _norm(alpha: float) -> float:
    return (2.0 * alpha / math.pi) ** 0.75


def boys0(t: float) -> float:
    if t < 1e-12:
        return 1.0 - t / 3.0
    return 0.5 * math.sqrt(math.pi / t) * erf(math.sqrt(t))


def build_basis(centers):
    """One contracted s function per center: list of (alphas, coeffs, R)."""
    return [(STO3G_ALPHA, STO3G_COEF * _norm0(), np.asarray(r, float)) for r in centers]


def _norm0():
    return np.array([_norm(a) for a in STO3G_ALPHA])


def overlap_prim(a, ra, b, rb):
    p = a + b
    ab = np.dot(ra - rb, ra - rb)
    return (math.pi / p) ** 1.5 * math.exp(-a * b / p * ab)


def kinetic_prim(a, ra, b, rb):
    p = a + b
    mu = a * b / p
    ab = np.dot(ra - rb, ra - rb)
    return mu * (3.0 - 2.0 * mu * ab) * overlap_prim(a, ra, b, rb)


def nuclear_prim(a, ra, b, rb, rc):
    p = a + b
    ab = np.dot(ra - rb, ra - rb)
    rp = (a * ra + b * rb) / p
    pc = np.dot(rp - rc, rp - rc)
    pref = -2.0 * math.pi / p * math.exp(-a * b / p * ab)
    return pref * boys0(p * pc)


def eri_prim(a, ra, b, rb, c, rc, d, rd):
    p, q = a + b, c + d
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    ab = np.dot(ra - rb, ra - rb)
    cd = np.dot(rc - rd, rc - rd)
    pq = np.dot(rp - rq, rp - rq)
    pref = 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))
    return pref * math.exp(-a * b / p * ab - c * d / q * cd) * boys0(p * q / (p + q) * pq)


def contract2(f, bas_i, bas_j, *extra):
    ai, ci, ri = bas_i
    aj, cj, rj = bas_j
    total = 0.0
    for a, ca in zip(ai, ci):
        for b, cb in zip(aj, cj):
            total += ca * cb * f(a, ri, b, rj, *extra)
    return total


def contract4(bas_i, bas_j, bas_k, bas_l):
    ai, ci, ri = bas_i
    aj, cj, rj = bas_j
    ak, ck, rk = bas_k
    al, cl, rl = bas_l
    total = 0.0
    for a, ca in zip(ai, ci):
        for b, cb in zip(aj, cj):
            for c, cc in zip(ak, ck):
                for d, cd in zip(al, cl):
                    total += ca * cb * cc * cd * eri_prim(a, ri, b, rj, c, rk, d, rl)
    return total


def integrals(bond_angstrom: float):
    r = bond_angstrom * ANGSTROM_TO_BOHR
    centers = [np.zeros(3), np.array([0.0, 0.0, r])]
    basis = build_basis(centers)
    n = len(basis)
    S = np.array([[contract2(overlap_prim, basis[i], basis[j]) for j in range(n)] for i in range(n)])
    T = np.array([[contract2(kinetic_prim, basis[i], basis[j]) for j in range(n)] for i in range(n)])
    V = np.zeros((n, n))
    for rc in centers:  # both nuclei have Z = 1
        V += np.array([[contract2(nuclear_prim, basis[i], basis[j], rc) for j in range(n)] for i in range(n)])
    eri = np.zeros((n, n, n, n))  # chemists' notation (ij|kl)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    eri[i, j, k, l] = contract4(basis[i], basis[j], basis[k], basis[l])
    e_nuc = 1.0 / r
    return T + V, S, eri, e_nuc


def rhf(hcore, S, eri, n_elec=2, max_cycles=100, tol=1e-12):
    s_val, s_vec = np.linalg.eigh(S)
    x = s_vec @ np.diag(s_val**-0.5) @ s_vec.T
    dm = np.zeros_like(S)
    energy = math.inf
    for cycle in range(max_cycles):
        J = np.einsum("ijkl,kl->ij", eri, dm)
        K = np.einsum("ikjl,kl->ij", eri, dm)
        F = hcore + J - 0.5 * K
        e_new = 0.5 * np.sum(dm * (hcore + F))
        fp = x.T @ F @ x
        _, cp = np.linalg.eigh(fp)
        C = x @ cp
        occ = C[:, : n_elec // 2]
        dm = 2.0 * occ @ occ.T
        if cycle > 0 and abs(e_new - energy) < tol:
            energy = e_new
            break
        energy = e_new
    return C, energy


def spin_orbital_integrals(hcore, eri, C):
    """One-body h_pq and chemists' two-body (pq|rs) in the interleaved
    spin-orbital basis (spatial orbital p -> spin orbitals 2p, 2p+1)."""
    h_mo = C.T @ hcore @ C
    eri_mo = np.einsum("ip,jq,kr,ls,ijkl->pqrs", C, C, C, C, eri, optimize=True)
    n_so = 2 * h_mo.shape[0]
    h1 = np.zeros((n_so, n_so))
    g = np.zeros((n_so,) * 4)
    for p in range(n_so):
        for q in range(n_so):
            if p % 2 == q % 2:
                h1[p, q] = h_mo[p // 2, q // 2]
            for r in range(n_so):
                for s in range(n_so):
                    if p % 2 == q % 2 and r % 2 == s % 2:
                        g[p, q, r, s] = eri_mo[p // 2, q // 2, r // 2, s // 2]
    return h1, g


def to_fermion_operator(h1, g):
    """H_elec = sum h_pq a+_p a_q + (1/2) sum (pq|rs) a+_p a+_r a_s a_q."""
    terms = []
    n = h1.shape[0]
    for p in range(n):
        for q in range(n):
            if abs(h1[p, q]) > 1e-12:
                terms.append((h1[p, q], ((p, True), (q, False))))
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    if abs(g[p, q, r, s]) > 1e-12:
                        terms.append(
                            (0.5 * g[p, q, r, s], ((p, True), (r, True), (s, False), (q, False)))
                        )
    return FermionOperator.from_terms(terms)


def write_integral_file(path, h1, g, e_nuc):
    n = h1.shape[0]
    lines = [f"# H2/STO-3G spin-orbital integrals; add nuclear repulsion {e_nuc:.12f}"]
    for p in range(n):
        for q in range(n):
            if abs(h1[p, q]) > 1e-12:
                lines.append(f"h {p} {q} {h1[p, q]:.12f}")
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    if abs(g[p, q, r, s]) > 1e-12:
                        lines.append(f"V {p} {q} {r} {s} {0.5 * g[p, q, r, s]:.12f}")
    Path(path).write_text("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bond", type=float, default=0.74, help="bond length in angstrom")
    ap.add_argument("--outdir", default=str(Path(__file__).resolve().parent.parent / "src" / "qipa" / "data"))
    args = ap.parse_args()

    hcore, S, eri, e_nuc = integrals(args.bond)
    C, e_elec = rhf(hcore, S, eri)
    print(f"RHF total energy: {e_elec + e_nuc:.8f} Ha")

    h1, g = spin_orbital_integrals(hcore, eri, C)
    fop = to_fermion_operator(h1, g)
    from qipa.pauli import Observable

    obs = (jordan_wigner(fop, h1.shape[0]) + Observable.identity(h1.shape[0], e_nuc)).simplify()
    evals = np.linalg.eigvalsh(obs.to_dense())
    print(f"qubit Hamiltonian: {len(obs.terms)} terms on {obs.n_qubits} qubits")
    print(f"FCI (dense) ground energy: {evals[0]:.8f} Ha")

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    pauli_path = outdir / f"h2_r{args.bond:.2f}.txt"
    pauli_path.write_text(format_pauli_text(obs))
    write_integral_file(outdir / f"h2_r{args.bond:.2f}_integrals.txt", h1, g, e_nuc)
    print(f"wrote {pauli_path}")


if __name__ == "__main__":
    main()
