#!/usr/bin/env python3
"""Generate reference fixtures for the chem/fock test suites.

Independent implementation route: analytic s-type Gaussian integrals with an
mpmath Boys function, dense Roothaan RHF via scipy, and FCI by building the
second-quantized Hamiltonian in the full 2^n Fock space (Jordan-Wigner ladder
matrices), then restricting to the particle-number sector.  Run once; the
output JSON is committed under tests/fixtures/.
"""

import json
import numpy as np
from scipy.linalg import eigh
import mpmath as mp

mp.mp.dps = 40

ANGSTROM_TO_BOHR = 1.8897261254578281

STO3G_H_EXPS = [3.425250914, 0.6239137298, 0.1688554040]
STO3G_H_COEFS = [0.1543289673, 0.5353281423, 0.4446345422]


def boys0(x):
    if x < 1e-14:
        return 1.0 - x / 3.0
    xm = mp.mpf(x)
    return float(mp.sqrt(mp.pi / (4 * xm)) * mp.erf(mp.sqrt(xm)))


class Shell:
    def __init__(self, center):
        self.center = np.asarray(center, dtype=float)
        norms = [(2.0 * a / np.pi) ** 0.75 for a in STO3G_H_EXPS]
        self.prims = [(a, c * n) for a, c, n in zip(STO3G_H_EXPS, STO3G_H_COEFS, norms)]
        # renormalize contracted AO to unit self-overlap
        s = 0.0
        for a, ca in self.prims:
            for b, cb in self.prims:
                s += ca * cb * (np.pi / (a + b)) ** 1.5
        self.prims = [(a, c / np.sqrt(s)) for a, c in self.prims]


def overlap(sa, sb):
    out = 0.0
    rab2 = float(np.dot(sa.center - sb.center, sa.center - sb.center))
    for a, ca in sa.prims:
        for b, cb in sb.prims:
            p = a + b
            out += ca * cb * (np.pi / p) ** 1.5 * np.exp(-a * b / p * rab2)
    return out


def kinetic(sa, sb):
    out = 0.0
    rab2 = float(np.dot(sa.center - sb.center, sa.center - sb.center))
    for a, ca in sa.prims:
        for b, cb in sb.prims:
            p = a + b
            mu = a * b / p
            out += ca * cb * mu * (3.0 - 2.0 * mu * rab2) * (np.pi / p) ** 1.5 * np.exp(-mu * rab2)
    return out


def nuclear(sa, sb, charges, centers):
    out = 0.0
    rab2 = float(np.dot(sa.center - sb.center, sa.center - sb.center))
    for a, ca in sa.prims:
        for b, cb in sb.prims:
            p = a + b
            P = (a * sa.center + b * sb.center) / p
            pre = ca * cb * 2.0 * np.pi / p * np.exp(-a * b / p * rab2)
            for Z, C in zip(charges, centers):
                rpc2 = float(np.dot(P - np.asarray(C), P - np.asarray(C)))
                out -= pre * Z * boys0(p * rpc2)
    return out


def eri(sa, sb, sc, sd):
    out = 0.0
    rab2 = float(np.dot(sa.center - sb.center, sa.center - sb.center))
    rcd2 = float(np.dot(sc.center - sd.center, sc.center - sd.center))
    for a, ca in sa.prims:
        for b, cb in sb.prims:
            p = a + b
            P = (a * sa.center + b * sb.center) / p
            kab = np.exp(-a * b / p * rab2)
            for c, cc in sc.prims:
                for d, cd in sd.prims:
                    q = c + d
                    Q = (c * sc.center + d * sd.center) / q
                    kcd = np.exp(-c * d / q * rcd2)
                    rpq2 = float(np.dot(P - Q, P - Q))
                    pre = 2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))
                    out += ca * cb * cc * cd * pre * kab * kcd * boys0(p * q / (p + q) * rpq2)
    return out


def integrals(centers, charges):
    shells = [Shell(c) for c in centers]
    n = len(shells)
    S = np.array([[overlap(shells[i], shells[j]) for j in range(n)] for i in range(n)])
    T = np.array([[kinetic(shells[i], shells[j]) for j in range(n)] for i in range(n)])
    V = np.array([[nuclear(shells[i], shells[j], charges, centers) for j in range(n)] for i in range(n)])
    g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    g[i, j, k, l] = eri(shells[i], shells[j], shells[k], shells[l])
    enuc = 0.0
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            enuc += charges[i] * charges[j] / np.linalg.norm(np.asarray(centers[i]) - np.asarray(centers[j]))
    return S, T, V, g, enuc


def rhf(S, T, V, g, enuc, nelec, maxiter=400):
    nocc = nelec // 2
    hcore = T + V
    w, U = np.linalg.eigh(S)
    X = U @ np.diag(w ** -0.5) @ U.T
    F = hcore.copy()
    e_old = 0.0
    for _ in range(maxiter):
        Fp = X.T @ F @ X
        eps, Cp = np.linalg.eigh(Fp)
        C = X @ Cp
        Cocc = C[:, :nocc]
        D = 2.0 * Cocc @ Cocc.T
        J = np.einsum("ls,mnls->mn", D, g)
        K = np.einsum("ls,mlns->mn", D, g)
        F = hcore + J - 0.5 * K
        e = 0.5 * np.sum(D * (hcore + F)) + enuc
        if abs(e - e_old) < 1e-12:
            break
        e_old = e
    return e, C, eps


def mo_transform(C, T, V, g):
    h = C.T @ (T + V) @ C
    gm = np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, g, optimize=True)
    return h, gm


def fci_ground(h, g, enuc, norb, nelec):
    """Fock-space route: JW ladder operators on 2*norb spin orbitals."""
    nso = 2 * norb
    dim = 1 << nso
    # spin orbital p -> (spatial p//2, spin p%2), orbital-major alpha-first
    # annihilation matrices
    a_ops = []
    for p in range(nso):
        rows, cols, vals = [], [], []
        for ket in range(dim):
            if (ket >> p) & 1:
                sign = (-1) ** bin(ket & ((1 << p) - 1)).count("1")
                rows.append(ket ^ (1 << p))
                cols.append(ket)
                vals.append(float(sign))
        A = np.zeros((dim, dim))
        A[rows, cols] = vals
        a_ops.append(A)
    H = np.zeros((dim, dim))
    for p in range(nso):
        for q in range(nso):
            if p % 2 != q % 2:
                continue
            hpq = h[p // 2, q // 2]
            if hpq != 0.0:
                H += hpq * (a_ops[p].T @ a_ops[q])
    for p in range(nso):
        for q in range(nso):
            if p % 2 != q % 2:
                continue
            for r in range(nso):
                for s in range(nso):
                    if r % 2 != s % 2:
                        continue
                    val = g[p // 2, q // 2, r // 2, s // 2]
                    if val == 0.0:
                        continue
                    H += 0.5 * val * (a_ops[p].T @ a_ops[r].T @ a_ops[s] @ a_ops[q])
    # restrict to the n-electron sector
    sector = [k for k in range(dim) if bin(k).count("1") == nelec]
    Hs = H[np.ix_(sector, sector)]
    evals = np.linalg.eigvalsh(Hs)
    return float(evals[0] + enuc)


def main():
    out = {}

    # --- H2 at 1.4 bohr ---
    centers = [[0.0, 0.0, 0.0], [0.0, 0.0, 1.4]]
    charges = [1.0, 1.0]
    S, T, V, g, enuc = integrals(centers, charges)
    e_hf, C, eps = rhf(S, T, V, g, enuc, 2)
    h_mo, g_mo = mo_transform(C, T, V, g)
    out["h2_1.4bohr"] = {
        "r_bohr": 1.4,
        "S": S.tolist(),
        "T": T.tolist(),
        "V": V.tolist(),
        "eri": g.reshape(-1).tolist(),
        "e_nuc": enuc,
        "e_hf": e_hf,
        "orbital_energies": eps.tolist(),
        "h_mo": h_mo.tolist(),
        "g_mo": np.abs(g_mo).reshape(-1).tolist(),  # MO phases are gauge; store magnitudes
        "e_fci": fci_ground(h_mo, g_mo, enuc, 2, 2),
    }

    # --- H2 at 0.735 angstrom ---
    r = 0.735 * ANGSTROM_TO_BOHR
    centers = [[0.0, 0.0, 0.0], [0.0, 0.0, r]]
    S, T, V, g, enuc = integrals(centers, charges)
    e_hf, C, eps = rhf(S, T, V, g, enuc, 2)
    h_mo, g_mo = mo_transform(C, T, V, g)
    out["h2_0.735angstrom"] = {
        "r_bohr": r,
        "e_nuc": enuc,
        "e_hf": e_hf,
        "e_fci": fci_ground(h_mo, g_mo, enuc, 2, 2),
    }

    with open("tests/fixtures/h2_sto3g.json", "w") as f:
        json.dump(out, f, indent=1)
    print("e_hf(1.4 bohr) =", out["h2_1.4bohr"]["e_hf"])
    print("e_fci(1.4 bohr) =", out["h2_1.4bohr"]["e_fci"])
    print("e_fci(0.735 A) =", out["h2_0.735angstrom"]["e_fci"])


if __name__ == "__main__":
    main()
