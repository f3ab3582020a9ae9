#!/usr/bin/env python3
"""Generate the bundled FCIDUMP assets.

Restricted Hartree-Fock over STO-3G with McMurchie-Davidson integrals,
optional frozen-core folding, and an independent determinant-basis FCI
used to record reference energies in each asset's metadata file.

Run from the repository root:  python3 tools/make_fcidumps.py
"""

import itertools
import json
import math
import os

import numpy as np
from scipy.special import gammainc, gamma

ANGSTROM_TO_BOHR = 1.8897259886

# STO-3G fits to Slater functions with zeta = 1 (Hehre, Stewart, Pople).
S1_ALPHA = np.array([2.227660584, 0.4057711562, 0.1098175104])
S1_COEF = np.array([0.1543289673, 0.5353281423, 0.4446345422])
SP2_ALPHA = np.array([0.9942027298, 0.2310313333, 0.07513856])
S2_COEF = np.array([-0.09996722919, 0.3995128261, 0.7001154689])
P2_COEF = np.array([0.1559162750, 0.6076837186, 0.3919573931])

# Slater exponents per element: (zeta_1s, zeta_2sp).
ZETA = {
    "H": (1.24, None),
    "B": (4.68, 1.50),
    "C": (5.67, 1.72),
    "O": (7.66, 2.25),
}
CHARGE = {"H": 1, "B": 5, "C": 6, "O": 8}


class Shell:
    def __init__(self, center, l_vec, alphas, coefs):
        self.center = np.asarray(center, dtype=float)
        self.l_vec = l_vec  # (lx, ly, lz)
        self.alphas = np.asarray(alphas, dtype=float)
        # normalize each primitive, then the contraction
        norms = np.array([gto_norm(a, l_vec) for a in self.alphas])
        c = np.asarray(coefs, dtype=float) * norms
        s = 0.0
        for i in range(len(c)):
            for j in range(len(c)):
                s += c[i] * c[j] * primitive_overlap(
                    self.alphas[i], l_vec, self.center, self.alphas[j], l_vec, self.center
                )
        self.coefs = c / math.sqrt(s)


def gto_norm(alpha, l_vec):
    lx, ly, lz = l_vec
    l = lx + ly + lz
    num = (2 * alpha / math.pi) ** 0.75 * (4 * alpha) ** (l / 2.0)
    den = math.sqrt(
        dfact(2 * lx - 1) * dfact(2 * ly - 1) * dfact(2 * lz - 1)
    )
    return num / den


def dfact(n):
    if n <= 0:
        return 1.0
    r = 1.0
    while n > 1:
        r *= n
        n -= 2
    return r


def hermite_e(i, j, t, qx, a, b):
    """McMurchie-Davidson expansion coefficient E_t^{ij}."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * qx * qx)
    if j == 0:
        return (
            (1.0 / (2.0 * p)) * hermite_e(i - 1, j, t - 1, qx, a, b)
            - (q * qx / a) * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    return (
        (1.0 / (2.0 * p)) * hermite_e(i, j - 1, t - 1, qx, a, b)
        + (q * qx / b) * hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def primitive_overlap(a, la, ra, b, lb, rb):
    p = a + b
    s = 1.0
    for k in range(3):
        s *= hermite_e(la[k], lb[k], 0, ra[k] - rb[k], a, b)
    return s * (math.pi / p) ** 1.5


def primitive_kinetic(a, la, ra, b, lb, rb):
    lx, ly, lz = lb
    term0 = b * (2 * (lx + ly + lz) + 3) * primitive_overlap(a, la, ra, b, lb, rb)
    term1 = -2.0 * b * b * (
        primitive_overlap(a, la, ra, b, (lx + 2, ly, lz), rb)
        + primitive_overlap(a, la, ra, b, (lx, ly + 2, lz), rb)
        + primitive_overlap(a, la, ra, b, (lx, ly, lz + 2), rb)
    )
    term2 = -0.5 * (
        lx * (lx - 1) * primitive_overlap(a, la, ra, b, (lx - 2, ly, lz), rb)
        + ly * (ly - 1) * primitive_overlap(a, la, ra, b, (lx, ly - 2, lz), rb)
        + lz * (lz - 1) * primitive_overlap(a, la, ra, b, (lx, ly, lz - 2), rb)
    )
    return term0 + term1 + term2


def boys(n, x):
    if x < 1e-12:
        return 1.0 / (2 * n + 1)
    return gammainc(n + 0.5, x) * gamma(n + 0.5) / (2.0 * x ** (n + 0.5))


def hermite_coulomb(t, u, v, n, p, pc):
    """Hermite Coulomb integral R^n_{tuv}."""
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * (pc @ pc))
    if t > 0:
        return (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc) + pc[0] * hermite_coulomb(
            t - 1, u, v, n + 1, p, pc
        )
    if u > 0:
        return (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc) + pc[1] * hermite_coulomb(
            t, u - 1, v, n + 1, p, pc
        )
    return (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc) + pc[2] * hermite_coulomb(
        t, u, v - 1, n + 1, p, pc
    )


def primitive_nuclear(a, la, ra, b, lb, rb, rc):
    p = a + b
    rp = (a * ra + b * rb) / p
    val = 0.0
    for t in range(la[0] + lb[0] + 1):
        et = hermite_e(la[0], lb[0], t, ra[0] - rb[0], a, b)
        for u in range(la[1] + lb[1] + 1):
            eu = hermite_e(la[1], lb[1], u, ra[1] - rb[1], a, b)
            for v in range(la[2] + lb[2] + 1):
                ev = hermite_e(la[2], lb[2], v, ra[2] - rb[2], a, b)
                val += et * eu * ev * hermite_coulomb(t, u, v, 0, p, rp - rc)
    return val * 2.0 * math.pi / p


def primitive_eri(a, la, ra, b, lb, rb, c, lc, rc, d, ld, rd):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    val = 0.0
    for t in range(la[0] + lb[0] + 1):
        e1t = hermite_e(la[0], lb[0], t, ra[0] - rb[0], a, b)
        for u in range(la[1] + lb[1] + 1):
            e1u = hermite_e(la[1], lb[1], u, ra[1] - rb[1], a, b)
            for v in range(la[2] + lb[2] + 1):
                e1v = hermite_e(la[2], lb[2], v, ra[2] - rb[2], a, b)
                if e1t == 0.0 and e1u == 0.0 and e1v == 0.0:
                    continue
                for tt in range(lc[0] + ld[0] + 1):
                    e2t = hermite_e(lc[0], ld[0], tt, rc[0] - rd[0], c, d)
                    for uu in range(lc[1] + ld[1] + 1):
                        e2u = hermite_e(lc[1], ld[1], uu, rc[1] - rd[1], c, d)
                        for vv in range(lc[2] + ld[2] + 1):
                            e2v = hermite_e(lc[2], ld[2], vv, rc[2] - rd[2], c, d)
                            coef = e1t * e1u * e1v * e2t * e2u * e2v
                            if coef == 0.0:
                                continue
                            val += (
                                coef
                                * (-1.0) ** (tt + uu + vv)
                                * hermite_coulomb(t + tt, u + uu, v + vv, 0, alpha, rp - rq)
                            )
    val *= 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
    return val


def contracted(fn, sh_a, sh_b, *extra):
    val = 0.0
    for ai, ci in zip(sh_a.alphas, sh_a.coefs):
        for bj, cj in zip(sh_b.alphas, sh_b.coefs):
            val += ci * cj * fn(ai, sh_a.l_vec, sh_a.center, bj, sh_b.l_vec, sh_b.center, *extra)
    return val


def contracted_eri(sh_a, sh_b, sh_c, sh_d):
    val = 0.0
    for ai, ci in zip(sh_a.alphas, sh_a.coefs):
        for bj, cj in zip(sh_b.alphas, sh_b.coefs):
            for ck, dk in zip(sh_c.alphas, sh_c.coefs):
                for dl, el in zip(sh_d.alphas, sh_d.coefs):
                    val += ci * cj * dk * el * primitive_eri(
                        ai, sh_a.l_vec, sh_a.center,
                        bj, sh_b.l_vec, sh_b.center,
                        ck, sh_c.l_vec, sh_c.center,
                        dl, sh_d.l_vec, sh_d.center,
                    )
    return val


def build_basis(atoms):
    shells = []
    for elem, center in atoms:
        z1, z2 = ZETA[elem]
        shells.append(Shell(center, (0, 0, 0), S1_ALPHA * z1 * z1, S1_COEF))
        if z2 is not None:
            shells.append(Shell(center, (0, 0, 0), SP2_ALPHA * z2 * z2, S2_COEF))
            for lv in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
                shells.append(Shell(center, lv, SP2_ALPHA * z2 * z2, P2_COEF))
    return shells


def ao_integrals(atoms):
    shells = build_basis(atoms)
    n = len(shells)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = contracted(primitive_overlap, shells[i], shells[j])
            t[i, j] = t[j, i] = contracted(primitive_kinetic, shells[i], shells[j])
            vv = 0.0
            for elem, center in atoms:
                vv -= CHARGE[elem] * contracted(
                    primitive_nuclear, shells[i], shells[j], np.asarray(center, dtype=float)
                )
            v[i, j] = v[j, i] = vv
    eri = np.zeros((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for a, (i, j) in enumerate(pairs):
        for i2, j2 in pairs[: a + 1]:
            val = contracted_eri(shells[i], shells[j], shells[i2], shells[j2])
            for p, q in ((i, j), (j, i)):
                for r, ss in ((i2, j2), (j2, i2)):
                    eri[p, q, r, ss] = val
                    eri[r, ss, p, q] = val
    e_nuc = 0.0
    for (ea, ra), (eb, rb) in itertools.combinations(atoms, 2):
        e_nuc += CHARGE[ea] * CHARGE[eb] / np.linalg.norm(np.asarray(ra) - np.asarray(rb))
    return s, t + v, eri, e_nuc


def rhf(s, hcore, eri, n_elec, e_nuc, max_iter=200, tol=1e-12):
    n = s.shape[0]
    n_occ = n_elec // 2
    sval, svec = np.linalg.eigh(s)
    x = svec @ np.diag(sval ** -0.5) @ svec.T
    f = hcore.copy()
    e_old = 0.0
    dm = np.zeros((n, n))
    for it in range(max_iter):
        fp = x.T @ f @ x
        eps, cp = np.linalg.eigh(fp)
        c = x @ cp
        cocc = c[:, :n_occ]
        dm_new = 2.0 * cocc @ cocc.T
        dm = 0.6 * dm_new + 0.4 * dm if it > 0 else dm_new
        j = np.einsum("pqrs,rs->pq", eri, dm)
        k = np.einsum("prqs,rs->pq", eri, dm)
        f = hcore + j - 0.5 * k
        e_elec = 0.5 * np.sum(dm * (hcore + f))
        if abs(e_elec - e_old) < tol and it > 3:
            break
        e_old = e_elec
    fp = x.T @ f @ x
    eps, cp = np.linalg.eigh(fp)
    c = x @ cp
    e_total = e_elec + e_nuc
    return e_total, eps, c


def mo_transform(hcore, eri, c):
    h_mo = c.T @ hcore @ c
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
    return h_mo, eri_mo


def freeze_core(h_mo, eri_mo, e_nuc, eps, n_core):
    """Fold n_core doubly-occupied orbitals into the core energy and h1."""
    n = h_mo.shape[0]
    act = list(range(n_core, n))
    e_core = e_nuc
    for i in range(n_core):
        e_core += 2.0 * h_mo[i, i]
        for j in range(n_core):
            e_core += 2.0 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]
    h_act = np.zeros((len(act), len(act)))
    for a, p in enumerate(act):
        for b, q in enumerate(act):
            val = h_mo[p, q]
            for i in range(n_core):
                val += 2.0 * eri_mo[p, q, i, i] - eri_mo[p, i, i, q]
            h_act[a, b] = val
    eri_act = eri_mo[np.ix_(act, act, act, act)]
    return h_act, eri_act, e_core, eps[n_core:]


def write_fcidump(path, h_mo, eri_mo, e_core, eps, n_elec, ms2):
    n = h_mo.shape[0]
    lines = [f"&FCI NORB={n},NELEC={n_elec},MS2={ms2},"]
    lines.append(" ORBSYM=" + "1," * n)
    lines.append(" ISYM=1,")
    lines.append("&END")
    seen = set()
    for p in range(n):
        for q in range(p + 1):
            for r in range(n):
                for s in range(r + 1):
                    if (p * (p + 1) // 2 + q) < (r * (r + 1) // 2 + s):
                        continue
                    key = (p, q, r, s)
                    if key in seen:
                        continue
                    seen.add(key)
                    val = eri_mo[p, q, r, s]
                    if abs(val) > 1e-13:
                        lines.append(f"{val:.16e} {p+1} {q+1} {r+1} {s+1}")
    for p in range(n):
        for q in range(p + 1):
            if abs(h_mo[p, q]) > 1e-13:
                lines.append(f"{h_mo[p,q]:.16e} {p+1} {q+1} 0 0")
    for p in range(n):
        lines.append(f"{eps[p]:.16e} {p+1} 0 0 0")
    lines.append(f"{e_core:.16e} 0 0 0 0")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Independent spin-orbital FCI / MP2 for metadata cross-checks.
# Spin-orbital convention: block order, alpha p -> p, beta p -> p + n_spatial.
# ---------------------------------------------------------------------------

def spin_orbital_tables(h_mo, eri_mo):
    n = h_mo.shape[0]
    ns = 2 * n

    def sp(p):
        return p % n

    def spin(p):
        return p // n

    h1 = np.zeros((ns, ns))
    for p in range(ns):
        for q in range(ns):
            if spin(p) == spin(q):
                h1[p, q] = h_mo[sp(p), sp(q)]
    asym = np.zeros((ns, ns, ns, ns))
    for p in range(ns):
        for q in range(ns):
            for r in range(ns):
                for s in range(ns):
                    d = 0.0
                    if spin(p) == spin(r) and spin(q) == spin(s):
                        d += eri_mo[sp(p), sp(r), sp(q), sp(s)]
                    if spin(p) == spin(s) and spin(q) == spin(r):
                        d -= eri_mo[sp(p), sp(s), sp(q), sp(r)]
                    asym[p, q, r, s] = d
    return h1, asym


def slater_condon_fci(h_mo, eri_mo, e_core, n_elec, ms2):
    n = h_mo.shape[0]
    ns = 2 * n
    h1, asym = spin_orbital_tables(h_mo, eri_mo)
    n_a = (n_elec + ms2) // 2
    n_b = (n_elec - ms2) // 2
    alphas = [set(c) for c in itertools.combinations(range(n), n_a)]
    betas = [set(c) for c in itertools.combinations(range(n), n_b)]
    dets = []
    for a in alphas:
        for b in betas:
            dets.append(tuple(sorted(list(a) + [x + n for x in b])))
    index = {d: i for i, d in enumerate(dets)}
    dim = len(dets)
    ham = np.zeros((dim, dim))

    def phase(occ, p):
        return (-1) ** sum(1 for o in occ if o < p)

    for jdet, det in enumerate(dets):
        occ = set(det)
        # diagonal
        e = e_core + sum(h1[p, p] for p in occ)
        e += 0.5 * sum(asym[p, q, p, q] for p in occ for q in occ)
        ham[jdet, jdet] += e
        # singles and doubles via excitation application
        for p in det:
            for r in range(ns):
                if r in occ:
                    continue
                occ1 = occ - {p}
                s1 = phase(sorted(occ1), p)
                occ2 = occ1 | {r}
                s2 = phase(sorted(occ1), r)
                new = tuple(sorted(occ2))
                i = index.get(new)
                if i is None:
                    continue
                amp = s1 * s2
                val = h1[r, p] + sum(asym[r, q, p, q] for q in occ1)
                ham[i, jdet] += amp * val
        for p, q in itertools.combinations(det, 2):
            for r in range(ns):
                if r in occ:
                    continue
                for s in range(r + 1, ns):
                    if s in occ:
                        continue
                    rest = occ - {p, q}
                    # <rs||pq> a_r+ a_s+ a_q a_p ordering signs
                    o = sorted(rest)
                    sgn = phase(o, p) * phase(o, q) * (1 if q > p else -1)
                    sgn2 = phase(o, r) * phase(o, s) * (1 if s > r else -1)
                    new = tuple(sorted(rest | {r, s}))
                    i = index.get(new)
                    if i is None:
                        continue
                    ham[i, jdet] += sgn * sgn2 * asym[r, s, p, q]
    evals, evecs = np.linalg.eigh(ham)
    return evals[0]


def hf_and_mp2(h_mo, eri_mo, e_core, eps, n_elec, ms2):
    n = h_mo.shape[0]
    ns = 2 * n
    h1, asym = spin_orbital_tables(h_mo, eri_mo)
    n_a = (n_elec + ms2) // 2
    n_b = (n_elec - ms2) // 2
    occ = list(range(n_a)) + [n + i for i in range(n_b)]
    virt = [p for p in range(ns) if p not in occ]
    e_hf = e_core + sum(h1[p, p] for p in occ)
    e_hf += 0.5 * sum(asym[p, q, p, q] for p in occ for q in occ)
    eps_so = np.concatenate([eps, eps])
    e2 = 0.0
    for i, j in itertools.combinations(occ, 2):
        for a, b in itertools.combinations(virt, 2):
            num = asym[i, j, a, b]
            den = eps_so[i] + eps_so[j] - eps_so[a] - eps_so[b]
            e2 += num * num / den
    return e_hf, e2


def make_system(name, atoms_ang, n_core, ms2, meta_extra):
    atoms = [(e, np.asarray(r) * ANGSTROM_TO_BOHR) for e, r in atoms_ang]
    s, hcore, eri, e_nuc = ao_integrals(atoms)
    n_elec_total = sum(CHARGE[e] for e, _ in atoms)
    e_hf_scf, eps, c = rhf(s, hcore, eri, n_elec_total, e_nuc)
    h_mo, eri_mo = mo_transform(hcore, eri, c)
    if n_core:
        h_act, eri_act, e_core, eps_act = freeze_core(h_mo, eri_mo, e_nuc, eps, n_core)
    else:
        h_act, eri_act, e_core, eps_act = h_mo, eri_mo, e_nuc, eps
    n_elec = n_elec_total - 2 * n_core
    path = os.path.join("assets", f"{name}.fcidump")
    write_fcidump(path, h_act, eri_act, e_core, eps_act, n_elec, ms2)
    e_hf, e_mp2 = hf_and_mp2(h_act, eri_act, e_core, eps_act, n_elec, ms2)
    e_fci = slater_condon_fci(h_act, eri_act, e_core, n_elec, ms2)
    assert abs(e_hf - e_hf_scf) < 1e-8, f"{name}: HF mismatch {e_hf} vs {e_hf_scf}"
    assert e_fci <= e_hf + 1e-12
    meta = {
        "name": name,
        "basis": "STO-3G",
        "geometry_angstrom": [[e, list(map(float, r))] for e, r in atoms_ang],
        "n_frozen_core": n_core,
        "n_active_spatial": int(h_act.shape[0]),
        "n_active_electrons": int(n_elec),
        "ms2": ms2,
        "generator": "tools/make_fcidumps.py (RHF/STO-3G, McMurchie-Davidson integrals)",
        "reference_energies_hartree": {
            "hf": float(e_hf),
            "mp2_correlation": float(e_mp2),
            "fci": float(e_fci),
        },
    }
    meta.update(meta_extra)
    with open(os.path.join("assets", f"{name}.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    print(
        f"{name}: norb={h_act.shape[0]} nelec={n_elec} "
        f"E_HF={e_hf:.8f} E_MP2corr={e_mp2:.8f} E_FCI={e_fci:.8f}"
    )
    return e_hf, e_fci


def main():
    os.makedirs("assets", exist_ok=True)

    make_system(
        "h2_0.735",
        [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.735))],
        0,
        0,
        {"note": "equilibrium H2"},
    )

    make_system(
        "h4_1.0",
        [("H", (0.0, 0.0, float(i))) for i in range(4)],
        0,
        0,
        {"note": "linear H4, 1.0 A spacing"},
    )

    for r in [1.0, 1.25, 1.5, 1.75, 2.0, 2.25]:
        make_system(
            f"bh_{r}",
            [("B", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))],
            1,
            0,
            {"note": f"BH, r(B-H) = {r} A, B 1s frozen"},
        )

    # H2O: symmetric stretch family, HOH angle 104.4776 deg.
    ang = math.radians(104.4776)
    for r in [0.958, 1.2, 1.5]:
        x = r * math.sin(ang / 2.0)
        z = r * math.cos(ang / 2.0)
        make_system(
            f"h2o_{r}",
            [("O", (0.0, 0.0, 0.0)), ("H", (x, 0.0, z)), ("H", (-x, 0.0, z))],
            1,
            0,
            {"note": f"H2O, r(O-H) = {r} A symmetric stretch, angle 104.4776 deg, O 1s frozen"},
        )

    # CH2 (singlet), HCH angle 102.4 deg.
    ang = math.radians(102.4)
    for r in [1.107, 1.35, 1.6]:
        x = r * math.sin(ang / 2.0)
        z = r * math.cos(ang / 2.0)
        make_system(
            f"ch2_{r}",
            [("C", (0.0, 0.0, 0.0)), ("H", (x, 0.0, z)), ("H", (-x, 0.0, z))],
            1,
            0,
            {"note": f"singlet CH2, r(C-H) = {r} A, angle 102.4 deg, C 1s frozen"},
        )


if __name__ == "__main__":
    main()
