#!/usr/bin/env python3
"""Generate QEDDUMP v1 integral files and reference energies with PySCF.

Usage: python3 fixtures/generate_dumps.py [outdir]
"""
import json
import sys
from pathlib import Path

import numpy as np
from pyscf import cc, fci, gto, scf

ANG = 0.52917721067

H2_R = 0.74144
WATER_R = 0.958
WATER_THETA = 104.4776


def h2(r):
    return f"H 0 0 0; H 0 0 {r}"


def water():
    half = np.radians(WATER_THETA) / 2
    y, z = WATER_R * np.sin(half), WATER_R * np.cos(half)
    return f"O 0 0 0; H 0 {y:.12f} {z:.12f}; H 0 {-y:.12f} {z:.12f}"


SYSTEMS = {
    "h2_sto3g": (h2(H2_R), "sto-3g", f"H2 R={H2_R} A"),
    "h2_ccpvdz": (h2(H2_R), "cc-pvdz", f"H2 R={H2_R} A"),
    "h2_augccpvdz": (h2(H2_R), "aug-cc-pvdz", f"H2 R={H2_R} A"),
    "h2_ccpvtz": (h2(H2_R), "cc-pvtz", f"H2 R={H2_R} A"),
    "h2_ccpvdz_r074": (h2(0.74), "cc-pvdz", "H2 R=0.74 A"),
    "water_sto3g": (water(), "sto-3g", f"H2O R={WATER_R} A theta={WATER_THETA} C2 along z"),
    "water_ccpvdz": (water(), "cc-pvdz", f"H2O R={WATER_R} A theta={WATER_THETA} C2 along z"),
    "water_augccpvdz": (water(), "aug-cc-pvdz", f"H2O R={WATER_R} A theta={WATER_THETA} C2 along z"),
}


def fmt(x):
    return "%.17g" % x


def write_dump(path, mol, label):
    n = mol.nao_nr()
    s = mol.intor("int1e_ovlp")
    h = mol.intor("int1e_kin") + mol.intor("int1e_nuc")
    with mol.with_common_orig((0, 0, 0)):
        r = mol.intor("int1e_r")
        rr = mol.intor("int1e_rr").reshape(3, 3, n, n)
    eri = mol.intor("int2e", aosym="s8")
    dnuc = np.einsum("a,ax->x", mol.atom_charges(), mol.atom_coords())
    lines = ["QEDDUMP 1",
             f"NAO {n} NELEC {mol.nelectron} ENUC {fmt(mol.energy_nuc())} "
             f"DNUC {fmt(dnuc[0])} {fmt(dnuc[1])} {fmt(dnuc[2])} "
             f"LABEL {label} basis={mol.basis}"]

    def one(tag, m):
        for i in range(n):
            for j in range(i + 1):
                if m[i, j] != 0.0:
                    lines.append(f"{tag} {i + 1} {j + 1} {fmt(m[i, j])}")

    one("S", s)
    one("H", h)
    for a, tag in enumerate("XYZ"):
        one("D" + tag, -r[a])
    for a, b, tag in [(0, 0, "XX"), (0, 1, "XY"), (0, 2, "XZ"), (1, 1, "YY"), (1, 2, "YZ"), (2, 2, "ZZ")]:
        one("Q" + tag, -rr[a, b])
    ij = 0
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for p, (i, j) in enumerate(pairs):
        for q in range(p + 1):
            k, l = pairs[q]
            v = eri[ij]
            ij += 1
            if abs(v) > 1e-14:
                lines.append(f"G {i + 1} {j + 1} {k + 1} {l + 1} {fmt(v)}")
    path.write_text("\n".join(lines) + "\n")


def references(mol):
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.conv_tol_grad = 1e-9
    mf.kernel()
    out = {"rhf": mf.e_tot}
    if mol.nelectron == 2:
        out["fci"] = fci.FCI(mf).kernel()[0]
    mycc = cc.CCSD(mf)
    mycc.conv_tol = 1e-11
    mycc.conv_tol_normt = 1e-9
    mycc.kernel()
    out["ccsd_corr"] = mycc.e_corr
    return out


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent
    refs = {}
    for name, (atom, basis, label) in SYSTEMS.items():
        mol = gto.M(atom=atom, basis=basis, unit="A", verbose=0)
        write_dump(outdir / f"{name}.qeddump", mol, label)
        refs[name] = references(mol)
        print(name, mol.nao_nr(), refs[name])
    (outdir / "references.json").write_text(json.dumps(refs, indent=2) + "\n")


if __name__ == "__main__":
    main()
