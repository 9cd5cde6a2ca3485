#!/usr/bin/env python3
"""Smoke test for the bellmono_py extension module.

Builds the cdylib if needed, loads it without any packaging machinery, and
exercises the headline operations end to end.

Usage: python3 python/smoke_test.py
"""

import importlib.util
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
TSIRELSON = 2 * math.sqrt(2)


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libbellmono_py.so",
        ROOT / "target" / "debug" / "libbellmono_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        print("building bellmono-py (release)...")
        subprocess.run(
            ["cargo", "build", "-p", "bellmono-py", "--release"],
            cwd=ROOT,
            check=True,
        )
        lib = candidates[0]
    staging = pathlib.Path(tempfile.mkdtemp(prefix="bellmono-py-"))
    target = staging / "bellmono_py.so"
    shutil.copy2(lib, target)
    spec = importlib.util.spec_from_file_location("bellmono_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    bm = load_module()
    checks = 0

    def check(name, ok):
        nonlocal checks
        checks += 1
        status = "ok" if ok else "FAIL"
        print(f"  [{status}] {name}")
        if not ok:
            sys.exit(1)

    print("bellmono_py smoke test")

    z = bm.pauli("Z")
    x = bm.pauli("X")
    check("pauli Z eigenvalues", bm.pauli("Z").eigenvalues() == [-1.0, 1.0])
    check("planar(pi/2) == X", bm.planar_observable(math.pi / 2).entries()[0][1] == 1.0 or
          close(bm.planar_observable(math.pi / 2).entries()[0][1].real, 1.0, 1e-12))
    check("kron dimension", bm.kron(z, x).dim == 4)

    singlet = bm.singlet()
    yy = bm.kron(bm.pauli("Y"), bm.pauli("Y"))
    check("singlet <YY> = -1", close(bm.expectation(singlet, yy), -1.0, 1e-12))
    check("singlet chsh_max (XYZ) = 2*sqrt(2)",
          close(bm.chsh_max(singlet.density(), "XYZ"), TSIRELSON, 1e-9))

    r = 1 / math.sqrt(2)
    a1 = bm.Matrix([[-r, -r], [-r, r]])          # -(Z+X)/sqrt(2)
    a2 = bm.Matrix([[-r, r], [r, r]])            # (X-Z)/sqrt(2)
    op = bm.chsh_operator(a1, a2, z, x)
    check("optimal CHSH operator top eigenvalue",
          close(op.eigenvalues()[-1], TSIRELSON, 1e-10))
    check("singlet saturates Tsirelson",
          close(bm.expectation(singlet, op), TSIRELSON, 1e-10))

    psi0 = bm.tight_family(0.0)
    jm = bm.joint_max(psi0)
    check("tight_family(0) values", close(jm["value_ab"], TSIRELSON, 1e-8)
          and close(jm["value_ac"], 0.0, 1e-8))
    t = math.pi / 8
    jm = bm.joint_max(bm.tight_family(t))
    check("tight_family(pi/8) on the circle",
          close(jm["value_ab"], TSIRELSON * math.cos(t), 1e-8)
          and close(jm["value_ac"], TSIRELSON * math.sin(t), 1e-8))
    check("monogamy_residual vanishes on the boundary",
          close(bm.monogamy_residual(jm["value_ab"], jm["value_ac"]), 0.0, 1e-8))
    check("pair_chsh_max agrees", close(bm.pair_chsh_max(bm.tight_family(t), "AB"),
                                        TSIRELSON * math.cos(t), 1e-9))
    check("commutation defect vanishes",
          bm.commutation_defect(bm.tight_family(0.3)) <= 1e-10)
    ee = bm.pair_expectations(psi0)
    check("pair_expectations(t=0) = (1, 0, 0)",
          close(ee[0], 1.0, 1e-12) and close(ee[1], 0.0, 1e-12) and close(ee[2], 0.0, 1e-12))

    angles = bm.canonicalize_angles(z, x)
    check("canonicalize(Z, X) -> [pi/2]",
          len(angles) == 1 and close(angles[0], math.pi / 2, 1e-10))

    value = bm.seesaw_chsh(restarts=6, seed=7)
    check("see-saw reaches Tsirelson", close(value, TSIRELSON, 1e-6))

    cloud = bm.random_cloud(25, seed=11)
    check("random cloud inside the disc",
          all(xx * xx + yy * yy <= 8 + 1e-8 for xx, yy in cloud))
    check("random cloud deterministic", bm.random_cloud(25, seed=11) == cloud)

    psi = bm.State([2, 2], [complex(r), 0j, 0j, complex(r)])
    rho_a = bm.partial_trace(psi.density(), [2, 2], [0])
    check("partial trace of a Bell state is maximally mixed",
          close(rho_a.entries()[0][0].real, 0.5, 1e-12)
          and close(rho_a.entries()[0][1].real, 0.0, 1e-12))

    print(f"all {checks} checks passed")


if __name__ == "__main__":
    main()
