"""Finite-volume eigenvalues against the closed-form bracket.

Run: python demos/solver_and_gap.py
"""

import math

from discwindow.bessel import bessel_zero
from discwindow.fdsolver import Mesh, ReducedProblem, gap_asymptotics, refine_study, solve_lowest
from discwindow.geometry import WaveguideGeometry

x01 = bessel_zero(0, 1).value
g = WaveguideGeometry(1.0, 1.0)

print("a = d = 1, mode n = 0, halving the mesh")
study = refine_study(ReducedProblem(g, 0), levels=4)
for (h, lam, order), mesh in zip(study.rows(), study.meshes):
    print(f"  {mesh:>9}  h = {h:.5f}  lambda1 = {lam:.6f}  order = {order:.3f}")
print(f"  extrapolated {study.extrapolated:.6f} +- {study.error_estimate:.1e}")
print(f"  window ({math.pi**2 / 4:.4f}, {math.pi**2:.4f}), bracket {math.pi**2 / 4 + x01**2:.4f}")

print("\nhigher angular modes at a = 2")
for n in range(3):
    p = ReducedProblem(WaveguideGeometry(1.0, 2.0), n)
    res = solve_lowest(p, Mesh.with_spacing(p, 1 / 20), count=2)
    found = ", ".join(f"{v:.5f}" for v in res.bound_states) or "none"
    print(f"  n = {n}: below pi^2: {found}")

print("\ngap above (pi/2d)^2 for wide windows")
for row in gap_asymptotics([WaveguideGeometry(1.0, a) for a in (2.0, 4.0, 8.0)]):
    print(f"  a = {row.a:g}: gap = {row.gap:.5f} (bracket {row.bracket_gap:.5f}), "
          f"gap*a^2 = {row.scaled_gap:.4f} +- {row.error_estimate * row.a**2:.4f}")
print(f"  gap*a^2 climbs toward x01^2 = {x01**2:.4f}")
