"""Splitting a scattering state into a transmitted and a reflected part.

The reflected part vanishes to the right of the midpoint xc and carries no
current; the transmitted part is mirror symmetric about xc in modulus and
its current equals the transmitted flux on both sides of xc.

Run:  python demos/subprocess_wave_functions.py
"""
import numpy as np

from tunneltime import BarrierSystem, compose_two_barrier, eval_total, total_field
from tunneltime.swf import current, eval_swf, ref_field

sys = BarrierSystem(V0=1.0, d=1.0, L=2.0, a1=3.0)
k = 0.7
two = compose_two_barrier(sys, k)
total = total_field(sys, k, two)
swf = ref_field(sys, k, total, two)

print(f"T_two = {float(two.T_two):.6f}, R_two = {float(two.R_two):.6f}")
print(f"incident amplitudes: A_tr = {complex(swf.A_in_tr):.6f}, A_ref = {complex(swf.A_in_ref):.6f}")
print(f"  sum = {complex(swf.A_in_tr + swf.A_in_ref):.3g}, "
      f"|A_tr|^2 + |A_ref|^2 = {abs(swf.A_in_tr) ** 2 + abs(swf.A_in_ref) ** 2:.15f}")

x = np.linspace(sys.a1 - 2, sys.b2 + 2, 9)
tot = eval_total(total, sys, x)
tr = eval_swf("tr", sys, swf, total, x)
ref = eval_swf("ref", sys, swf, total, x)
print("\n     x     |Psi|     |psi_tr|  |psi_ref|")
for row in zip(x, np.abs(tot), np.abs(tr), np.abs(ref)):
    print("  ".join(f"{v:8.4f}" for v in row))
print(f"max |psi_tr + psi_ref - Psi| = {np.max(np.abs(tr + ref - tot)):.1e}")

y = np.linspace(0, 0.5 * sys.D, 6)
left = np.abs(eval_swf("tr", sys, swf, total, sys.xc - y, side="left"))
right = np.abs(eval_swf("tr", sys, swf, total, sys.xc + y, side="right"))
print(f"\nmirror symmetry of |psi_tr| about xc: max diff {np.max(np.abs(left - right)):.1e}")

flux = sys.hbar * k / sys.mass
xc = np.array([sys.xc])
for side in ("left", "right"):
    j = current(*eval_swf("tr", sys, swf, total, xc, deriv=True, side=side), sys)[0]
    print(f"current of psi_tr at xc ({side}) / flux = {j / flux:.12f}")
j_ref = current(*eval_swf("ref", sys, swf, total, x[x < sys.xc], deriv=True), sys)
print(f"largest current of psi_ref left of xc: {np.max(np.abs(j_ref)):.1e}")
