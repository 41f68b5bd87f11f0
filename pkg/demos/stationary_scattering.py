"""Transmission through two identical rectangular barriers, and where it becomes total.

Run:  python demos/stationary_scattering.py
"""
import numpy as np

from tunneltime import BarrierSystem, compose_two_barrier, find_resonances, oracle_amplitudes, total_field

# reduced units: hbar = 1, m = 1/2, so E = k^2 and kappa0 = sqrt(V0)
sys = BarrierSystem(V0=1.0, d=1.0, L=2.0, a1=1.0)
print(f"barriers [{sys.a1}, {sys.b1}] and [{sys.a2}, {sys.b2}], midpoint {sys.xc}")

k = np.linspace(0.2, 2.5, 8)
two = compose_two_barrier(sys, k)
print("\n    k     T_two      R_two      T_two+R_two-1")
for row in zip(k, two.T_two, two.R_two):
    print(f"{row[0]:6.3f}  {row[1]:.6e}  {row[2]:.6e}  {row[1] + row[2] - 1:+.1e}")

# the transfer-matrix amplitudes agree with a direct solve of the matching conditions
field = total_field(sys, k)
direct = oracle_amplitudes(sys, k)
err = np.max(np.abs(field.B_out - direct.B_out) / np.abs(direct.B_out))
print(f"\nreflected amplitude, transfer matrix vs direct solve: max rel diff {err:.1e}")

# resonances: the reflected wave vanishes and the transmission is total
res = find_resonances(sys, 0.1, 2.5)
print("\nresonant k:", ", ".join(f"{kr:.6f}" for kr in res))
print("R_two there:", ", ".join(f"{r:.1e}" for r in compose_two_barrier(sys, np.array(res)).R_two))
