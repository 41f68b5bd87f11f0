"""Phase, group and dwell times for one barrier of width 3 pi / kappa0, then versus the gap.

All times are printed in units of tau0 = m D/(hbar kappa0).

Run:  python demos/characteristic_times.py
"""
import numpy as np

from tunneltime import BarrierSystem, find_resonances, times

sys = BarrierSystem(V0=1.0, d=1.5 * np.pi, L=0.0, a1=1.0)
k = np.array([0.05, 0.3, 0.6, 0.9, 1.2, 1.5, 2.0, 3.0])
rep = times(sys, k)
cols = {"dwell_tr": rep.dwell_tr.total, "dwell": rep.dwell_tot.total, "ph": rep.tau_ph,
        "as": rep.tau_as, "dep": rep.t_dep, "free": rep.tau_free}
print("    k  " + "".join(f"{name:>11}" for name in cols))
for i, kk in enumerate(k):
    print(f"{kk:5.2f}  " + "".join(f"{v[i] / rep.tau0:11.4f}" for v in cols.values()))

res = find_resonances(sys, 1.0, 3.0)
at = times(sys, np.array(res))
print("\nat resonances the total dwell time equals the transmission dwell time:")
print("  max rel diff", f"{np.max(np.abs(at.dwell_tot.total / at.dwell_tr.total - 1)):.1e}")

# versus the gap at a fixed energy just below the barrier top
print("\n    L   dwell_tr    as        ph      (unscaled)")
for L in np.linspace(0, 20, 6):
    r = times(sys.with_(L=L), np.array([0.97]))
    print(f"{L:5.1f} {r.dwell_tr.total[0]:9.3f} {r.tau_as[0]:9.3f} {r.tau_ph[0]:9.3f}")

# opaque barrier: the group time stops growing with the width
for kd in (5, 10, 20):
    kap = np.sqrt(1 - 0.5**2)
    r = times(BarrierSystem(V0=1.0, d=kd / kap, L=0.0, a1=1.0), np.array([0.5]))
    print(f"kappa d = {kd:2d}: tau_as = {r.tau_as[0]:.6f}  (2m/(hbar k kappa) = {2 * 0.5 / (0.5 * kap):.6f}),"
          f" dwell_tr = {r.dwell_tr.total[0]:.3e}")
