"""A Gaussian packet tunnelling through a 15 nm barrier of 0.2 eV (SI working units: nm, eV, ps).

The particle mass is chosen so that the free transit time m D/(hbar kbar)
is 0.025 ps at the mean energy 0.05 eV.  Takes a few seconds.

Run:  python demos/packet_example.py
"""
import numpy as np
from scipy import constants

from tunneltime import BarrierSystem
from tunneltime.cli import run_packet

HBAR = constants.hbar / constants.e * 1e12          # eV ps
ebar, tau_free, D = 0.05, 0.025, 15.0
mass = 2 * ebar * (tau_free / D) ** 2
sys = BarrierSystem(V0=0.2, d=7.5, L=0.0, a1=200.0, mass=mass, hbar=HBAR)
kbar = np.sqrt(2 * mass * ebar) / HBAR
print(f"mass = {mass:.4e} eV ps^2/nm^2 ({mass / (constants.m_e / constants.e * 1e6):.4f} m_e), "
      f"kbar l0 = {kbar * 10:.2f}")

# kbar*l0 is about 2.5, so the spectrum is clipped at k > 0 and renormalised
columns, rows, s = run_packet(sys, 10.0, kbar, -0.05, 0.8, 400, min_lk=2.0)
print(f"clipped probability {s['clipped_mass']:.2e}, T_as = {s['T_as']:.3e}")
print(f"local time in the barrier   {s['tau_loc_tr']:.4f} ps")
print(f"asymptotic group time       {s['tau_as_tr']:.4f} ps")
print(f"free transit time           {s['tau_free']:.4f} ps")
print(f"CM speed before entry / asymptotic speed {s['acceleration_before']:.2f}")
print(f"reflected norm drift {s['R_drift']:.1e}, net change of transmitted norm {s['T_net_change']:.1e}")

print("\n   t (ps)   xbar_tr (nm)   free reference (nm)")
for r in rows[::40]:
    print(f"{r['t']:8.3f} {r['xbar_tr']:13.2f} {r['x_free_reference']:17.2f}")
