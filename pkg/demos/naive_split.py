"""Why the obvious two-piece split of a scattering state is not a causal decomposition.

Each piece is a valid stationary solution that conserves current on its own,
but the current it brings in differs from the current its channel carries
out by T(1 - T) times the incident flux.

Run:  python demos/naive_split.py
"""
import numpy as np

from tunneltime import BarrierSystem, find_resonances
from tunneltime.superposition import current_audit, naive_split, pair_for_transmission, split_for_system

print("  T     incident(1)  transmitted  mismatch  T(1-T)")
for T in (0.1, 0.5, 0.9, 1.0):
    a = current_audit(naive_split(*pair_for_transmission(T, 0.3, -1.1)))
    print(f"{T:4.1f}  {a.incident_1:11.4f}  {a.transmitted:11.4f}  {a.mismatch_tr:8.4f}  "
          f"{a.expected_mismatch:6.4f}")

sys = BarrierSystem(V0=1.0, d=1.0, L=2.0, a1=1.0)
print("\ntwo-barrier system, generic k:", current_audit(split_for_system(sys, 0.5)).summary)
kr = find_resonances(sys, 0.1, 0.99)[0]
print(f"two-barrier system, resonant k = {kr:.6f}:", current_audit(split_for_system(sys, kr)).summary)
