"""Scattering, subprocess wave functions and characteristic times for a symmetric double rectangular barrier."""
__version__ = "0.1.0"

from .scatter import (BarrierSystem, NumericalFailure, OneBarrierParams, StationaryField, TransferMatrix,
                      TwoBarrierParams, WaveNumberPoint, compose_two_barrier, eval_total, find_resonances,
                      one_barrier_params, oracle_amplitudes, total_field, transfer_matrix, two_barrier_matrix)
from .swf import SwfField, current, eval_swf, ref_field
from .chartimes import (buttiker_dwell, derivatives, dwell_quadrature, dwell_times, opaque_limit_report,
                        phase_and_group_times, times, x_start_closed, tau_as_closed)
from .wavepacket import (GaussianSpectrum, PacketModel, asymptotic_group_times_packet, build_spectrum,
                         cm_track, evolve, local_group_times, norm_trace)
from .superposition import current_audit, naive_split

__all__ = [name for name in dir() if not name.startswith("_")]
