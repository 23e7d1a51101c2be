"""Dynamics of PT- and anti-PT-symmetric non-Hermitian qubit systems.

Closed evolution of the trace-normalized density matrix, open evolution under
pure dephasing through the corrected master equation, Liouvillian spectra,
and the trace-distance and concurrence fingerprints extracted from them.
"""

from ._accel import backend_name
from .closed_system import (Regime, RegimeLabel, SpectralState, classify_regime,
                            evolve_closed, integrate_closed, propagate_closed,
                            rhs_closed, spectral_decompose)
from .errors import (ConfigError, DefectiveMatrixError, NHDynError, NumericalError,
                     VanishingNormError)
from .linalg import EigenSystem, eig_general, expm, trace_norm, unvec, vec
from .metrics import (ExtractionResult, MetricKind, Trajectory, concurrence,
                      concurrence_series, extract_period, extract_relax_time,
                      trace_distance, trace_distance_series)
from .models import (QubitHamiltonian, Symmetry, apt_general, apt_two_qubit,
                     build_apt_qubit, build_apt_qubit_general, build_pt_qubit,
                     build_tensor_sum, pt_two_qubit, verify_symmetry)
from .open_system import (DephasingConfig, LiouvillianSpectrum, build_liouvillian,
                          evolve_open, freezing_diagnostic, integrate_open,
                          liouvillian_spectrum, propagate_open, relaxation_time_open,
                          rhs_open, spectrum_sweep)
from .states import bell_state, named_state, product_state

__version__ = "0.1.0"
