"""Simulation and analysis of noisy four-photon polarization entanglement."""

__version__ = "0.1.0"

from .errors import ArgumentError, DataError, FitError, NumericError
from .qmat import QubitPartition, herm_eig, kron, partial_trace, partial_transpose, psd_sqrt
from .states import (bell_state, key_basis_state, pauli, private_schedule, private_state, smolin_schedule,
                     smolin_state, apply_schedule)
from .tomography import ExperimentConfig, TomographyDataset, mle_reconstruct, simulate_counts, linear_inversion
from .analysis import chsh_optimal, chsh_value, fidelity, ppt_spectrum, witness_expectation
from .hom import HomCurve, HomFit, fit_gaussian_dip, hom_model
