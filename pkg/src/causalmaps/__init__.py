"""Causal structure of two time-ordered qubits, witnessed and classified.

A causal map is the trace-one Choi state of the process taking the input
of the late laboratory to its output together with the early laboratory's
record.  This package builds such maps from small circuit fragments,
computes entanglement and covariance witnesses on them, classifies the
causal structure they certify, sweeps the built-in families, and
simulates finite-shot tomography of the whole pipeline.
"""

from .families import DEFAULT_AXES, family_fragment, family_map
from .linalg import (NumericalContractError, SubsystemLayout,
                     hermitian_eigenvalues, hermiticity_defect, kron,
                     partial_trace, partial_transpose, reorder_subsystems,
                     trace_norm)
from .model import (BlochVector, CausalMap, ConstructionError, FragmentSpec,
                    QubitChannel, TwoQubitGate, X_AXIS, Y_AXIS, Z_AXIS,
                    ZeroProbabilityError, apply_map, build_causal_map,
                    dephasing, delay_gate, eta_axes, partial_swap, phi_plus,
                    q_from_delay)
from .sweep import (DEFAULT_GRIDS, SWEEP_HEADER, SweepConfig, SweepRow,
                    read_sweep_csv, rows_to_json_dicts, run_sweep,
                    write_sweep_csv)
from .tomography import (CountRecord, FitResult, Prediction,
                         TomographySetting, bootstrap_errors, fit_theta,
                         outcome_probabilities, predict_from_base,
                         pseudo_records, read_counts_csv, reconstruct,
                         sample_counts, simulate_records, standard_settings,
                         tomography_report, write_counts_csv)
from .witnesses import (CLASS_LABELS, EPSILON_DEFAULT, InducedState,
                        ProjectivePair, WitnessReport, c_cd_witness,
                        classify, covariance_xy, entanglement_breaking_flags,
                        induced_state, negativity, prepared_state_CB,
                        reference_negativities, search_berkson,
                        search_pathway_cc, search_pathway_ce)

__version__ = "0.1.0"

__all__ = [
    "BlochVector", "CausalMap", "CLASS_LABELS", "ConstructionError",
    "CountRecord", "DEFAULT_AXES", "DEFAULT_GRIDS", "EPSILON_DEFAULT",
    "FitResult", "FragmentSpec", "InducedState", "NumericalContractError",
    "Prediction", "ProjectivePair", "QubitChannel", "SWEEP_HEADER",
    "SubsystemLayout", "SweepConfig", "SweepRow", "TomographySetting",
    "TwoQubitGate", "WitnessReport", "X_AXIS", "Y_AXIS", "Z_AXIS",
    "ZeroProbabilityError", "apply_map", "bootstrap_errors",
    "build_causal_map", "c_cd_witness", "classify", "covariance_xy",
    "delay_gate", "dephasing", "entanglement_breaking_flags", "eta_axes",
    "family_fragment", "family_map", "fit_theta", "hermitian_eigenvalues",
    "hermiticity_defect", "induced_state", "kron", "negativity",
    "outcome_probabilities", "partial_swap", "partial_trace",
    "partial_transpose", "phi_plus", "predict_from_base", "prepared_state_CB",
    "pseudo_records", "q_from_delay", "read_counts_csv", "read_sweep_csv",
    "reconstruct", "reference_negativities", "reorder_subsystems",
    "rows_to_json_dicts", "run_sweep", "sample_counts", "search_berkson",
    "search_pathway_cc", "search_pathway_ce", "simulate_records",
    "standard_settings", "tomography_report", "trace_norm", "write_counts_csv",
    "write_sweep_csv",
]
