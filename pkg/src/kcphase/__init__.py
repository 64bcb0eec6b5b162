"""Compile random k-SAT instances into OBDDs, leveled DFAs and decision-DNNFs and study their sizes."""

from .cnf import (CnfFormula, GenParams, adjoint_nogood, brute_force_count, emit_dimacs, evaluate,
                  generate_instance, parse_dimacs)
from .dfa import (LevelDfa, accepting_path_count, compile_cnf_to_dfa, conjoin_clause, dfa_from_obdd,
                  dfa_state_count, full_dfa, minimize)
from .dnnf import (DnnfDag, check_decomposability, check_determinism, compile_cnf_to_dnnf,
                   dnnf_model_count, dnnf_node_count)
from .estimators import CompiledSizeTransformer, GrowthRegressor, PeakLocator, compile_instance
from .obdd import (ObddManager, SizeCapError, SizeReport, apply_and, apply_or, compile_cnf_to_obdd,
                   mk_node, obdd_model_count, obdd_node_count)
from .pathstruct import (PhaseExperimentConfig, adjoint_edges, classify_path, fully_multi_interchangeable,
                         has_multi_interchangeable_path, phase_experiment, weak_multi_interchangeable)
from .analysis import detect_peak, fit_growth
from .sweep import SweepConfig, run_sweep

__version__ = "0.1.0"
