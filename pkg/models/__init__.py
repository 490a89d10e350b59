from .lattice import State, LymReport, leq, s_state, is_antichain, lym_report, sperner_bound
from .local_functions import LocalFunction, PartialFunction, MonotonicityVerdict, evaluate, is_monotone_total, is_monotone_partial, monotone_extend
from .schedules import UpdateSchedule, AlphaClass, ThetaSet, act_state, act_schedule, tau_shift, alpha_class, orbit_S, theta, theta_disjointness_check
from .system import Graph, SystemDescription, Driver, Trajectory, inflate_step, sds_step, pds_step, trajectory
from .phase_space import PhaseSpace, Classification, LatticeExtrema, build, goe_states, fixed_points, limit_cycles, lattice_extrema, classify_state, shift_homomorphism_check, cycle_equivalence_check, max_cycle_audit
from .transforms import SequentializationResult, parallelize, derive_sequentialization, goles_map, goles_pds
from .audit import TheoremAudit
