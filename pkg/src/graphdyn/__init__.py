"""Sparse W-random graphs, coupled dynamics on them and their continuum limit."""
from .errors import ConfigError, GraphdynError
from .graphon import (AssumptionReport, Block, Constant, DensitySchedule, FixedDensity,
                      PowerLaw, check_assumptions, degree_g, eval_u, eval_w, nu_inf,
                      total_mass, truncate_w)
from .sampler import (SampledGraph, build_grid, degree_statistics, edge_probability,
                      expected_degrees, sample_graph)
from .operators import (IDENTITY, SINE, CouplingMatrix, apply_coupling, apply_sampled_coupling,
                        averaged_matrix, galerkin_matrix, get_coupling, register_coupling)
from .dynamics import (InitialCondition, ModelConfig, Reaction, Trajectory, cell_average_ic,
                       continuum_reference, integrate, rhs)
from .analysis import (ErrorReport, dissipation_identity_check, gn_norm, kernel_l4_distance,
                       restrict_to_coarse, spacetime_l2_error, step_l2_norm, sup_norm)

__version__ = "0.1.0"
