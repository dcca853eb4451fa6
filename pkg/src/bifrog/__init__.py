"""Critical-probability bounds and simulation for the frog model with
death on biregular trees."""

from .bounds import (AsymptoticRow, BoundsReport, DiskSeries, MomentMatrix,
                     NoRootError, RootResult, TABLE_REFERENCE, TABLE_ROWS,
                     asymptotic_check, bounds_report, disk_mean_offspring,
                     f_n_value, f_value, lb_alves, lb_biregular,
                     moment_matrix, spectral_radius, table1, ub_closed,
                     ub_root, ub_root_n)
from .hitting import (HitEstimate, HittingPair, alpha, beta, edge_open_prob,
                      hitting_pair, mc_hit_neighbor, system_residuals)
from .laws import (Bernoulli, Constant, Geometric, InitLaw, Poisson,
                   describe_law, parse_law)
from .pathprob import (PathOpenEstimate, PathOpenQuery, PathOpenTables,
                       bernoulli_path_open, bernoulli_path_open_at,
                       mc_path_open, path_open_prob)
from .sim import (GwOutcome, RangeDiskReport, SimConfig, SimOutcome,
                  SimResourceError, SurvivalEstimate, estimate_survival,
                  gw_progeny_masses, mc_range_vs_disk, run_frog,
                  run_multitype_gw, sweep, wilson_interval)
from .tree import (ROOT, TreeParams, VertexAddr, children, degree, distance,
                   neighbors, num_children, parent, parity, validate_addr)

__version__ = "0.1.0"
