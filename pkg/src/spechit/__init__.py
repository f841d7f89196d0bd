"""spechit: spectral and hitting-time analysis of finite Markov chains.

Core objects: validated chains (:mod:`spechit.chain`), seeded family
generators, eigenstructure and profiles (:mod:`spechit.spectral`),
hitting-time solves (:mod:`spechit.hitting`), geometric time-averaged
kernels (:mod:`spechit.geometric`), the super-level-set construction
(:mod:`spechit.levelset`), birth-death statistics, Monte-Carlo oracles,
and the inequality verification harness (:mod:`spechit.harness`).
"""

from ._kernels import IMPL as kernel_backend
from .chain import (Chain, SubsetMask, SubstochasticKernel, build_chain,
                    conditioned_distribution, connected_subsets, continuize,
                    load_chain, make_subset, restrict, save_chain,
                    time_reversal)
from .generators import (FamilySpec, biased_cycle, birth_death, complete,
                         pendant_path_example, lazy_path, lazy_rw_graph,
                         random_birth_death, two_state)
from .geometric import (geometric_average, multiplicative_reversibilization,
                        operator_norm_minus_pi, pseudo_gap, rel_geom)
from .hitting import (best_nested_exit, expected_hitting, kappa_profile,
                      stationary_exit, t_H_pi, tail_mixture)
from .levelset import find_L, qs_density
from .montecarlo import simulate_geometric_step, simulate_hitting, simulate_qs_decay
from .spectral import (Profile, QuasiStationary, ReversibleSpectrum,
                       gap_witness_set, isoperimetric_profile, mixing_times,
                       quasi_stationary, relaxation_time, reversible_spectrum,
                       spectral_profile, spectral_profile_hat)

__version__ = "0.1.0"

__all__ = [
    "Chain", "SubsetMask", "SubstochasticKernel", "FamilySpec", "Profile",
    "QuasiStationary", "ReversibleSpectrum",
    "build_chain", "time_reversal", "restrict", "conditioned_distribution",
    "connected_subsets", "continuize", "make_subset", "load_chain",
    "save_chain", "two_state", "birth_death", "random_birth_death",
    "lazy_path", "biased_cycle", "complete", "lazy_rw_graph",
    "pendant_path_example", "reversible_spectrum", "relaxation_time",
    "quasi_stationary", "spectral_profile", "spectral_profile_hat",
    "isoperimetric_profile", "gap_witness_set", "mixing_times",
    "expected_hitting", "stationary_exit", "t_H_pi", "kappa_profile",
    "best_nested_exit", "tail_mixture", "qs_density", "find_L",
    "geometric_average", "multiplicative_reversibilization",
    "operator_norm_minus_pi", "rel_geom", "pseudo_gap",
    "simulate_hitting", "simulate_geometric_step", "simulate_qs_decay",
    "kernel_backend", "__version__",
]
