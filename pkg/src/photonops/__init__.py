"""Photon addition/subtraction on thermal and even coherent seeds.

Closed-form photon statistics, Wigner functions and Mandel Q, each checked
against a truncated Fock-space reference.
"""
from .errors import (CutoffInadequate, CutoffOverflow, NonConvergence, NullState, PhotonOpsError,
                     SingularParameter, UndefinedQ, UnsupportedBranch)
from .fock import (HARD_CEILING, DensityMatrix, NormalizationRecord, OpSequence, Order, PureState,
                   apply_annihilation, apply_creation, choose_cutoff, moment, trace_distance, transform)
from .observables import (QResult, WignerGrid, ecs_moments_closed, mandel_q, mandel_q_closed_ecs,
                          mandel_q_closed_thermal, pnd, pnd_closed, pnd_closed_array, prepare_state,
                          wigner, wigner_closed, wigner_grid, wigner_many)
from .states import Family, StateSpec, even_coherent, norm_closed, thermal

__version__ = "0.1.0"
