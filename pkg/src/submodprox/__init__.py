"""Proximal operators of submodular penalties via parametric max-flow."""

from .errors import (CapacityError, ConstructionError, ContractViolation, InputError,
                     NumericalError, SubmodProxError, UnsupportedPenaltyError)
from .maxflow import Cut, FlowState, contract, max_flow, min_cut, warm_restart
from .netrep import (FlowNetwork, NondecreasingShift, combine, make_nondecreasing, represent,
                     represent_negative_terms, represent_order3, represent_truncation)
from .paraflow import CutChain, alpha_bounds, recover_tau, solve_parametric
from .prox import (ProxProblem, ProxResult, SolveReport, penalty_value_linf, phi, prox, psi,
                   psi_prime)
from .separable import Pieces, balanced_alpha
from .setfn import (CubicMobius, GraphCut, GroupCover, HypergraphCut, MobiusTable, SetFunction,
                    Shifted, Sum, WeightedTruncation, is_submodular, lovasz, mobius)
from .solver import LeastSquaresTask, fista

__all__ = [
    "CapacityError", "ConstructionError", "ContractViolation", "InputError", "NumericalError",
    "SubmodProxError", "UnsupportedPenaltyError",
    "Cut", "FlowState", "contract", "max_flow", "min_cut", "warm_restart",
    "FlowNetwork", "NondecreasingShift", "combine", "make_nondecreasing", "represent",
    "represent_negative_terms", "represent_order3", "represent_truncation",
    "CutChain", "alpha_bounds", "recover_tau", "solve_parametric",
    "ProxProblem", "ProxResult", "SolveReport", "penalty_value_linf", "phi", "prox", "psi",
    "psi_prime", "Pieces", "balanced_alpha",
    "CubicMobius", "GraphCut", "GroupCover", "HypergraphCut", "MobiusTable", "SetFunction",
    "Shifted", "Sum", "WeightedTruncation", "is_submodular", "lovasz", "mobius",
    "LeastSquaresTask", "fista",
]
