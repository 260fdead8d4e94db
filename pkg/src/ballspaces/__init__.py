"""Fixed-point solvers and verifiers over ball spaces.

Subpackages by structure: :mod:`ballspaces.core` (abstract ball spaces and
the generic solvers), :mod:`ballspaces.posets` (value posets),
:mod:`ballspaces.ultrametric` (poset-valued ultrametrics and attractors),
:mod:`ballspaces.padics` (exact residue arithmetic and Hensel lifting),
:mod:`ballspaces.banach` (exact-rational contraction iteration),
:mod:`ballspaces.hahn` (truncated power series over ordered groups),
:mod:`ballspaces.topology` (finite topological spaces),
:mod:`ballspaces.sweeps` and :mod:`ballspaces.scenarios` (verification
drivers), :mod:`ballspaces.cli` (command line).
"""

from .core import (
    BallAssignment,
    BallSpace,
    ConditionCheck,
    ConditionReport,
    FixedPointReport,
    Nest,
    PresentedBallSpace,
    SelfMap,
    check_c_conditions,
    check_cu_conditions,
    check_sc_axioms,
    cofinal_subnest,
    is_f_contracting,
    is_spherically_complete,
    preimage_nest,
    preimage_space,
    solve_gfpt2,
    solve_nfpt1,
    solve_nfpt2,
)
from .posets import PosetValue, ValuePoset, comparable, leq, product_poset

__all__ = [
    "BallAssignment",
    "BallSpace",
    "ConditionCheck",
    "ConditionReport",
    "FixedPointReport",
    "Nest",
    "PosetValue",
    "PresentedBallSpace",
    "SelfMap",
    "ValuePoset",
    "check_c_conditions",
    "check_cu_conditions",
    "check_sc_axioms",
    "cofinal_subnest",
    "comparable",
    "is_f_contracting",
    "is_spherically_complete",
    "leq",
    "preimage_nest",
    "preimage_space",
    "product_poset",
    "solve_gfpt2",
    "solve_nfpt1",
    "solve_nfpt2",
]
