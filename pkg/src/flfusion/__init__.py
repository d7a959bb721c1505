"""Fusion products of generalized Demazure modules for current algebras.

Root data and the extended affine Weyl group, graded characters with Demazure
operators, explicit g[t]-modules with exact linear algebra, fusion products,
and Q-system / cluster checks.
"""

from __future__ import annotations

from .charring import (GradedCharacter, affine_demazure_character, demazure_operator,
                       generalized_demazure_character, weyl_character)
from .currentmod import (ExplicitModule, TensorModule, bracket_audit, cyclic_closure,
                         evaluation_shift, irreducible_evaluation_module, tensor)
from .errors import (CyclicityError, DomainError, FusionError, InconsistencyError,
                     NonClosureError, TruncationError, UnsupportedError)
from .fusion import (chain_character, check_associativity, check_parameter_independence,
                     demazure_module_explicit, fusion_module, fusion_product,
                     generalized_demazure_oracle)
from .qcluster import ClusterSeed, mutate, qsystem_check, qsystem_exchange_match, qsystem_seed
from .rootdata import RootSystem, build_root_system

__all__ = [
    "ClusterSeed", "CyclicityError", "DomainError", "ExplicitModule", "FusionError",
    "GradedCharacter", "InconsistencyError", "NonClosureError", "RootSystem", "TensorModule",
    "TruncationError", "UnsupportedError", "affine_demazure_character", "bracket_audit",
    "build_root_system", "chain_character", "check_associativity",
    "check_parameter_independence", "cyclic_closure", "demazure_module_explicit",
    "demazure_operator", "evaluation_shift", "fusion_module", "fusion_product",
    "generalized_demazure_character", "generalized_demazure_oracle",
    "irreducible_evaluation_module", "mutate", "qsystem_check", "qsystem_exchange_match",
    "qsystem_seed", "tensor", "weyl_character",
]
