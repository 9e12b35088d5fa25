"""Bicomplex partial b-metric spaces, common fixed points and Urysohn systems."""

from .bicomplex import E1, E2, I1, I2, J, ONE, ZERO, Bicomplex, OrderRelation, compare, leq
from .errors import BicpbError
from .fpsolve import (ContractionParams, certify_fixed_point, check_rational_contraction,
                      check_weakly_increasing, iterate_alternating, iterate_on_space)
from .pbms import (AxiomReport, FiniteSpace, MetricFn, check_axioms, check_generalized_axioms,
                   minimal_coefficient)
from .urysohn import GridFunction, KernelSpec, make_grid, solve_system

__all__ = [
    "Bicomplex", "OrderRelation", "compare", "leq", "ZERO", "ONE", "I1", "I2", "J", "E1", "E2",
    "BicpbError",
    "FiniteSpace", "MetricFn", "AxiomReport", "check_axioms", "check_generalized_axioms",
    "minimal_coefficient",
    "ContractionParams", "check_rational_contraction", "check_weakly_increasing",
    "iterate_alternating", "iterate_on_space", "certify_fixed_point",
    "make_grid", "GridFunction", "KernelSpec", "solve_system",
]
