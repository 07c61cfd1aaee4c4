"""Compact linearization of binary quadratic programs with positive linear equations."""

from .coverage import (
    CoveragePlan,
    CoverageStats,
    build_selection_milp,
    check_conditions,
    closure_disjoint,
    full_plan,
    make_coverage,
    make_plan,
    solve_selection,
    support_plan,
)
from .errors import CompactLinError
from .io import export_lp, parse_instance, serialize_instance
from .linearizer import compact_linearize, relax, standard_linearize
from .linmodel import LinConstraint, LinModel, LinVar
from .model import Instance, LinearEquation, SideConstraint, brute_force_feasible, validate_instance
from .optcore import solve_lp, solve_milp
from .verifier import compare_bounds, structural_match, verify_dominance, verify_theorem1

__version__ = "0.1.0"
