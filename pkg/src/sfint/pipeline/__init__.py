"""S-function search, 1ODE solving, characteristic reduction and verification."""

from .invade import (
    GeneralSolution, Report, dx_apply, gensol, hfunction, invade, nonlocal_symmetry_form, pdeassol,
    sfunction_sets, without_timing,
)
from .ode1 import HFunction, solve_1ode
from .reduce import EliminationFailed, compose_first_integral, reduce_characteristic
from .search import ALL, SearchOptions, sfunction_search
from .sfunctions import (
    DegenerateS, MissingSFunction, Ode1, SFunctionSet, associated_1odes, complete_sfunctions,
)
from .verify import (
    AllPointsDegenerate, ConstantResult, Verification, functionally_dependent,
    verify_compatibility, verify_first_integral,
)
