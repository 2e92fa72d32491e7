"""Twisted convolution algebras of discrete étale groupoids.

Exact twisted convolution and involution, I-norms, regular-representation
norm brackets, finite block decompositions, Schur-type cohomology and a
one-sided C*-uniqueness certificate engine.
"""
from .algebra import (
    Element,
    FiberVector,
    c0_multiply,
    convolve,
    fiber_sum_function,
    i_norm,
    i_norm_hp,
    involve,
    iota_embed,
    psi_restrict,
    quotient_i_norm,
)
from .cocycle import (
    Bicharacter,
    FiniteTable,
    MackeyGroup,
    NotCohomologousAtLevel,
    OneCochain,
    PullbackFromGroup,
    Trivial,
    TwoCocycle,
    coboundary_from,
    cohomologous,
    mackey_group,
    restrict_to_fiber,
    validate_cocycle,
)
from .engine import analyze, analyze_wreath, classify_group, weak_containment_status
from .errors import TwistError
from .formats import build_model, load_cocycle_file, load_element_file, load_model_file
from .groupoid import (
    ArrowBundle,
    CylinderShift,
    FiniteExplicit,
    GroupBundle,
    GroupModel,
    Pair,
    ShiftArrow,
    TransformationFinite,
    Tri,
)
from .groups import build_group, cyclic, product_of_cyclics, zd
from .kernels import BACKEND
from .phase import Cyclo, Phase
from .rep import (
    decompose_finite_cstar,
    fourier_symbol_norm,
    operator_norm,
    reduced_norm_estimate,
    reduced_norm_sweep,
    regular_rep_matrix,
)
from .shift import Cylinder, Point

__version__ = "0.1.0"
