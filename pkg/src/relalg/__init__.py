"""Workbench for finite symmetric integral relation algebras.

Builds the two-parameter L(p,n) family and its fused subalgebras, checks
the algebra axioms exhaustively, constructs and verifies representations
(affine planes, doubling, coordinatewise powers, seeded random doubled
structures), evaluates the probabilistic sufficiency bounds, and runs
the few-generator embedding and equation-length pipelines.
"""

from .algebra import (
    AxiomReport,
    Element,
    Embedding,
    FiniteRelationAlgebra,
    SubalgebraDescription,
    check_axioms,
    check_embedding,
    generate_subalgebra,
)
from .errors import ParseError, ResourceBudgetError
from .gf import FieldSpec, field_make, is_prime_power
from .lpn import build_fused, build_lpn, fusion_embedding, notrap_flag
from .structures import (
    AtomLabeling,
    ImageRelation,
    Power,
    VerifyReport,
    Xi,
    build_affine,
    build_doubled,
    build_power,
    degree_audit,
    image,
    network_check,
    verify_full,
    verify_weak,
)
from .terms import (
    Equation,
    equation_length,
    eval_term,
    falsify,
    parse,
    parse_equation,
    parse_term,
    print_equation,
    print_term,
)
from .xi import (
    BoundReport,
    PartitionRecipe,
    XiFastChecker,
    build_xi,
    check_xi_fast,
    eval_bounds,
    eval_bounds_power,
    montecarlo,
    search_weakrep,
    sufficiency_thresholds,
)
from .complexity import (
    algebra_size,
    beta_lower_bound,
    build_gamma_embedding,
    choose_params,
    pigeonhole_pair,
)

__version__ = "0.1.0"
