"""Bakry-Emery Gamma calculus and curvature-dimension conditions on finite graphs."""

from .conditions import (
    CurvatureResult,
    LocalForms,
    PositivityError,
    SlackReport,
    cd_check,
    cd_kmax,
    cd_nmin,
    cde_prime_slack,
    cde_slack,
    local_forms,
)
from .counterexample import (
    EgFamily,
    SearchConfig,
    SearchOutcome,
    eg_gamma2_closed,
    eg_graph,
    eg_inequality_gap,
    eg_lhs_closed,
    h_analysis,
    h_poly,
    q_poly_factor_check,
    repro_report,
    search_violation,
)
from .graph import (
    FunctionError,
    Graph,
    GraphError,
    VertexFunction,
    ball,
    format_function,
    parse_function,
    parse_graph,
    serialize_graph,
)
from .linalg import PencilError, jacobi_eigh, max_psd_shift, sym_geig
from .operators import (
    diff,
    gamma,
    gamma2,
    gamma2_sum_form,
    gamma_iter,
    gamma_product_form,
    gamma_sum_form,
    laplacian,
)

__version__ = "0.1.0"
