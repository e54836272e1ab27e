"""Curvature-dimension conditions CD, CDE and CDE' at a vertex.

Pointwise checks evaluate both sides of an inequality for one function.
Exact CD curvature instead works with the quadratic forms of Gamma and
Gamma_2 on the 2-ball of a vertex, where "for all f" becomes a
semidefiniteness question on small matrices.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, ball, require_total
from .linalg import PencilError, jacobi_eigh, max_psd_shift, sym_geig, PSD_TOL
from .operators import _gamma, _gamma2, _lap

Func = Mapping[str, float]

CD = "CD"
CDE = "CDE"
CDE_PRIME = "CDE'"


class PositivityError(ValueError):
    """A CDE-type condition was evaluated on a function that is not positive."""


@dataclass(frozen=True)
class LocalForms:
    """Matrices of Gamma, Gamma_2 and the Laplacian at ``center`` over its 2-ball.

    For a function restricted to ``support`` as a vector ``f``:
    ``f @ q_gamma @ f == Gamma(f)(center)``,
    ``f @ q_gamma2 @ f == Gamma_2(f)(center)`` and ``ell @ f == Delta f(center)``.
    """

    center: str
    support: tuple[str, ...]
    q_gamma: np.ndarray
    q_gamma2: np.ndarray
    ell: np.ndarray

    @property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.support)}

    def vector(self, f: Func) -> np.ndarray:
        return np.array([f[v] for v in self.support], dtype=float)


def _polarize(q, support) -> np.ndarray:
    n = len(support)
    zero = dict.fromkeys(support, 0.0)
    diag = np.empty(n)
    for i, v in enumerate(support):
        diag[i] = q({**zero, v: 1.0})
    m = np.diag(diag)
    for i in range(n):
        for j in range(i + 1, n):
            both = q({**zero, support[i]: 1.0, support[j]: 1.0})
            m[i, j] = m[j, i] = 0.5 * (both - diag[i] - diag[j])
    return m


def local_forms(g: Graph, x: str) -> LocalForms:
    support = tuple(ball(g, x, 2))
    zero = dict.fromkeys(support, 0.0)
    ell = np.array([_lap(g, {**zero, v: 1.0}, x) for v in support])
    q_gamma = _polarize(lambda f: _gamma(g, f, f, x), support)
    q_gamma2 = _polarize(lambda f: _gamma2(g, f, x), support)
    return LocalForms(x, support, q_gamma, q_gamma2, ell)


@dataclass(frozen=True)
class SlackReport:
    vertex: str
    condition: str
    K: float
    n: float
    components: dict[str, float]
    slack: float
    applicable: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "condition": self.condition,
            "K": self.K,
            "n": self.n,
            "components": dict(self.components),
            "slack": self.slack,
            "applicable": self.applicable,
            "reason": self.reason,
        }


def _check_n(n: float) -> float:
    n = float(n)
    if not n > 0:
        raise ValueError(f"dimension n must be positive, got {n}")
    return n


def _report(vertex, condition, K, n, gamma2_val, correction, dim_term, gam, applicable, reason):
    curv_term = K * gam
    components = {
        "gamma2": gamma2_val,
        "gamma_correction": correction,
        "rhs_dimension_term": dim_term,
        "rhs_curvature_term": curv_term,
    }
    slack = gamma2_val - correction - dim_term - curv_term
    return SlackReport(vertex, condition, float(K), n, components, slack, applicable, reason)


def cd_check(g: Graph, x: str, K: float, n: float, f: Func) -> SlackReport:
    """Slack of Gamma_2(f) >= (1/n)(Delta f)^2 + K Gamma(f) at ``x``."""
    n = _check_n(n)
    g.check(x)
    require_total(f, g)
    lap = _lap(g, f, x)
    return _report(
        x, CD, K, n, _gamma2(g, f, x), 0.0, lap * lap / n, _gamma(g, f, f, x), True, ""
    )


def _require_positive(g: Graph, f: Func, x: str) -> None:
    bad = [v for v in ball(g, x, 2) if not f[v] > 0]
    if bad:
        raise PositivityError(f"function must be positive on the 2-ball of {x!r}; "
                              f"nonpositive at {', '.join(bad)}")


def gamma_correction(g: Graph, f: Func, x: str) -> float:
    """Gamma(f, Gamma(f)/f)(x); needs ``f > 0`` on the 1-ball of ``x``."""
    one_ball = (x, *g.neighbors(x))
    ratio = {v: _gamma(g, f, f, v) / f[v] for v in one_ball}
    return _gamma(g, f, ratio, x)


def _log_lap(g: Graph, f: Func, x: str) -> float:
    fx = math.log(f[x])
    return g.mu(x) * sum(math.log(f[y]) - fx for y in g.neighbors(x))


def _cde_like(g, x, K, n, f, prime: bool, checked: bool = True) -> SlackReport:
    n = _check_n(n)
    if checked:
        g.check(x)
        require_total(f, g)
        _require_positive(g, f, x)
    lap = _lap(g, f, x)
    if prime:
        dim_term = f[x] ** 2 * _log_lap(g, f, x) ** 2 / n
    else:
        dim_term = lap * lap / n
    applicable = lap < 0
    reason = "" if applicable else f"Delta f(x) = {lap:.6g} >= 0, condition is vacuous"
    return _report(
        x, CDE_PRIME if prime else CDE, K, n,
        _gamma2(g, f, x), gamma_correction(g, f, x), dim_term, _gamma(g, f, f, x),
        applicable, reason,
    )


def cde_slack(g: Graph, x: str, K: float, n: float, f: Func) -> SlackReport:
    """CDE slack: Gamma_2(f) - Gamma(f, Gamma(f)/f) - (1/n)(Delta f)^2 - K Gamma(f)."""
    return _cde_like(g, x, K, n, f, prime=False)


def cde_prime_slack(g: Graph, x: str, K: float, n: float, f: Func) -> SlackReport:
    """CDE' slack, with dimension term (1/n) f(x)^2 (Delta log f)(x)^2.

    The logarithm is natural and its Laplacian carries the usual 1/d_x.
    """
    return _cde_like(g, x, K, n, f, prime=True)


@dataclass(frozen=True)
class CurvatureResult:
    """Exact CD data at a vertex.

    ``n_min_status`` is ``"finite"``, ``"none"`` (no n makes CD(0, n) hold)
    or ``"any"`` (the Laplacian functional vanishes, every n works).
    ``k_max`` is ``-inf`` when no curvature bound holds.
    """

    vertex: str
    n_min: float | None = None
    n_min_status: str = ""
    k_max: float | None = None
    n: float | None = None
    notes: list[str] = field(default_factory=list)


def cd_nmin(g: Graph, x: str, *, tol: float = PSD_TOL) -> CurvatureResult:
    """Smallest n for which Gamma_2(f)(x) >= (1/n)(Delta f)^2(x) for every f."""
    forms = local_forms(g, x)
    ell = forms.ell
    q2 = forms.q_gamma2
    if not np.any(np.abs(ell) > 0):
        return CurvatureResult(x, None, "any", notes=["Laplacian functional vanishes"])
    try:
        pencil = sym_geig(np.outer(ell, ell), q2, tol=tol)
    except PencilError:
        w = jacobi_eigh(q2)[0][0]
        return CurvatureResult(x, None, "none", notes=[f"Gamma_2 form not PSD (min eigenvalue {w:.3e})"])
    if not pencil.a_psd_on_kernel:
        return CurvatureResult(x, None, "none")
    # ell must vanish on ker(Gamma_2): otherwise some f has Gamma_2 = 0 < (Delta f)^2
    w, v = jacobi_eigh(q2)
    scale = max(np.max(np.abs(w)), 1.0)
    kernel = v[:, w <= tol * scale]
    if kernel.size and np.max(np.abs(ell @ kernel)) > 1e-8 * np.linalg.norm(ell):
        return CurvatureResult(x, None, "none", notes=["Laplacian nonzero on ker(Gamma_2)"])
    top = float(pencil.eigenvalues[-1]) if pencil.eigenvalues.size else 0.0
    if top <= 0:
        return CurvatureResult(x, None, "any")
    return CurvatureResult(x, top, "finite")


def cd_kmax(g: Graph, x: str, n: float = math.inf, *, tol: float = PSD_TOL) -> CurvatureResult:
    """Largest K such that CD(K, n) holds at ``x`` for every function.

    ``n = inf`` drops the dimension term.
    """
    n = _check_n(n)
    forms = local_forms(g, x)
    a = forms.q_gamma2 - np.outer(forms.ell, forms.ell) / n
    k = max_psd_shift(a, forms.q_gamma, tol=tol)
    return CurvatureResult(x, k_max=k, n=n)
