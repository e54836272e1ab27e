"""Discrete Laplacian and the carre du champ operators Gamma, Gamma_i, Gamma_2.

All operators use the normalized measure ``mu_x = 1/d_x``. The definitional
routines only read function values on the ball the operator actually
depends on, so they accept partial mappings internally; the public entry
points insist on functions total on the graph.
"""

from __future__ import annotations

from collections.abc import Mapping

from .graph import Graph, require_total

Func = Mapping[str, float]

MAX_GAMMA_ORDER = 3


def _lap(g: Graph, f: Func, x: str) -> float:
    fx = f[x]
    return g.mu(x) * sum(f[y] - fx for y in g.neighbors(x))


def _lap_on(g: Graph, f: Func, support) -> dict[str, float]:
    return {v: _lap(g, f, v) for v in support}


def _gamma(g: Graph, f: Func, h: Func, x: str) -> float:
    # 1/2 (Delta(fh) - f Delta h - h Delta f) at x
    nbrs = g.neighbors(x)
    mu = g.mu(x)
    fx, hx = f[x], h[x]
    lap_fh = mu * sum(f[y] * h[y] - fx * hx for y in nbrs)
    lap_h = mu * sum(h[y] - hx for y in nbrs)
    lap_f = mu * sum(f[y] - fx for y in nbrs)
    # grouped so that swapping f and h is bit-for-bit symmetric
    return 0.5 * (lap_fh - (fx * lap_h + hx * lap_f))


def _gamma2(g: Graph, f: Func, x: str) -> float:
    one_ball = (x, *g.neighbors(x))
    gam = {v: _gamma(g, f, f, v) for v in one_ball}
    lap_f = _lap_on(g, f, one_ball)
    return 0.5 * _lap(g, gam, x) - _gamma(g, f, lap_f, x)


def diff(f: Func, x: str, y: str) -> float:
    """Difference in valuations f(x, y) = f(y) - f(x)."""
    for v in (x, y):
        if v not in f:
            raise KeyError(f"unknown vertex {v!r}")
    return f[y] - f[x]


def laplacian(g: Graph, f: Func, x: str) -> float:
    g.check(x)
    require_total(f, g)
    return _lap(g, f, x)


def gamma(g: Graph, f: Func, h: Func, x: str) -> float:
    """Gamma(f, h)(x) from its definition through Laplacians of products."""
    g.check(x)
    require_total(f, g)
    require_total(h, g)
    return _gamma(g, f, h, x)


def gamma_sum_form(g: Graph, f: Func, x: str) -> float:
    """Gamma(f)(x) = 1/2 mu_x sum_{y ~ x} f(x, y)^2."""
    g.check(x)
    require_total(f, g)
    fx = f[x]
    return 0.5 * g.mu(x) * sum((f[y] - fx) ** 2 for y in g.neighbors(x))


def gamma_product_form(g: Graph, f: Func, h: Func, x: str) -> float:
    """Gamma(f, h)(x) = 1/2 mu_x sum_{y ~ x} f(x, y) h(x, y)."""
    g.check(x)
    require_total(f, g)
    require_total(h, g)
    fx, hx = f[x], h[x]
    return 0.5 * g.mu(x) * sum((f[y] - fx) * (h[y] - hx) for y in g.neighbors(x))


def _whole_lap(g: Graph, f: Func) -> dict[str, float]:
    return _lap_on(g, f, g.vertices)


def _gamma_iter_all(g: Graph, i: int, f: Func, h: Func) -> dict[str, float]:
    if i == 0:
        return {v: f[v] * h[v] for v in g.vertices}
    prev = _gamma_iter_all(g, i - 1, f, h)
    lap_prev = _whole_lap(g, prev)
    left = _gamma_iter_all(g, i - 1, f, _whole_lap(g, h))
    right = _gamma_iter_all(g, i - 1, _whole_lap(g, f), h)
    return {v: 0.5 * (lap_prev[v] - left[v] - right[v]) for v in g.vertices}


def gamma_iter(g: Graph, i: int, f: Func, h: Func, x: str, *, cap: int = MAX_GAMMA_ORDER) -> float:
    """Iterated operator Gamma_i(f, h)(x) with Gamma_0(f, h) = fh.

    Each level branches three ways, so the order is capped.
    """
    if not isinstance(i, int) or i < 0:
        raise ValueError(f"order must be a nonnegative integer, got {i!r}")
    if i > cap:
        raise ValueError(f"order {i} exceeds cap {cap}")
    g.check(x)
    require_total(f, g)
    require_total(h, g)
    return _gamma_iter_all(g, i, f, h)[x]


def gamma2(g: Graph, f: Func, x: str) -> float:
    """Gamma_2(f)(x) = 1/2 Delta Gamma(f)(x) - Gamma(f, Delta f)(x)."""
    g.check(x)
    require_total(f, g)
    return _gamma2(g, f, x)


def _gamma2_sum(g: Graph, f: Func, x: str) -> float:
    fx = f[x]
    lap = _lap(g, f, x)
    inner = 0.0
    for y in g.neighbors(x):
        fy = f[y]
        inner += g.mu(y) * sum((f[z] - fy) ** 2 - 0.5 * (f[z] - fx) ** 2 for z in g.neighbors(y))
    # the factor 1/2 on the double sum is what the derivation actually yields
    return 0.5 * lap * lap + 0.5 * g.mu(x) * inner


def gamma2_sum_form(g: Graph, f: Func, x: str) -> float:
    """Closed double-sum form of Gamma_2(f)(x) over the 2-ball."""
    g.check(x)
    require_total(f, g)
    return _gamma2_sum(g, f, x)
