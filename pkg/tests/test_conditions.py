import math

import numpy as np
import pytest
from scipy.optimize import minimize, minimize_scalar

from graphcd import (
    Graph,
    PositivityError,
    VertexFunction,
    cd_check,
    cd_kmax,
    cd_nmin,
    cde_prime_slack,
    cde_slack,
    gamma,
    gamma2,
    laplacian,
    local_forms,
)

from conftest import admissible, random_function, random_graph


def test_local_forms_eg(eg, rng):
    forms = local_forms(eg, "x")
    assert forms.support == ("x", "y", "z")
    np.testing.assert_allclose(forms.ell, [-1, 1, 0])
    for _ in range(100):
        f = random_function(rng, eg)
        v = forms.vector(f)
        assert v @ forms.q_gamma @ v == pytest.approx(0.5 * (f["y"] - f["x"]) ** 2, rel=1e-12, abs=1e-12)
        assert v @ forms.q_gamma @ v == pytest.approx(gamma(eg, f, f, "x"), rel=1e-12, abs=1e-12)


def test_local_forms_invariants(rng):
    for _ in range(40):
        g = random_graph(rng)
        for x in g.vertices:
            forms = local_forms(g, x)
            ones = np.ones(len(forms.support))
            np.testing.assert_allclose(forms.q_gamma, forms.q_gamma.T, atol=1e-15)
            np.testing.assert_allclose(forms.q_gamma2, forms.q_gamma2.T, atol=1e-15)
            np.testing.assert_allclose(forms.q_gamma2 @ ones, 0, atol=1e-12)
            np.testing.assert_allclose(forms.q_gamma @ ones, 0, atol=1e-12)
            assert abs(forms.ell @ ones) < 1e-12
            assert np.linalg.eigvalsh(forms.q_gamma)[0] >= -1e-12


def test_form_consistency(rng):
    for _ in range(10):
        g = random_graph(rng)
        for x in g.vertices:
            forms = local_forms(g, x)
            for _ in range(100):
                f = random_function(rng, g)
                v = forms.vector(f)
                s = max(1.0, float(v @ v))
                assert v @ forms.q_gamma @ v == pytest.approx(gamma(g, f, f, x), rel=1e-11, abs=1e-11 * s)
                assert v @ forms.q_gamma2 @ v == pytest.approx(gamma2(g, f, x), rel=1e-11, abs=1e-11 * s)
                assert forms.ell @ v == pytest.approx(laplacian(g, f, x), rel=1e-11, abs=1e-11 * s)


def test_cd_check_examples(eg, fn, rng):
    f = fn(1, 2, 3)
    rep = cd_check(eg, "x", 0, 2, f)
    assert abs(rep.slack) <= 1e-12 and rep.applicable and rep.condition == "CD"
    assert cd_check(eg, "x", 0, 1.9, f).slack == pytest.approx(0.5 - 1 / 1.9, abs=1e-12)
    assert cd_check(eg, "x", 0, 1.9, f).slack < 0
    for K in (-3.0, 0.0, 7.5):
        assert cd_check(eg, "y", K, 2, fn(4, 4, 4)).slack == 0
    with pytest.raises(ValueError):
        cd_check(eg, "x", 0, 0, f)
    c = rep.components
    assert rep.slack == pytest.approx(c["gamma2"] - c["gamma_correction"] - c["rhs_dimension_term"] - c["rhs_curvature_term"], abs=1e-12)


def test_cd_nmin_eg_and_edge(eg, edge):
    r = cd_nmin(eg, "x")
    assert r.n_min_status == "finite" and r.n_min == pytest.approx(2.0, abs=1e-9)
    for v in "ab":
        assert cd_nmin(edge, v).n_min == pytest.approx(1.0, abs=1e-9)


def test_cd_nmin_eg_at_y_vs_brute_force(eg):
    # f(y) = 0, (f(x), f(z)) = (cos t, sin t): the ratio is scale free
    def neg_ratio(t):
        f = VertexFunction({"x": math.cos(t), "y": 0.0, "z": math.sin(t)})
        return -laplacian(eg, f, "y") ** 2 / gamma2(eg, f, "y")

    grid = np.linspace(0, math.pi, 2001)
    t0 = grid[np.argmin([neg_ratio(t) for t in grid])]
    res = minimize_scalar(neg_ratio, bounds=(t0 - 0.01, t0 + 0.01), method="bounded",
                          options={"xatol": 1e-12})
    assert cd_nmin(eg, "y").n_min == pytest.approx(-res.fun, abs=1e-8)


def _max_ratio(g, x, rng, starts=8):
    forms = local_forms(g, x)
    q2, ell = forms.q_gamma2, forms.ell

    def neg(v):
        return -(ell @ v) ** 2 / (v @ q2 @ v)

    best = None
    for _ in range(starts):
        r = minimize(neg, rng.normal(size=len(ell)), method="BFGS", options={"gtol": 1e-12})
        if best is None or r.fun < best.fun:
            best = r
    return -best.fun, best.x, forms


def test_cd_nmin_consistency(rng):
    checked = 0
    while checked < 8:
        g = random_graph(rng, 6)
        x = g.vertices[0]
        res = cd_nmin(g, x)
        if res.n_min_status != "finite":
            continue
        n_min = res.n_min
        for _ in range(10000 // 8):
            f = random_function(rng, g)
            assert cd_check(g, x, 0, n_min * (1 + 1e-6), f).slack >= -1e-9
        ratio, v, forms = _max_ratio(g, x, rng)
        witness = VertexFunction({u: (v[forms.index[u]] if u in forms.index else 0.0) for u in g})
        assert cd_check(g, x, 0, n_min * (1 - 1e-3), witness).slack < 0
        assert ratio == pytest.approx(n_min, rel=1e-6)
        checked += 1


def test_cd_nmin_none_for_negative_curvature():
    # star of stars: Gamma_2 is indefinite at the hub
    edges = [("h", f"a{i}") for i in range(4)] + [(f"a{i}", f"b{i}{j}") for i in range(4) for j in range(4)]
    g = Graph(edges)
    assert cd_nmin(g, "h").n_min_status == "none"
    assert cd_kmax(g, "h", math.inf).k_max < 0


def test_cd_kmax_eg(eg, edge, fn):
    r = cd_kmax(eg, "x", 2)
    assert abs(r.k_max) <= 1e-10
    assert cd_check(eg, "x", 0.01, 2, fn(1, 2, 3)).slack < 0
    assert cd_kmax(edge, "a", math.inf).k_max == pytest.approx(2.0, abs=1e-10)
    with pytest.raises(ValueError):
        cd_kmax(eg, "x", -1)


def test_cd_kmax_infinite_dimension_limit(rng):
    for _ in range(20):
        g = random_graph(rng)
        for x in g.vertices:
            a, b = cd_kmax(g, x, math.inf).k_max, cd_kmax(g, x, 1e9).k_max
            if math.isinf(a):
                assert a == b
            else:
                assert a == pytest.approx(b, abs=1e-6)


def test_cd_kmax_sampling(rng):
    checked = 0
    while checked < 6:
        g = random_graph(rng, 6)
        x = g.vertices[int(rng.integers(len(g)))]
        n = float(rng.choice([1.5, 2.0, 5.0, math.inf]))
        k = cd_kmax(g, x, n).k_max
        if not math.isfinite(k):
            continue
        for _ in range(10000 // 6):
            assert cd_check(g, x, k - 1e-6, n, random_function(rng, g)).slack >= -1e-9
        checked += 1


def test_cde_examples(eg, fn):
    rep = cde_prime_slack(eg, "x", 0, 2, fn(1, 0.1, 0.01))
    assert rep.applicable and rep.condition == "CDE'"
    lhs = rep.components["gamma2"] - rep.components["gamma_correction"]
    assert lhs == pytest.approx(1.225125, abs=1e-12)
    assert rep.components["rhs_dimension_term"] == pytest.approx(0.5 * math.log(0.1) ** 2, rel=1e-14)
    assert rep.slack == pytest.approx(-1.425824, abs=1e-6)

    flat = cde_slack(eg, "x", 0, 2, fn(3, 3, 3))
    assert flat.slack == 0 and not flat.applicable

    vac = cde_slack(eg, "x", 0, 2, fn(1, 2, 4))
    assert vac.slack == pytest.approx(1 / 16, abs=1e-14) and not vac.applicable
    assert not cde_prime_slack(eg, "x", 0, 2, fn(1, 2, 4)).applicable

    half = cde_prime_slack(eg, "x", 0, 2, fn(1, 0.5, 0.25))
    assert half.components["gamma2"] - half.components["gamma_correction"] == pytest.approx(0.140625, abs=1e-14)
    assert half.slack == pytest.approx(0.140625 - 0.5 * math.log(0.5) ** 2, abs=1e-12)
    assert half.slack < 0


def test_single_edge_cde_prime_closed_form(edge):
    # f = (1, s): LHS = (s-1)^2 + (s-1)^4 / (4s), RHS(n=1) = (ln s)^2
    for s in (0.9, 0.5, 0.2):
        rep = cde_prime_slack(edge, "a", 0, 1, VertexFunction({"a": 1.0, "b": s}))
        expected = (s - 1) ** 2 + (s - 1) ** 4 / (4 * s) - math.log(s) ** 2
        assert rep.slack == pytest.approx(expected, rel=1e-12)
        assert rep.slack < 0


def test_positivity_required(eg, fn):
    with pytest.raises(PositivityError, match="z"):
        cde_prime_slack(eg, "x", 0, 2, fn(1, 2, 0))
    with pytest.raises(PositivityError):
        cde_slack(eg, "y", 0, 2, fn(-1, 2, 3))


def test_cd_slack_shift_and_scale(rng):
    for _ in range(100):
        g = random_graph(rng)
        x = g.vertices[0]
        f = random_function(rng, g)
        c = rng.normal(scale=5)
        base = cd_check(g, x, 0.3, 2.5, f).slack
        shifted = cd_check(g, x, 0.3, 2.5, VertexFunction({v: f[v] + c for v in g})).slack
        scaled = cd_check(g, x, 0.3, 2.5, VertexFunction({v: c * f[v] for v in g})).slack
        s = max(map(abs, f.values())) ** 2
        assert shifted == pytest.approx(base, abs=1e-10 * max(s, c * c))
        assert scaled == pytest.approx(c * c * base, rel=1e-9, abs=1e-10 * c * c * s)


def test_cde_prime_scaling_keeps_sign(rng):
    for _ in range(100):
        g = random_graph(rng)
        x = g.vertices[0]
        f = admissible(rng, g, x)
        if f is None:
            continue
        base = cde_prime_slack(g, x, 0.0, 2.0, f)
        for c in (0.5, 2.0, 10.0):
            rep = cde_prime_slack(g, x, 0.0, 2.0, VertexFunction({v: c * f[v] for v in g}))
            assert rep.applicable == base.applicable
            assert rep.slack == pytest.approx(c * c * base.slack, rel=1e-9, abs=1e-12)


def test_lemma_cde_prime_implies_cde(rng):
    seen = 0
    for _ in range(300):
        g = random_graph(rng)
        x = g.vertices[int(rng.integers(len(g)))]
        f = admissible(rng, g, x)
        if f is None:
            continue
        seen += 1
        lap = laplacian(g, f, x)
        log_lap = g.mu(x) * sum(math.log(f[y]) - math.log(f[x]) for y in g.neighbors(x))
        assert f[x] ** 2 * log_lap**2 >= lap**2 - 1e-12
        K = float(rng.uniform(-2, 1))
        n = float(rng.uniform(0.5, 5))
        if cde_prime_slack(g, x, K, n, f).slack >= 0:
            assert cde_slack(g, x, K, n, f).slack >= -1e-10
    assert seen > 200


def test_cde_prime_implies_cd_spot_check(rng):
    """Empirical only: where sampled CDE' holds, CD holds at the same (K, n)."""
    nonvacuous = 0
    for _ in range(40):
        g = random_graph(rng, 5)
        x = g.vertices[0]
        for K, n in ((-1.0, 2.0), (-2.0, 2.0), (0.0, math.inf), (-5.0, 1.0)):
            fs = [f for f in (admissible(rng, g, x) for _ in range(200)) if f is not None]
            if not fs or min(cde_prime_slack(g, x, K, n, f).slack for f in fs) < 0:
                continue
            nonvacuous += 1
            for _ in range(200):
                assert cd_check(g, x, K, n, random_function(rng, g)).slack >= -1e-9
            assert cd_kmax(g, x, n).k_max >= K - 1e-9
    assert nonvacuous >= 10
