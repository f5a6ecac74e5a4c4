import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from orthomotion.grids import DensityGrid
from orthomotion.telegraph import DomainError
from orthomotion.verify import compare, equations, suite
from orthomotion.verify.fd import central_stencil, convergence_check, fd_residual, stencil_reach
from orthomotion.verify.operators import (ExpPolynomial, Operator, determinant, generator_operator,
                                          operator_identity_check)
from orthomotion.verify.stats import chi2_test, ks_test, merge_sparse_bins, tv_distance, variance_z_score

TX = ("t", "x")
DT = Operator.partial("t", 1, TX)
DX = Operator.partial("x", 1, TX)


# ---------------------------------------------------------------------------
# operator algebra


def test_operator_products():
    assert ((DT + 1) * (DT - 1)).is_close(DT**2 - 1)
    assert (DT + DX) ** 2 == DT**2 + 2 * DT * DX + DX**2
    assert (DT**3).order == 3
    assert (2 * DT * DX).coefficient(t=1, x=1) == 2.0
    assert str(Operator(TX, {})) == "0"


def test_operator_rejects_bad_input():
    with pytest.raises(ValueError):
        Operator(TX, {(1,): 1.0})
    with pytest.raises(ValueError):
        DT + Operator.partial("t", 1, ("t", "y"))
    with pytest.raises(ValueError):
        DT ** -1


def test_determinant_of_two_by_two():
    a, b, c, d = DT + 1, DX, 2.0, DT - DX
    assert determinant([[a, b], [c, d]], TX).is_close(a * d - b * 2.0)


def test_generator_of_two_state_motion_is_telegraph():
    lam, c = 1.3, 0.7
    op = generator_operator(np.array([[c], [-c]]), np.array([[0.0, lam], [lam, 0.0]]), TX)
    assert op.is_close(equations.telegraph(lam, c))


def test_exponential_conjugation():
    # L[e^{-k t} f] = e^{-k t} L'[f]
    k = 0.8
    op = DT**2 + 3 * DT * DX - DX**2 + 2
    conj = op.conjugate_exponential({"t": k})
    f = ExpPolynomial({(2, 1): 1.0, (0, 0): -0.5, (1, 3): 0.25}, (0.3, -0.2))
    g = ExpPolynomial(f.poly, (0.3 - k, -0.2))
    pts = np.random.default_rng(0).uniform(-1, 1, (10, 2))
    lhs = op.evaluate(lambda idx: g.derivative(idx, pts))
    rhs = np.exp(-k * pts[:, 0]) * conj.evaluate(lambda idx: f.derivative(idx, pts))
    assert np.allclose(lhs, rhs, rtol=1e-12)


def test_substitution_as_change_of_variables():
    # u = t + x, v = t - x: d_t -> d_u + d_v, d_x -> d_u - d_v
    uv = ("u", "v")
    du, dv = Operator.partial("u", 1, uv), Operator.partial("v", 1, uv)
    wave = DT**2 - DX**2
    assert wave.substitute({"t": du + dv, "x": du - dv}, uv).is_close(4 * du * dv)


@given(st.integers(0, 3), st.integers(0, 3))
def test_exp_polynomial_derivative_against_differences(a, b):
    f = ExpPolynomial.random(np.random.default_rng(a * 7 + b), 2, degree=3, rate_scale=0.5)
    pts = np.array([[0.2, -0.3], [0.5, 0.1]])
    h = 1e-4
    shift = np.array([h, 0.0])
    fd = (f.derivative((a, b), pts + shift) - f.derivative((a, b), pts - shift)) / (2 * h)
    exact = f.derivative((a + 1, b), pts)
    assert np.allclose(fd, exact, rtol=1e-6, atol=1e-6 * np.abs(exact).max())


def test_identity_check_detects_mismatch():
    good = operator_identity_check(DT**2 - DX**2, (DT - DX) * (DT + DX))
    bad = operator_identity_check(DT**2 - DX**2, (DT - DX) * (DT + 1.01 * DX))
    assert good.passed and not bad.passed
    with pytest.raises(ValueError):
        operator_identity_check(DT, Operator.partial("t", 1, ("t", "y")))


@pytest.mark.parametrize("job", suite.identity_jobs(), ids=lambda j: j.label)
def test_identity_jobs(job):
    report, as_expected = suite.run_identity_job(job)
    assert as_expected, report.to_dict()


# ---------------------------------------------------------------------------
# finite differences


def test_central_stencils():
    assert central_stencil(1) == ((-1, -0.5), (1, 0.5))
    assert np.allclose([w for _, w in central_stencil(2)], [1.0, -2.0, 1.0])
    assert np.allclose([w for _, w in central_stencil(4)], [1.0, -4.0, 6.0, -4.0, 1.0])
    assert stencil_reach(DT**2 + DX**3) == (1, 2)


def heat_like(t, x):
    return np.exp(t) * np.sin(x)


def test_residual_vanishes_for_a_solution():
    pts = np.random.default_rng(1).uniform(0.2, 0.8, (20, 2))
    report = fd_residual(heat_like, DT + DX**2, pts, steps=[1e-3, 1e-3])
    assert report.passed and report.max_rel_residual < 1e-6
    wrong = fd_residual(heat_like, DT - DX**2, pts, steps=[1e-3, 1e-3])
    assert not wrong.passed


def test_second_order_convergence():
    pts = np.random.default_rng(2).uniform(0.2, 0.8, (20, 2))
    conv = convergence_check(heat_like, DT + DX**2, pts, steps=[0.02, 0.02])
    assert conv.passed, conv.ratio
    assert conv.ratio == pytest.approx(4.0, rel=0.05)


def test_residual_refuses_points_near_the_boundary():
    support = lambda p: np.abs(p[:, 1]) < p[:, 0]
    with pytest.raises(DomainError):
        fd_residual(heat_like, DT + DX**2, np.array([[1.0, 0.999]]), steps=[1e-3, 1e-3], support=support)
    with pytest.raises(ValueError):
        fd_residual(heat_like, DT + DX**4, np.array([[1.0, 0.0]]), steps=[1e-3, 1e-3], margin=1)


@pytest.mark.parametrize("job", suite.residual_jobs(), ids=lambda j: j.equation_id)
def test_residual_jobs(job):
    outcome = suite.run_residual_job(job)
    assert outcome.passed, outcome.to_dict()
    assert outcome.report.max_rel_residual < suite.RESIDUAL_THRESHOLD


# ---------------------------------------------------------------------------
# statistics


def test_ks_matches_scipy():
    x = np.random.default_rng(3).normal(size=2000)
    ours = ks_test(x, sps.norm.cdf)
    theirs = sps.kstest(x, sps.norm.cdf)
    assert ours.statistic == pytest.approx(theirs.statistic, rel=1e-12)
    assert ours.details["p_value"] == pytest.approx(theirs.pvalue, rel=1e-6)
    assert not ks_test(x + 0.2, sps.norm.cdf).passed


def test_ks_with_atoms():
    # half the mass sits at 0
    rng = np.random.default_rng(4)
    x = np.where(rng.random(5000) < 0.5, 0.0, rng.random(5000))

    def cdf(v, left=False):
        v = np.asarray(v)
        at_zero = (v > 0) | ((v == 0) & (not left))
        return np.where(v < 0, 0.0, 0.5 * at_zero + 0.5 * np.clip(v, 0.0, 1.0))

    assert ks_test(x, cdf, atoms=True).passed
    assert not ks_test(x, cdf).passed


def test_tv_distance():
    edges = (np.linspace(0, 1, 5),)
    a = DensityGrid(np.array([1.0, 2.0, 3.0, 4.0]), edges, total=10.0)
    assert tv_distance(a, a) == 0.0
    b = DensityGrid(np.array([4.0, 3.0, 2.0, 1.0]), edges, total=10.0)
    assert tv_distance(a, b) == pytest.approx(0.4)
    with pytest.raises(ValueError):
        tv_distance(a, DensityGrid(np.ones(4), (np.linspace(0, 2, 5),)))


def test_chi2_merges_sparse_bins():
    obs, exp = merge_sparse_bins([10, 1, 2, 30], [10.0, 1.0, 2.0, 30.0])
    # the pooled bin is still sparse, so it joins the smallest regular bin
    assert list(exp) == [13.0, 30.0] and list(obs) == [13.0, 30.0]
    report = chi2_test([100, 98, 103, 1], [100.0, 100.0, 100.0, 2.0], rescale=False)
    assert report.details["bins"] == 3 and report.passed
    with pytest.raises(ValueError):
        chi2_test([5], [5.0])


def test_variance_z_score():
    x = np.random.default_rng(5).normal(scale=2.0, size=10**5)
    var, se, z = variance_z_score(x, 4.0)
    assert abs(z) < 3 and se == pytest.approx(4.0 * math.sqrt(2 / 1e5), rel=0.05)


# ---------------------------------------------------------------------------
# Monte Carlo comparisons


def test_singular_mass_check():
    report = compare.singular_mass_check("osm", 1.0, 1.0, 10**6, 22)
    assert report.passed, report.to_dict()
    assert report.test == "binomial-z"


def test_distinct_motions_are_told_apart():
    report = compare.endpoint_tv("osm", 1.0, "oum", 1.0, 1.0, 1.0, 10**6, 23, threshold=0.05)
    assert not report.passed and report.statistic > 0.05


def test_kac_verdict_is_seed_stable():
    a = compare.kac_limit_check("osm", 400.0, 1.0, 10**5, 24)
    b = compare.kac_limit_check("osm", 400.0, 1.0, 10**5, 25)
    assert a.passed and b.passed, (a.to_dict(), b.to_dict())


def test_kac_far_from_the_limit():
    report = compare.kac_limit_check("oum", 4.0, 1.0, 10**5, 26)
    d = report.details
    assert d["finite_rate_variance"] < d["target_variance"]
    # at scale 4 the variance sits at the finite-rate value, well below the limit
    for coord in d["coordinates"].values():
        assert abs(coord["variance"] - d["finite_rate_variance"]) < 4 * coord["standard_error"]
    assert not report.passed
