import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from orthomotion import occupation, ortho3d
from orthomotion.grids import interval_integral, triangle_integral
from orthomotion.ortho3d import Path3D
from orthomotion.telegraph import DomainError
from orthomotion.verify import compare
from orthomotion.verify.stats import chi2_test

from conftest import binomial_z

SIMPLEX = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
UP, DOWN = 1 << 2, 1 << 5
Z_BITS = UP | DOWN


def test_occupation_times_example():
    occ = occupation.occupation_times(Path3D(1.0, (0.25, 0.5), (0, 2, 1), "osm"))
    assert (occ.tx, occ.ty, occ.tz) == (0.25, 0.5, 0.25)
    assert occ.horizon == 1.0
    occ = occupation.occupation_times(Path3D(2.0, (0.5, 1.5), (3, 1, 0), "osm"))
    assert (occ.tx, occ.ty, occ.tz) == (1.0, 1.0, 0.0)


@pytest.mark.parametrize("kind", ["osm", "oum"])
def test_batch_occupation_matches_paths(kind):
    batch = ortho3d.simulate(kind, 3.0, 1.0, 1.0, 300, 7, keep_raw=True)
    for i in range(300):
        occ = occupation.occupation_times(batch.path(i, ortho3d.MotionKind.parse(kind)))
        assert np.allclose((occ.tx, occ.ty, occ.tz), batch.occupation[i], atol=1e-12)


@pytest.mark.parametrize("kind", ["osm", "oum", "osdm"])
def test_support_statements(kind):
    batch = ortho3d.simulate(kind, 2.0, 1.5, 1.0, 10**5, 8)
    occ, pos = batch.occupation, batch.endpoints
    assert np.allclose(occ.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(occ >= -1e-12)
    assert np.all(np.abs(pos) <= 1.5 * occ + 1e-12)
    only_z = (batch.mask & ~Z_BITS) == 0
    if kind == "osm":
        # a vertical segment cannot be followed by another vertical one
        assert np.allclose(np.abs(pos[only_z, 2]), 1.5)
    else:
        assert np.any(np.abs(pos[only_z, 2]) < 1.5 - 1e-9)


# ---------------------------------------------------------------------------
# T_z


@pytest.mark.parametrize("kind", ["osm", "oum"])
def test_tz_integral(ref, kind):
    got = interval_integral(lambda s: occupation.tz_density(kind, 1.0, 1.0, s), 0.0, 1.0, pieces=16)
    assert abs(got - ref[f"{kind}_tz_integral"]) < 1e-6


def test_osm_closed_form_matches_series():
    s = np.linspace(0.01, 0.99, 99)
    for lam in (0.3, 1.0, 4.0):
        diff = occupation.tz_density_osm_closed(lam, 1.0, s) - occupation.tz_density("osm", lam, 1.0, s)
        assert np.max(np.abs(diff)) < 1e-8


def test_tz_domain():
    with pytest.raises(DomainError):
        occupation.tz_density_osm_closed(1.0, 1.0, 1.0)


def test_tz_masses(ref):
    m0, mt = occupation.tz_masses("osm", 1.0)
    assert m0 == pytest.approx(ref["osm_tz_mass0"], rel=1e-14)
    assert mt == pytest.approx(ref["osm_tz_mass_t"], rel=1e-14)
    assert m0 + mt + ref["osm_tz_integral"] == pytest.approx(1.0, abs=1e-12)
    assert occupation.tz_masses("osdm", 1.0) == occupation.tz_masses("oum", 1.2)


@pytest.mark.parametrize("kind", ["osm", "oum", "osdm"])
def test_tz_masses_against_monte_carlo(kind):
    n = 10**6
    batch = ortho3d.simulate(kind, 1.0, 1.0, 1.0, n, 9)
    m0, mt = occupation.tz_masses(kind, 1.0)
    assert abs(binomial_z(np.sum((batch.mask & Z_BITS) == 0), n, m0)) < 3
    assert abs(binomial_z(np.sum((batch.mask & ~Z_BITS) == 0), n, mt)) < 3


@pytest.mark.parametrize("kind", ["osm", "oum"])
def test_tz_chi2(kind):
    n = 10**6
    tz = ortho3d.simulate(kind, 2.0, 1.0, 1.0, n, 10).occupation[:, 2]
    inner = tz[(tz > 1e-12) & (tz < 1.0 - 1e-12)]
    edges = np.linspace(0.0, 1.0, 41)
    observed, _ = np.histogram(inner, bins=edges)
    expected = n * np.array([interval_integral(lambda s: occupation.tz_density(kind, 2.0, 1.0, s), a, b, pieces=1)
                             for a, b in zip(edges[:-1], edges[1:])])
    report = chi2_test(observed, expected, rescale=False)
    assert report.details["p_value"] > 0.001, report.to_dict()


# ---------------------------------------------------------------------------
# (T_x, T_y)


def test_joint_txty_integral(ref):
    for kind in ("osm", "oum"):
        got = triangle_integral(lambda s, r: occupation.joint_txty_density(kind, 1.0, 1.0, 1.0, s, r),
                                SIMPLEX, k=8, order=14)
        assert abs(got - occupation.joint_txty_ac_mass(kind, 1.0, 1.0)) < 1e-5
    assert occupation.joint_txty_ac_mass("oum", 1.0, 1.0) == pytest.approx(ref["planar_ac_mass"], rel=1e-14)


@given(st.sampled_from(["osm", "oum"]), st.floats(0.05, 0.9), st.floats(0.05, 0.9), st.floats(0.1, 1.0))
def test_joint_txty_exchange_symmetry(kind, a, b, share):
    s, r = share * a / (a + b + 0.1), share * b / (a + b + 0.1)
    f = occupation.joint_txty_density(kind, 1.5, 1.0, 1.0, s, r)
    assert f > 0
    assert f == pytest.approx(occupation.joint_txty_density(kind, 1.5, 1.0, 1.0, r, s), rel=1e-10)


def test_joint_txty_speed_free():
    # c cancels in the barycentric reading
    a = occupation.joint_txty_density("oum", 1.0, 1.0, 1.0, 0.2, 0.3)
    b = occupation.joint_txty_density("oum", 1.0, 3.0, 1.0, 0.2, 0.3)
    assert a == pytest.approx(b, rel=1e-12)


def test_joint_txty_domain():
    for s, r in ((0.0, 0.5), (0.5, 0.5), (0.7, 0.4)):
        with pytest.raises(DomainError):
            occupation.joint_txty_density("osm", 1.0, 1.0, 1.0, s, r)


@pytest.mark.parametrize("kind", ["osm", "oum"])
def test_all_axes_mass_against_monte_carlo(kind):
    n = 10**6
    batch = ortho3d.simulate(kind, 1.0, 1.0, 1.0, n, 16)
    used = compare._used_axes(batch.mask).all(axis=1)
    assert abs(binomial_z(used.sum(), n, occupation.joint_txty_ac_mass(kind, 1.0, 1.0))) < 3


@pytest.mark.parametrize("kind", ["osm", "oum"])
def test_txty_marginal_tv(kind):
    report = compare.txty_marginal_tv(kind, 1.0, 1.0, 1.0, 3 * 10**6, 17)
    assert report.passed, report.to_dict()
    assert abs(report.details["ac_mass_cubature"] - report.details["ac_mass"]) < 1e-5


def test_monte_carlo_exchange_symmetry():
    batch = ortho3d.simulate("osm", 2.0, 1.0, 1.0, 10**6, 18)
    occ = batch.occupation[compare._used_axes(batch.mask).all(axis=1)]
    edges = np.linspace(0.0, 1.0, 9)
    grid = np.histogram2d(occ[:, 0], occ[:, 1], bins=(edges, edges))[0]
    upper = np.triu_indices(8, 1)
    a, b = grid[upper], grid.T[upper]
    keep = (a + b) > 0
    stat = np.sum((a[keep] - b[keep]) ** 2 / (a[keep] + b[keep]))
    assert sps.chi2.sf(stat, keep.sum()) > 0.001


# ---------------------------------------------------------------------------
# Z = c T_z for the OUM


def test_z_eq_ctz_integral(ref):
    got = interval_integral(lambda s: occupation.cond_z_eq_ctz_density_oum(1.0, 1.0, s), 0.0, 1.0, pieces=16)
    assert abs(got - ref["z_eq_ctz_integral"]) < 1e-6
    assert occupation.z_eq_ctz_integral(1.0) == pytest.approx(ref["z_eq_ctz_integral"], rel=1e-14)


def test_z_eq_ctz_against_monte_carlo():
    n = 10**6
    batch = ortho3d.simulate("oum", 1.0, 1.0, 1.0, n, 19)
    never_down = (batch.mask & DOWN) == 0
    assert abs(binomial_z(never_down.sum(), n, occupation.z_eq_ctz_probability(1.0))) < 3
    both = never_down & ((batch.mask & UP) != 0) & ((batch.mask & ~Z_BITS) != 0)
    assert abs(binomial_z(both.sum(), n, occupation.z_eq_ctz_integral(1.0))) < 3
    tz = batch.occupation[both, 2]
    edges = np.linspace(0.0, 1.0, 21)
    observed, _ = np.histogram(tz, bins=edges)
    expected = n * np.array([interval_integral(lambda s: occupation.cond_z_eq_ctz_density_oum(1.0, 1.0, s),
                                               a, b, pieces=1) for a, b in zip(edges[:-1], edges[1:])])
    assert chi2_test(observed, expected, rescale=False).details["p_value"] > 0.001


def test_z_eq_ctz_does_not_factorize():
    s = np.linspace(0.1, 0.9, 9)
    ratio = occupation.cond_z_eq_ctz_density_oum(1.0, 1.0, s) / occupation.tz_density("oum", 1.0, 1.0, s)
    assert np.ptp(ratio) > 0.05
    assert np.all(ratio < 1.0)


# ---------------------------------------------------------------------------
# OSM never moving down


def test_run_probability_examples():
    assert occupation.osm_run_probability(2, 1, "vertical") == Fraction(1, 24)
    assert occupation.osm_run_probability(0, 0, "vertical") == Fraction(1, 6)
    assert occupation.osm_run_probability(0, 1, "vertical") == 0
    assert occupation.osm_run_probability(0, 0, "horizontal") == Fraction(2, 3)
    assert occupation.osm_never_down_probability_given_n(0) == Fraction(5, 6)
    with pytest.raises(ValueError):
        occupation.osm_run_probability(1, 0, "sideways")
    with pytest.raises(ValueError):
        occupation.osm_run_probability(-1, 0, "vertical")


@pytest.mark.parametrize("n", range(9))
def test_run_probability_against_enumeration(n):
    table = occupation.enumerate_osm_runs(n)
    for start in ("vertical", "horizontal"):
        for k in range(n + 3):
            assert occupation.osm_run_probability(n, k, start) == table.get((start, k), 0)


def test_never_down_probability(ref):
    assert occupation.osm_never_down_probability(1.0, 1.0) == pytest.approx(ref["osm_never_down"], rel=1e-14)
    assert occupation.osm_never_down_probability(1e-9, 1.0) == pytest.approx(5 / 6, rel=1e-8)


def test_never_down_against_monte_carlo(ref):
    n = 10**6
    batch = ortho3d.simulate("osm", 1.0, 1.0, 1.0, n, 20)
    assert abs(binomial_z(np.sum((batch.mask & DOWN) == 0), n, ref["osm_never_down"])) < 3


# ---------------------------------------------------------------------------
# T_z = t for the OUM


def test_tz_eq_t_integral(ref):
    got = interval_integral(lambda z: occupation.cond_tz_eq_t_density_oum(1.0, 1.0, 1.0, z), -1.0, 1.0, pieces=16)
    assert abs(got - ref["tz_eq_t_integral"]) < 1e-7
    assert occupation.tz_eq_t_integral(1.0) == pytest.approx(ref["tz_eq_t_integral"], rel=1e-14)


@given(st.floats(0.1, 5.0), st.floats(0.0, 0.99))
def test_tz_eq_t_even(lam, frac):
    a = occupation.cond_tz_eq_t_density_oum(lam, 1.0, 1.0, frac)
    assert a == pytest.approx(occupation.cond_tz_eq_t_density_oum(lam, 1.0, 1.0, -frac), rel=1e-13)


def test_tz_eq_t_against_monte_carlo():
    n = 4 * 10**6
    lam = 3.0
    batch = ortho3d.simulate("oum", lam, 1.0, 1.0, n, 21)
    keep = ((batch.mask & ~Z_BITS) == 0) & ((batch.mask & Z_BITS) == Z_BITS)
    assert abs(binomial_z(keep.sum(), n, occupation.tz_eq_t_integral(lam))) < 3
    z = batch.endpoints[keep, 2]
    edges = np.linspace(-1.0, 1.0, 21)
    observed, _ = np.histogram(z, bins=edges)
    expected = n * np.array([interval_integral(lambda v: occupation.cond_tz_eq_t_density_oum(lam, 1.0, 1.0, v),
                                               a, b, pieces=1) for a, b in zip(edges[:-1], edges[1:])])
    assert chi2_test(observed, expected, rescale=False).details["p_value"] > 0.001
