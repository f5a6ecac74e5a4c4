import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.linalg import expm

from orthomotion.verify import compare

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

# 30-digit mpmath evaluations (scripts/reference_values.py), rounded to 17 digits
REF = {
    "telegraph_x0": 0.33683501147167444,
    "osm_vertices": 0.36787944117144232,
    "osm_edges": 0.41794844627828954,
    "osm_faces": 0.11870798160818532,
    "osm_interior": 0.095464130942082813,
    "oum_vertices": 0.43459820850707822,
    "oum_edges": 0.31527564210205521,
    "oum_faces": 0.057178520618110372,
    "planar_ac_mass": 0.080354497885013526,
    "osm_edge_integral": 0.034829037189857462,
    "oum_edge_integral": 0.026272970175171268,
    "osm_plane_integral": 0.019784663601364221,
    "osm_face_integral": 0.014838497701023165,
    "oum_face_integral": 0.0071473150772637965,
    "osm_tz_integral": 0.47301974646776361,
    "oum_tz_integral": 0.35117341993994316,
    "osm_tz_mass0": 0.40435377314175562,
    "osm_tz_mass_t": 0.12262648039048077,
    "z_eq_ctz_integral": 0.15528086227513919,
    "tz_eq_t_integral": 0.026272970175171268,
    "bessel_i0_1": 1.2660658777520083,
    "arc_1_0_1": 1.0421906109874947,
    "arc_2_1_1": 2.0143227334583157,
    "product_moment_1_1": 0.54464587031687397,
    # killed chain on the five directions other than -z, 30-digit matrix exponential
    "osm_never_down": 0.6847183077103569,
}

BOUNDARY_PATHS = 10**7
BOUNDARY_SEED = 20240611


@pytest.fixture(scope="session")
def ref():
    return REF


@pytest.fixture(scope="session")
def osm_boundary():
    return compare.boundary_samples("osm", 1.0, 1.0, 1.0, BOUNDARY_PATHS, BOUNDARY_SEED)


@pytest.fixture(scope="session")
def oum_boundary():
    return compare.boundary_samples("oum", 1.0, 1.0, 1.0, BOUNDARY_PATHS, BOUNDARY_SEED)


def binomial_z(count, n, p):
    return (count - n * p) / np.sqrt(n * p * (1 - p))


def chain_class_masses(kind: str, cum_rate: float) -> list[float]:
    """Vertex/edge/face/interior masses from the chain on (direction, set of used directions).

    Exact up to the matrix exponential; shares nothing with the library.
    """
    states = [(d, m) for d in range(6) for m in range(64) if m >> d & 1]
    index = {s: i for i, s in enumerate(states)}
    gen = np.zeros((len(states), len(states)))
    for (d, m), i in index.items():
        nxt = [e for e in range(6) if e % 3 != d % 3] if kind == "osm" else range(6)
        nxt = list(nxt)
        for e in nxt:
            gen[i, index[(e, m | 1 << e)]] += 1.0 / len(nxt)
        gen[i, i] -= 1.0
    trans = expm(cum_rate * gen)
    out = np.zeros(4)
    for (e, m), j in index.items():
        axes = {k % 3 for k in range(6) if m >> k & 1}
        reversed_axis = any(m >> k & 1 and m >> (k + 3) & 1 for k in range(3))
        out[3 if reversed_axis else len(axes) - 1] += sum(trans[index[(d, 1 << d)], j] for d in range(6)) / 6
    return list(out)
