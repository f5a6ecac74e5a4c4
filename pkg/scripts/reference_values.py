"""Evaluate the closed-form spot values at 30 significant digits with mpmath.

These are the frozen oracle numbers in tests/conftest.py. None of them goes
through the library, so they stay independent of it.
"""

from __future__ import annotations

from mpmath import besseli, e, exp, expm, matrix, mp, mpf, quad, sinh, sqrt

mp.dps = 30


def reference() -> dict[str, mpf]:
    L = mpf(1)
    third = mpf(1) / 3
    ref = {
        "telegraph_x0": exp(-1) * (besseli(0, 1) + besseli(1, 1)) / 2,
        "osm_vertices": exp(-L),
        "osm_edges": 4 * (exp(-3 * L / 4) - exp(-L)),
        "osm_faces": 4 * (exp(-L / 2) - exp(-L / 4)) ** 2,
        "oum_vertices": exp(-5 * L / 6),
        "oum_edges": 4 * (exp(-2 * L / 3) - exp(-5 * L / 6)),
        "oum_faces": 4 * (exp(-L / 2) - 2 * exp(-2 * L / 3) + exp(-5 * L / 6)),
        "planar_ac_mass": (1 - exp(-third)) ** 2,
        "osm_edge_integral": third * (exp(-mpf(3) / 4) - exp(-1)),
        "oum_edge_integral": third * (exp(-mpf(2) / 3) - exp(-mpf(5) / 6)),
        "osm_plane_integral": mpf(2) / 3 * exp(-mpf(1) / 2) * (1 - exp(-mpf(1) / 4)) ** 2,
        "osm_face_integral": exp(-mpf(1) / 2) / 2 * (1 - exp(-mpf(1) / 4)) ** 2,
        "oum_face_integral": exp(-mpf(1) / 2) / 2 * (1 - exp(-mpf(1) / 6)) ** 2,
        "osm_tz_integral": 1 - mpf(2) / 3 * exp(-mpf(1) / 2) - third * exp(-1),
        "oum_tz_integral": 1 - mpf(2) / 3 * exp(-third) - third * exp(-mpf(2) / 3),
        "osm_tz_mass0": mpf(2) / 3 * exp(-mpf(1) / 2),
        "osm_tz_mass_t": third * exp(-1),
        "z_eq_ctz_integral": mpf(5) / 6 * exp(-mpf(1) / 6) - mpf(2) / 3 * exp(-third) - mpf(1) / 6 * exp(-mpf(5) / 6),
        "tz_eq_t_integral": third * (exp(-mpf(2) / 3) - exp(-mpf(5) / 6)),
        "bessel_i0_1": besseli(0, 1),
        "arc_1_0_1": 2 * sinh(mpf(1) / 2),
        "arc_2_1_1": exp(mpf(1) / 2) * 2 * sinh(sqrt(5) / 2) / sqrt(5),
        "product_moment_1_1": sqrt(e) / 4 * (besseli(1, mpf(1) / 2) + besseli(0, mpf(1) / 2)),
    }
    ref["osm_interior"] = 1 - ref["osm_vertices"] - ref["osm_edges"] - ref["osm_faces"]
    # OSM never moving along -z: chain on the other five directions, killed on entering -z
    gen = matrix(5, 5)
    for a in range(5):
        gen[a, a] = -1
        for b in range(5):
            if a % 3 != b % 3:
                gen[a, b] = mpf(1) / 4
    ref["osm_never_down"] = sum(expm(gen)[a, b] for a in range(5) for b in range(5)) / 6
    ref["product_moment_quad"] = quad(lambda w: w**3 * exp(-w * w) * besseli(1, w) ** 2, [0, mp.inf])
    return ref


if __name__ == "__main__":
    for key, val in reference().items():
        print(f"{key:22s} {mp.nstr(val, 17)}")
