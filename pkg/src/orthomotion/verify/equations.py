"""Governing equations of the motions, as constant-coefficient operators.

Each builder returns the operator L with L p = 0 for the named density.
Several of them come in two versions: the displayed form, written out term
by term, and the determinant of the motion's forward system
(:func:`generator_operator`), which is derived from the switching rules
alone. Agreement of the two is an operator identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .operators import Operator, generator_operator

SQRT3 = math.sqrt(3.0)
TX = ("t", "x")
TXY = ("t", "x", "y")
TXYZ = ("t", "x", "y", "z")
TS = ("t", "s")
TSZ = ("t", "s", "z")


def _d(var: str, variables, order: int = 1) -> Operator:
    return Operator.partial(var, order, variables)


def _mono(variables, coef: float = 1.0, **orders: int) -> Operator:
    return Operator.mixed(orders, coef, variables)


# ---------------------------------------------------------------------------
# one space variable


def telegraph(lam: float, c: float, variables=TX) -> Operator:
    """p_tt + 2 lam p_t - c^2 p_xx."""
    t, x = variables
    return _d(t, variables, 2) + 2 * lam * _d(t, variables) - c * c * _d(x, variables, 2)


def damped_telegraph(damping: float, mass: float, c: float, variables=TX) -> Operator:
    """p_tt + damping p_t + mass p - c^2 p_xx."""
    t, x = variables
    return _d(t, variables, 2) + damping * _d(t, variables) + mass - c * c * _d(x, variables, 2)


def edge_osm(lam: float, c: float) -> Operator:
    return damped_telegraph(2 * lam, 15 / 16 * lam**2, c)


def edge_osm_conditioned(lam: float, c: float) -> Operator:
    """For q = (3/2) e^{lam t/2} p: the edge law given no vertical move."""
    return damped_telegraph(lam, 3 / 16 * lam**2, c)


def edge_oum(lam: float, c: float) -> Operator:
    return damped_telegraph(5 * lam / 3, 2 / 3 * lam**2, c)


def tz_eq_t_oum(lam: float, c: float) -> Operator:
    """P{T_z = t, Z in dz}: same operator as the OUM edge, in (t, z)."""
    return damped_telegraph(5 * lam / 3, 2 / 3 * lam**2, c)


def edge_generator(kind: str, lam: float, c: float) -> Operator:
    """Two edge directions (+x, +y seen along v = x - y); other moves leave the edge."""
    swap, leak = (lam / 4, 3 * lam / 4) if kind == "osm" else (lam / 6, 2 * lam / 3)
    return generator_operator(np.array([[c], [-c]]), np.array([[0, swap], [swap, 0]]), TX, leak=leak)


# ---------------------------------------------------------------------------
# two-speed clocks (velocity 1 or 0 in s)


def two_speed(move_rate: float, still_rate: float, variables=TS) -> Operator:
    """p_tt + p_ts + (a + b) p_t + b p_s for leave rates a (moving) and b (still)."""
    t, s = variables
    return (_d(t, variables, 2) + _mono(variables, 1.0, **{t: 1, s: 1})
            + (move_rate + still_rate) * _d(t, variables) + still_rate * _d(s, variables))


def tz_osm(lam: float) -> Operator:
    return two_speed(lam, lam / 2)


def tz_oum(lam: float) -> Operator:
    return two_speed(2 * lam / 3, lam / 3)


def z_eq_ctz_oum(lam: float) -> Operator:
    """P{T_z in ds, Z = c s} for the OUM, as displayed (with the zero-order term)."""
    t, s = TS
    return (_d(t, TS, 2) + _mono(TS, 1.0, t=1, s=1) + 7 * lam / 6 * _d(t, TS)
            + lam / 3 * _d(s, TS) + lam**2 / 6)


def z_eq_ctz_oum_conditioned(lam: float) -> Operator:
    return two_speed(2 * lam / 3, lam / 6)


# ---------------------------------------------------------------------------
# joint (T_z, Z)


def joint_tz_z_expanded(kind: str, lam: float, c: float, *, literal: bool = False) -> Operator:
    """Third-order equation in (t, s, z), written out term by term.

    For the OUM the d_tt coefficient is 2 lam: it must equal the sum of the
    three states' leave rates (lam/3 + 5 lam/6 + 5 lam/6). ``literal=True``
    keeps the printed 7 lam/3 as a negative control.
    """
    v = TSZ
    if kind == "osm":
        a2t, a2s, ats, a1t, a1s, azz = 5 * lam / 2, lam / 2, 3 * lam, 3 * lam**2 / 2, lam**2 / 2, lam / 2
    else:
        a2t = 7 * lam / 3 if literal else 2 * lam
        a2s, ats, a1t, a1s, azz = lam / 3, 7 * lam / 3, lam**2, lam**2 / 3, lam / 3
    return (_mono(v, 1.0, t=3) + _mono(v, 2.0, t=2, s=1) + _mono(v, 1.0, t=1, s=2)
            + _mono(v, a2t, t=2) + _mono(v, a2s, s=2) + _mono(v, ats, t=1, s=1)
            + _mono(v, a1t, t=1) + _mono(v, a1s, s=1)
            - _mono(v, c * c, t=1, z=2) - _mono(v, c * c * azz, z=2))


def joint_tz_z_factored_osm(lam: float, c: float) -> Operator:
    """(d_t + lam/2)[telegraph operator in the clock d_t + d_s] + (lam^2/2)(d_t - d_s)."""
    v = TSZ
    dt, ds = _d("t", v), _d("s", v)
    drift = dt + ds
    inner = drift * drift + 2 * lam * drift - c * c * _d("z", v, 2)
    return (dt + lam / 2) * inner + lam**2 / 2 * (dt - ds)


def joint_tz_z_generator(kind: str, lam: float, c: float) -> Operator:
    """States: horizontal, up, down; velocities (ds/dt, dz/dt)."""
    vel = np.array([[0.0, 0.0], [1.0, c], [1.0, -c]])
    if kind == "osm":
        rates = np.array([[0, lam / 4, lam / 4], [lam, 0, 0], [lam, 0, 0]])
    else:
        rates = np.array([[0, lam / 6, lam / 6], [2 * lam / 3, 0, lam / 6], [2 * lam / 3, lam / 6, 0]])
    return generator_operator(vel, rates, TSZ)


def joint_tz_z_transformed_osm(lam: float, c: float) -> tuple[Operator, Operator]:
    """The OSM form in z1 = t - s, z2 = cs + z, z3 = cs - z.

    Returns (factored form rewritten in the new variables and acting on
    q = e^{lam z1/2 + lam (z2 + z3)/(2c)} p, scaled by 1/(4c^2);
    d1 d2 d3 - lam^2/(8c) (d2 + d3)).
    """
    new = ("z1", "z2", "z3")
    d1, d2, d3 = (_d(n, new) for n in new)
    chain = {"t": d1, "s": -d1 + c * d2 + c * d3, "z": d2 - d3}
    moved = joint_tz_z_factored_osm(lam, c).substitute(chain, new)
    shifted = moved.conjugate_exponential({"z1": lam / 2, "z2": lam / (2 * c), "z3": lam / (2 * c)})
    target = d1 * d2 * d3 - lam**2 / (8 * c) * (d2 + d3)
    return shifted * (1.0 / (4 * c * c)), target


# ---------------------------------------------------------------------------
# planar motions


def planar3_generator(lam: float, c: float, kind: str = "uniform") -> Operator:
    """Three directions at 120 degrees; uniform or symmetrically deviating switching."""
    vel = c * np.array([[1.0, 0.0], [-0.5, SQRT3 / 2], [-0.5, -SQRT3 / 2]])
    share = lam / 3 if kind == "uniform" else lam / 2
    rates = np.full((3, 3), share)
    return generator_operator(vel, rates, TXY)


def planar_orthogonal_generator(lam: float, c: float) -> Operator:
    """Standard orthogonal planar motion: four directions, switching to either orthogonal one."""
    vel = c * np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    rates = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]) * lam / 2
    return generator_operator(vel, rates, TXY)


def planar_orthogonal_fourth_order(lam: float, c: float, *, literal: bool = False) -> Operator:
    """(d_t + lam)^2 [d_tt + 2 lam d_t - c^2 lap] + c^4 d_xxyy.

    ``literal=True`` gives the printed variant with (d_t + lam^2) as the
    first factor, kept as a negative control.
    """
    v = TXY
    dt = _d("t", v)
    first = (dt + lam) * (dt + lam) if not literal else dt + lam**2
    lap = _d("x", v, 2) + _d("y", v, 2)
    return first * (dt * dt + 2 * lam * dt - c * c * lap) + c**4 * _mono(v, 1.0, x=2, y=2)


def planar_orthogonal_dalembert(lam: float, c: float) -> Operator:
    """Conjugated form: box_x box_y - lam^2 d_t^2, acting on q = e^{lam t} p."""
    v = TXY
    dt2 = _d("t", v, 2)
    return (dt2 - c * c * _d("x", v, 2)) * (dt2 - c * c * _d("y", v, 2)) - lam**2 * dt2


def plane_generator(kind: str, lam: float, c: float) -> Operator:
    """Horizontal directions of the 3-D motion; moves off the plane are lost."""
    vel = c * np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    if kind == "osm":
        rates = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]) * lam / 4
        leak = lam / 2
    else:
        rates = (np.ones((4, 4)) - np.eye(4)) * lam / 6
        leak = lam / 3
    return generator_operator(vel, rates, TXY, leak=leak)


def face_osm(lam: float, c: float) -> Operator:
    """Third-order face equation, written out term by term."""
    v = TXY
    dt, dx, dy = _d("t", v), _d("x", v), _d("y", v)
    left = dt**3 + 3 * lam * dt**2 + 45 / 16 * lam**2 * dt + 25 / 32 * lam**3
    right = (-c * (dx + dy) * (dt**2 + 2 * lam * dt + 15 / 16 * lam**2)
             - c * c * dx * dy * (dt + lam))
    return left - right


def face_generator(kind: str, lam: float, c: float) -> Operator:
    """States +x, +y, +z on the face x + y + z = ct, in coordinates (x, y)."""
    vel = c * np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    if kind == "osm":
        share, leak = lam / 4, lam / 2
    else:
        share, leak = lam / 6, lam / 2
    return generator_operator(vel, (np.ones((3, 3)) - np.eye(3)) * share, TXY, leak=leak)


def txty_generator(kind: str, lam: float) -> Operator:
    """Occupation clocks (T_x, T_y) in variables (t, x=s, y=r)."""
    vel = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    share = lam / 2 if kind == "osm" else lam / 3
    return generator_operator(vel, (np.ones((3, 3)) - np.eye(3)) * share, TXY)


# ---------------------------------------------------------------------------
# three dimensions


def sixth_order(lam: float, c: float) -> Operator:
    """Sixth-order OSM equation, as LHS - RHS with T = d_t + lam."""
    v = TXYZ
    T = _d("t", v) + lam
    dxx, dyy, dzz = (_d(a, v, 2) for a in "xyz")
    left = T**6 - 3 * lam**2 / 4 * T**4 - lam**3 / 4 * T**3
    right = (c**6 * dxx * dyy * dzz
             - c**4 * T**2 * (dxx * dyy + dxx * dzz + dyy * dzz)
             + c * c * (T**4 - lam**2 / 4 * T**2) * (dxx + dyy + dzz))
    return left - right


def sixth_order_dalembert(lam: float, c: float) -> Operator:
    """box_x box_y box_z - (3 lam^2/4) d_t^2 (d_t^2 + (lam/3) d_t - (c^2/3) lap), on q = e^{lam t} p."""
    v = TXYZ
    dt = _d("t", v)
    boxes = [dt * dt - c * c * _d(a, v, 2) for a in "xyz"]
    lap = sum((_d(a, v, 2) for a in "xyz"), Operator(v, {}))
    return boxes[0] * boxes[1] * boxes[2] - 3 * lam**2 / 4 * dt * dt * (dt * dt + lam / 3 * dt - c * c / 3 * lap)


def ortho3d_generator(kind: str, lam: float, c: float) -> Operator:
    vel = c * np.vstack([np.eye(3), -np.eye(3)])
    if kind == "osm":
        rates = np.array([[0.0 if i % 3 == j % 3 else lam / 4 for j in range(6)] for i in range(6)])
    else:
        rates = (np.ones((6, 6)) - np.eye(6)) * lam / 6
    return generator_operator(vel, rates, TXYZ)


def heat_kac(variables=TXYZ) -> Operator:
    """d_t - lap/3: the Kac limit with lam / c^2 = 1."""
    lap = sum((_d(a, variables, 2) for a in variables[1:]), Operator(variables, {}))
    return _d("t", variables) - lap * (1 / 3)


@dataclass(frozen=True)
class EquationEntry:
    equation_id: str
    build: Callable[..., Operator]
    description: str


CATALOGUE: tuple[EquationEntry, ...] = (
    EquationEntry("telegraph", telegraph, "symmetric telegraph law"),
    EquationEntry("edge-osm", edge_osm, "OSM density on one edge"),
    EquationEntry("edge-osm-conditioned", edge_osm_conditioned, "OSM edge law given no vertical move"),
    EquationEntry("edge-oum", edge_oum, "OUM density on one edge"),
    EquationEntry("tz-osm", tz_osm, "density of T_z, OSM"),
    EquationEntry("tz-oum", tz_oum, "density of T_z, OUM"),
    EquationEntry("z-eq-ctz-oum", z_eq_ctz_oum, "P{T_z in ds, Z = cs}, OUM"),
    EquationEntry("z-eq-ctz-oum-conditioned", z_eq_ctz_oum_conditioned, "T_z given Z = c T_z, OUM"),
    EquationEntry("tz-eq-t-oum", tz_eq_t_oum, "P{T_z = t, Z in dz}, OUM"),
    EquationEntry("joint-tz-z", joint_tz_z_expanded, "(T_z, Z), third order"),
    EquationEntry("joint-tz-z-factored-osm", joint_tz_z_factored_osm, "(T_z, Z) OSM, telegraph factor"),
    EquationEntry("planar3", planar3_generator, "three-direction planar motion"),
    EquationEntry("planar-orthogonal", planar_orthogonal_fourth_order, "orthogonal planar motion, fourth order"),
    EquationEntry("plane", plane_generator, "horizontal-plane density of the 3-D motion"),
    EquationEntry("face-osm", face_osm, "OSM density on one face, third order"),
    EquationEntry("face", face_generator, "face density, either kind"),
    EquationEntry("joint-txty", txty_generator, "(T_x, T_y) density"),
    EquationEntry("sixth-order", sixth_order, "OSM interior density"),
    EquationEntry("sixth-order-dalembert", sixth_order_dalembert, "conjugated D'Alembert-product form"),
)
