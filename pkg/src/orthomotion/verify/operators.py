"""Linear differential operators with constant coefficients.

An operator is a coefficient table over multi-indices: the entry
``(a, b, ...) -> k`` stands for ``k * d^a/dv0^a d^b/dv1^b ...`` over the
operator's variables. Such operators commute, so they form a polynomial ring
and every identity between them is a finite polynomial identity. That is
what :func:`operator_identity_check` tests, by applying both sides to
smooth functions with exactly known derivatives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

DEFAULT_VARIABLES = ("t", "x", "y", "z")


@dataclass(frozen=True)
class Operator:
    variables: tuple[str, ...]
    terms: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, coef in self.terms.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != len(self.variables) or min(idx, default=0) < 0:
                raise ValueError(f"bad multi-index {idx} for variables {self.variables}")
            if coef != 0:
                clean[idx] = clean.get(idx, 0.0) + float(coef)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v != 0})

    # construction -----------------------------------------------------------

    @classmethod
    def constant(cls, value: float, variables: Sequence[str] = DEFAULT_VARIABLES) -> "Operator":
        return cls(tuple(variables), {(0,) * len(variables): value})

    @classmethod
    def partial(cls, var: str, order: int = 1, variables: Sequence[str] = DEFAULT_VARIABLES) -> "Operator":
        variables = tuple(variables)
        idx = [0] * len(variables)
        idx[variables.index(var)] = order
        return cls(variables, {tuple(idx): 1.0})

    @classmethod
    def mixed(cls, orders: Mapping[str, int], coef: float = 1.0,
              variables: Sequence[str] = DEFAULT_VARIABLES) -> "Operator":
        variables = tuple(variables)
        idx = [0] * len(variables)
        for var, k in orders.items():
            idx[variables.index(var)] += k
        return cls(variables, {tuple(idx): coef})

    # algebra ----------------------------------------------------------------

    def _coerce(self, other) -> "Operator":
        if isinstance(other, Operator):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        return Operator.constant(float(other), self.variables)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return Operator(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Operator(self.variables, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[tuple[int, ...], float] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = out.get(k, 0.0) + va * vb
        return Operator(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not operators")
        out = Operator.constant(1.0, self.variables)
        for _ in range(n):
            out = out * self
        return out

    # inspection -------------------------------------------------------------

    @property
    def order(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def coefficient(self, **orders: int) -> float:
        idx = tuple(orders.get(v, 0) for v in self.variables)
        return self.terms.get(idx, 0.0)

    def is_close(self, other: "Operator", *, rtol: float = 1e-12) -> bool:
        other = self._coerce(other)
        scale = max([abs(v) for v in self.terms.values()] + [abs(v) for v in other.terms.values()] + [1e-300])
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= rtol * scale for k in keys)

    def chop(self, rtol: float = 1e-12) -> "Operator":
        """Drop coefficients that are rounding noise relative to the largest one."""
        scale = max((abs(v) for v in self.terms.values()), default=0.0)
        return Operator(self.variables, {k: v for k, v in self.terms.items() if abs(v) > rtol * scale})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for idx in sorted(self.terms, key=lambda k: (-sum(k), tuple(-i for i in k))):
            mono = "".join(f"d{v}" + (f"^{k}" if k > 1 else "") for v, k in zip(self.variables, idx) if k)
            parts.append(f"{self.terms[idx]:+.6g}" + (f"*{mono}" if mono else ""))
        return " ".join(parts)

    # transformations --------------------------------------------------------

    def substitute(self, mapping: Mapping[str, "Operator"], variables: Sequence[str] | None = None) -> "Operator":
        """Replace each partial d/dv by ``mapping[v]`` (missing variables map to themselves).

        Covers both exponential conjugation (p = e^{-k t} q turns d/dt into
        d/dt - k when acting on q) and linear changes of variables.
        """
        new_vars = tuple(variables) if variables is not None else self.variables
        images = []
        for v in self.variables:
            img = mapping.get(v)
            if img is None:
                img = Operator.partial(v, 1, new_vars)
            if img.variables != new_vars:
                raise ValueError("substitution images must share the target variables")
            images.append(img)
        powers: dict[tuple[int, int], Operator] = {}

        def power(i: int, k: int) -> Operator:
            if (i, k) not in powers:
                powers[(i, k)] = images[i] ** k
            return powers[(i, k)]

        out = Operator(new_vars, {})
        for idx, coef in self.terms.items():
            term = Operator.constant(coef, new_vars)
            for i, k in enumerate(idx):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def conjugate_exponential(self, rates: Mapping[str, float]) -> "Operator":
        """Operator acting on q when p = exp(-sum_v rates[v] * v) q."""
        return self.substitute({v: Operator.partial(v, 1, self.variables) - k for v, k in rates.items()})

    def evaluate(self, derivative) -> np.ndarray:
        """Sum of coefficient times ``derivative(multi_index)``."""
        total = None
        for idx, coef in self.terms.items():
            val = coef * np.asarray(derivative(idx))
            total = val if total is None else total + val
        return np.asarray(0.0) if total is None else total

    def term_magnitudes(self, derivative) -> np.ndarray:
        """Sum of |coefficient times derivative|: the scale a residual is measured against."""
        total = None
        for idx, coef in self.terms.items():
            val = np.abs(coef * np.asarray(derivative(idx)))
            total = val if total is None else total + val
        return np.asarray(0.0) if total is None else total


def determinant(matrix: Sequence[Sequence[Operator | float]], variables: Sequence[str] = DEFAULT_VARIABLES) -> Operator:
    """Leibniz expansion; entries commute, so the ordinary formula applies."""
    n = len(matrix)
    entries = [[e if isinstance(e, Operator) else Operator.constant(float(e), variables) for e in row]
               for row in matrix]
    out = Operator(tuple(variables), {})
    for perm in itertools.permutations(range(n)):
        if any(not entries[i][perm[i]].terms for i in range(n)):
            continue
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Operator.constant(-1.0 if inversions % 2 else 1.0, variables)
        for i in range(n):
            term = term * entries[i][perm[i]]
        out = out + term
    return out


def generator_operator(velocities: np.ndarray, switch_rates: np.ndarray,
                       variables: Sequence[str] = DEFAULT_VARIABLES, *, time: str = "t",
                       leak: float = 0.0) -> Operator:
    """Determinant of the forward system of a velocity-switching motion.

    ``velocities[i]`` lists the velocity of state i along the spatial
    variables (all variables but ``time``). ``switch_rates[i, j]`` is the rate
    of jumping from state i to state j; the diagonal is ignored. ``leak`` is
    an extra rate, equal for all states, of leaving the modelled set of
    states for good. The state densities f_i satisfy

        (d_t + v_i . grad + out_i + leak) f_i = sum_j switch_rates[j, i] f_j,

    so every f_i, and hence their sum, is annihilated by the determinant.
    """
    variables = tuple(variables)
    space = [v for v in variables if v != time]
    velocities = np.atleast_2d(np.asarray(velocities, dtype=float))
    rates = np.asarray(switch_rates, dtype=float)
    n = len(velocities)
    if velocities.shape[1] != len(space) or rates.shape != (n, n):
        raise ValueError("velocities and switch_rates do not match the variables")
    out_rate = rates.sum(axis=1) - np.diag(rates) + leak
    matrix: list[list[Operator]] = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                op = Operator.partial(time, 1, variables) + out_rate[i]
                for var, vel in zip(space, velocities[i]):
                    if vel:
                        op = op + vel * Operator.partial(var, 1, variables)
            else:
                op = Operator.constant(-rates[j, i], variables)
            row.append(op)
        matrix.append(row)
    return determinant(matrix, variables)


# ---------------------------------------------------------------------------
# test functions with exact derivatives


@dataclass(frozen=True)
class ExpPolynomial:
    """P(v) * exp(k . v) with P a polynomial given as {multi-index: coefficient}."""

    poly: Mapping[tuple[int, ...], float]
    rates: tuple[float, ...]

    def derivative(self, alpha: Sequence[int], points: np.ndarray) -> np.ndarray:
        """Exact d^alpha at points of shape (m, dim), by the Leibniz rule."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rates = np.asarray(self.rates)
        growth = np.exp(points @ rates)
        total = np.zeros(points.shape[0])
        for beta in itertools.product(*(range(a + 1) for a in alpha)):
            weight = math.prod(math.comb(a, b) * r ** (a - b) for a, b, r in zip(alpha, beta, rates))
            if weight == 0:
                continue
            total += weight * _poly_derivative(self.poly, beta, points)
        return total * growth

    @classmethod
    def random(cls, rng: np.random.Generator, dim: int, *, degree: int = 3, rate_scale: float = 1.0) -> "ExpPolynomial":
        poly = {}
        for idx in itertools.product(range(degree + 1), repeat=dim):
            if sum(idx) <= degree:
                poly[idx] = float(rng.normal())
        return cls(poly, tuple(float(r) for r in rng.uniform(-rate_scale, rate_scale, dim)))


def _poly_derivative(poly, beta, points) -> np.ndarray:
    out = np.zeros(points.shape[0])
    for idx, coef in poly.items():
        if any(i < b for i, b in zip(idx, beta)):
            continue
        factor = coef * math.prod(math.perm(i, b) for i, b in zip(idx, beta))
        out += factor * np.prod(points ** (np.array(idx) - np.array(beta)), axis=1)
    return out


@dataclass
class IdentityReport:
    label: str
    n_functions: int
    n_points: int
    max_discrepancy: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_discrepancy < self.tolerance

    def to_dict(self) -> dict:
        return {"equation_id": self.label, "kind": "operator_identity", "test_functions": self.n_functions,
                "points": self.n_points, "max_discrepancy": self.max_discrepancy,
                "tolerance": self.tolerance, "pass": self.passed}


def operator_identity_check(form_a: Operator, form_b: Operator, *, test_functions: int = 20,
                            box: Sequence[tuple[float, float]] | None = None, points: int = 16,
                            seed: int = 0, tolerance: float = 1e-8, label: str = "") -> IdentityReport:
    """Apply both forms to random exp-polynomials; report the worst relative discrepancy.

    Relative to the sum of magnitudes of all terms of both sides at a point,
    so cancellation inside either side cannot hide a mismatch.
    """
    if form_a.variables != form_b.variables:
        raise ValueError("forms act on different variables")
    dim = len(form_a.variables)
    box = list(box) if box is not None else [(-1.0, 1.0)] * dim
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(test_functions):
        fn = ExpPolynomial.random(rng, dim)
        pts = np.column_stack([rng.uniform(lo, hi, points) for lo, hi in box])
        cache: dict[tuple[int, ...], np.ndarray] = {}

        def deriv(idx):
            if idx not in cache:
                cache[idx] = fn.derivative(idx, pts)
            return cache[idx]

        diff = np.abs(form_a.evaluate(deriv) - form_b.evaluate(deriv))
        scale = form_a.term_magnitudes(deriv) + form_b.term_magnitudes(deriv)
        worst = max(worst, float(np.max(diff / np.maximum(scale, 1e-300))))
    return IdentityReport(label, test_functions, points, worst, tolerance)
