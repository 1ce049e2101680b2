"""Per-site asymptotic quantities by quadrature over the torus.

The per-site limit of the quasi-power trace log is

    psi(t) = -mean log[ (1+q1)^t (1+q2)^(1-t) - q1^t q2^(1-t) ],

the mean taken with the normalized tensor trapezoid rule, which is exact
for trigonometric polynomials.  Boundary derivatives come from closed-form
integrals of the scalar Bernoulli relative entropy, never from one-sided
differences (those are kept as a test oracle only).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from ._search import bisect_decreasing, maximize_concave, minimize_convex
from .calculus import apply_fn, eigh, support_power
from .errors import (
    DomainError,
    NegativeParameter,
    NonFiniteIntegrand,
    ParameterOutOfRange,
    StrictPositivityRequired,
)
from .lattice import DENSE_CAP, restrict_symbol
from .symbols import (
    DiscriminationProblem,
    SymbolSpec,
    symbol_values,
    strict_positivity_required,
    uniform_grid,
)

DEFAULT_POINTS = {1: 512, 2: 64, 3: 16}


@dataclass(frozen=True)
class QuadratureRule:
    """Uniform tensor grid on [0, 2pi)^dim with equal weights summing to 1."""

    dim: int
    points_per_axis: int
    nodes: np.ndarray
    weight: float


def make_rule(dim: int, points_per_axis: int | None = None) -> QuadratureRule:
    if points_per_axis is None:
        points_per_axis = DEFAULT_POINTS.get(dim, 8)
    nodes = uniform_grid(dim, points_per_axis)
    return QuadratureRule(
        dim=dim,
        points_per_axis=points_per_axis,
        nodes=nodes,
        weight=1.0 / len(nodes),
    )


def integrate(f: Callable, rule: QuadratureRule) -> float:
    """Normalized integral of a scalar function over the torus."""
    vals = np.array([float(f(x if rule.dim > 1 else x[0])) for x in rule.nodes])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand("integrand is not finite at a quadrature node")
    return float(np.sum(vals) * rule.weight)


def bernoulli_relative_entropy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Relative entropy of the Bernoulli pairs (a, 1-a) and (b, 1-b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a * (np.log(a) - np.log(b)) + (1.0 - a) * (np.log1p(-a) - np.log1p(-b))


class AsymptoticProblem:
    """Symbol values cached on the quadrature grid for one problem."""

    def __init__(self, problem: DiscriminationProblem, rule: QuadratureRule | None = None):
        if rule is None:
            rule = make_rule(problem.dim)
        self.problem = problem
        self.rule = rule
        q1 = symbol_values(problem.state1.symbol, rule.nodes)
        q2 = symbol_values(problem.state2.symbol, rule.nodes)
        if min(q1.min(), q2.min()) < -1e-9:
            raise NonFiniteIntegrand("symbol is negative at a quadrature node")
        self.q1 = np.maximum(q1, 0.0)
        self.q2 = np.maximum(q2, 0.0)
        self.r1 = self.q1 / (1.0 + self.q1)
        self.r2 = self.q2 / (1.0 + self.q2)
        self._log1p_q1 = np.log1p(self.q1)
        self._log1p_q2 = np.log1p(self.q2)

    def _mean(self, vals: np.ndarray) -> float:
        if not np.all(np.isfinite(vals)):
            raise NonFiniteIntegrand("integrand is not finite at a quadrature node")
        return float(np.sum(vals) * self.rule.weight)

    def _require_strict(self):
        if not strict_positivity_required(self.problem):
            raise StrictPositivityRequired(
                "operation needs both symbols bounded away from zero"
            )

    def _w(self, t: float) -> np.ndarray:
        # r1^t r2^(1-t) with the support convention 0^t = 0
        return support_power(self.r1, t) * support_power(self.r2, 1.0 - t)

    def psi(self, t: float) -> float:
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"psi is defined for t in [0, 1], got {t}")
        w = self._w(t)
        if w.max(initial=0.0) >= 1.0:
            raise NonFiniteIntegrand("integrand diverges: r1^t r2^(1-t) reaches 1")
        vals = -(t * self._log1p_q1 + (1.0 - t) * self._log1p_q2 + np.log1p(-w))
        return self._mean(vals)

    def _log_ratio(self) -> np.ndarray:
        return np.log(self.r1) - np.log(self.r2)

    def psi_prime(self, t: float) -> float:
        """Closed-form derivative of psi on (0, 1); needs strict positivity."""
        self._require_strict()
        w = self._w(t)
        vals = -(self._log1p_q1 - self._log1p_q2) + w * self._log_ratio() / (1.0 - w)
        return self._mean(vals)

    def psi_second(self, t: float) -> float:
        """Second derivative of psi on (0, 1); needs strict positivity.

        The integrand carries the factor w_t = r1^t r2^(1-t); the
        finite-difference oracle in the tests is the arbiter for that factor.
        """
        self._require_strict()
        if not 0.0 < t < 1.0:
            raise DomainError(f"psi'' is defined on (0, 1), got {t}")
        w = self._w(t)
        L = self._log_ratio()
        return self._mean(w * L**2 / (1.0 - w) ** 2)

    def psi_second_unweighted(self, t: float) -> float:
        """The same integrand without the w_t factor (rejected candidate)."""
        self._require_strict()
        w = self._w(t)
        L = self._log_ratio()
        return self._mean(L**2 / (1.0 - w) ** 2)

    def dpsi_boundary(self, side: str) -> float:
        self._require_strict()
        if side == "left_at_1":
            vals = (1.0 + self.q1) * bernoulli_relative_entropy(self.r1, self.r2)
            return self._mean(vals)
        if side == "right_at_0":
            vals = (1.0 + self.q2) * bernoulli_relative_entropy(self.r2, self.r1)
            return -self._mean(vals)
        raise DomainError(f"side must be 'left_at_1' or 'right_at_0', got {side!r}")

    def mean_chernoff(self) -> tuple[float, float]:
        value, t_star = minimize_convex(self.psi, 0.0, 1.0)
        return max(-value, 0.0), t_star

    def mean_hoeffding(self, r: float) -> float:
        if r < 0:
            raise NegativeParameter(f"rate parameter must be >= 0, got {r}")
        if r == 0:
            return self.dpsi_boundary("left_at_1")
        value, _ = maximize_concave(
            lambda t: (-t * r - self.psi(t)) / (1.0 - t), 0.0, 1.0 - 1e-6
        )
        return value

    def polar(self, a: float) -> float:
        """sup over t in [0, 1] of t a - psi(t); concave objective."""
        value, _ = maximize_concave(lambda t: t * a - self.psi(t), 0.0, 1.0)
        return value

    def hoeffding_threshold(self, r: float) -> float:
        """The unique a with polar(a) - a = r, for 0 <= r < d21."""
        self._require_strict()
        d21 = -self.dpsi_boundary("right_at_0")
        if not 0.0 <= r < d21:
            raise ParameterOutOfRange(f"r must lie in [0, {d21:.12g}), got {r}")
        lo = self.dpsi_boundary("right_at_0") - 1e-12
        hi = self.dpsi_boundary("left_at_1") + 1e-12
        a_r = bisect_decreasing(lambda a: (self.polar(a) - a) - r, lo, hi)
        gap = abs(self.polar(a_r) - self.mean_hoeffding(r))
        if gap > 1e-7:
            raise DomainError(
                f"polar({a_r:.12g}) disagrees with the Hoeffding value by {gap:.3e}"
            )
        return a_r


def psi_asym(problem: DiscriminationProblem, t: float, rule: QuadratureRule) -> float:
    return AsymptoticProblem(problem, rule).psi(t)


def dpsi_boundary(problem: DiscriminationProblem, side: str, rule: QuadratureRule) -> float:
    return AsymptoticProblem(problem, rule).dpsi_boundary(side)


def psi_second(problem: DiscriminationProblem, t: float, rule: QuadratureRule) -> float:
    return AsymptoticProblem(problem, rule).psi_second(t)


def mean_chernoff(problem: DiscriminationProblem, rule: QuadratureRule) -> tuple[float, float]:
    return AsymptoticProblem(problem, rule).mean_chernoff()


def mean_hoeffding(problem: DiscriminationProblem, r: float, rule: QuadratureRule) -> float:
    return AsymptoticProblem(problem, rule).mean_hoeffding(r)


def polar(problem: DiscriminationProblem, a: float, rule: QuadratureRule) -> float:
    return AsymptoticProblem(problem, rule).polar(a)


def hoeffding_threshold(problem: DiscriminationProblem, r: float, rule: QuadratureRule) -> float:
    return AsymptoticProblem(problem, rule).hoeffding_threshold(r)


@dataclass(frozen=True)
class SzegoRow:
    n: int
    lhs: float
    rhs: float
    gap: float


def szego_check(
    symbols: Sequence[SymbolSpec],
    functions: Sequence[Callable[[np.ndarray], np.ndarray]],
    n_list: Sequence[int],
    rule: QuadratureRule,
    dense_cap: int = DENSE_CAP,
) -> list[SzegoRow]:
    """Compare (1/n^dim) Tr f1(Q1^(n)) ... fr(Qr^(n)) against its torus integral."""
    if len(symbols) != len(functions):
        raise DomainError("need one function per symbol")
    with np.errstate(all="ignore"):
        prod = np.ones(len(rule.nodes))
        for sym, f in zip(symbols, functions):
            prod = prod * np.asarray(f(symbol_values(sym, rule.nodes)), dtype=float)
    if not np.all(np.isfinite(prod)):
        raise NonFiniteIntegrand("integrand is not finite at a quadrature node")
    rhs = float(np.sum(prod) * rule.weight)

    rows = []
    for n in n_list:
        acc = None
        for sym, f in zip(symbols, functions):
            m = apply_fn(eigh(restrict_symbol(sym, n, dense_cap=dense_cap)), f)
            acc = m if acc is None else acc @ m
        lhs = float(np.real(np.trace(acc))) / n ** symbols[0].dim
        rows.append(SzegoRow(n=n, lhs=lhs, rhs=rhs, gap=abs(lhs - rhs)))
    return rows


@dataclass(frozen=True)
class AsymptoticReport:
    """Per-site curve and scalar block for one problem."""

    t_grid: np.ndarray
    psi: np.ndarray
    mean_chernoff: float
    t_star: float
    mean_hoeffding: Mapping[float, float]
    polar: Mapping[float, float]
    d12: float | None
    d21: float | None


def asymptotic_report(
    problem: DiscriminationProblem,
    rule: QuadratureRule,
    t_grid: np.ndarray,
    r_list: Sequence[float] = (),
    a_list: Sequence[float] = (),
) -> AsymptoticReport:
    ap = AsymptoticProblem(problem, rule)
    psi = np.array([ap.psi(t) for t in t_grid])
    if psi.size and psi.max() > 1e-9:
        raise DomainError(f"psi exceeded its nonpositivity tolerance: {psi.max():.3e}")
    chernoff, t_star = ap.mean_chernoff()
    strict = strict_positivity_required(problem)
    hoeffding = {float(r): ap.mean_hoeffding(float(r)) for r in r_list if r > 0 or strict}
    polar_map = {float(a): ap.polar(float(a)) for a in a_list}
    return AsymptoticReport(
        t_grid=np.asarray(t_grid, dtype=float),
        psi=psi,
        mean_chernoff=chernoff,
        t_star=t_star,
        mean_hoeffding=hoeffding,
        polar=polar_map,
        d12=ap.dpsi_boundary("left_at_1") if strict else None,
        d21=-ap.dpsi_boundary("right_at_0") if strict else None,
    )
