"""Closed-form finite-volume quantities on the cube C_n.

For each hypothesis the one-particle data is the restricted symbol matrix
Q, the contraction R = Q (Q + I)^-1, and the normalization
log N = -Tr log(I + Q).  The quasi-power trace of the two restricted states
is, for t in [0, 1],

    psi_n(t) = log c_t + t log N_1 + (1 - t) log N_2 - Tr log(I - W_t),

with W_t = R_1^(t/2) R_2^(1-t) R_1^(t/2) and c_t the displacement factor.
R is always computed from the restricted Q, never by restricting a
pre-built contraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ._search import maximize_concave, minimize_convex
from .calculus import (
    EigenSystem,
    apply_fn,
    eigh,
    psd_values,
    sandwich_power_es,
    support_power,
)
from .errors import (
    DisplacementMismatch,
    DomainError,
    NegativeParameter,
    NotTraceClass,
    StrictPositivityRequired,
    ValidationError,
)
from .lattice import DENSE_CAP, SiteIndexer, restrict_displacement, restrict_symbol
from .symbols import DiscriminationProblem, GaussianStateSpec, strict_positivity_required

W_ONE_TOL = 1e-12


@dataclass(frozen=True)
class FiniteStateData:
    """One hypothesis restricted to C_n: matrices, normalization, displacement."""

    n: int
    Q: np.ndarray
    R: np.ndarray
    logN: float
    y: np.ndarray
    eig: EigenSystem  # eigensystem of Q, shared by all scalar functions of it


def build_state_data(
    state: GaussianStateSpec, n: int, dense_cap: int = DENSE_CAP
) -> FiniteStateData:
    """Restrict a Gaussian state spec to the cube of side n."""
    Q = restrict_symbol(state.symbol, n, dense_cap=dense_cap)
    es = eigh(Q)
    vals = psd_values(es.values, clip=1e-9)
    es = EigenSystem(values=vals, vectors=es.vectors)
    R = apply_fn(es, lambda s: s / (1.0 + s))
    logN = -float(np.sum(np.log1p(vals)))
    indexer = SiteIndexer(dim=state.symbol.dim, side=n)
    y = restrict_displacement(state.displacement, n, indexer)
    return FiniteStateData(n=n, Q=Q, R=R, logN=logN, y=y, eig=es)


def _solve_quadratic_form(es: EigenSystem, rhs: np.ndarray) -> float:
    """<B^-1 rhs, rhs> for Hermitian positive definite B given by its eigensystem."""
    if es.values.min(initial=np.inf) <= 0:
        raise DomainError("bracket matrix is singular")
    z = es.vectors.conj().T @ rhs
    return float(np.real(np.sum(np.abs(z) ** 2 / es.values)))


class FiniteProblem:
    """Cached finite-volume data for one (problem, n) pair.

    Builds both FiniteStateData once; t-grid evaluations reuse the stored
    eigensystems.
    """

    def __init__(self, problem: DiscriminationProblem, n: int, dense_cap: int = DENSE_CAP):
        self.problem = problem
        self.n = n
        self.kappa = problem.kappa
        self.data1 = build_state_data(problem.state1, n, dense_cap)
        self.data2 = build_state_data(problem.state2, n, dense_cap)
        self.ybar = self.data2.y - self.data1.y
        r1 = self.data1.eig.values / (1.0 + self.data1.eig.values)
        r2 = self.data2.eig.values / (1.0 + self.data2.eig.values)
        self._es_r1 = EigenSystem(values=r1, vectors=self.data1.eig.vectors)
        self._es_r2 = EigenSystem(values=r2, vectors=self.data2.eig.vectors)

    @property
    def has_displacement(self) -> bool:
        return bool(np.any(self.ybar != 0))

    def _f_matrix(self, es_r: EigenSystem, t: float) -> np.ndarray:
        # f_t on the symbol a = 1 + 2q, expressed through r = q/(1+q):
        # f_t(a) = (1 + r^t) / (1 - r^t), with 0^t = 0 on the kernel.
        u = support_power(es_r.values, t)
        return (es_r.vectors * ((1.0 + u) / (1.0 - u))) @ es_r.vectors.conj().T

    def displacement_factor(self, t: float) -> float:
        """The factor c_t in (0, 1]; equals 1 exactly when the displacements agree."""
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"displacement factor is defined for t in [0, 1], got {t}")
        if not self.has_displacement:
            return 1.0
        if t == 0.0:
            if not self.problem.state1.symbol.is_vacuum:
                return 1.0
            bracket = 2.0 * self.data2.Q + 2.0 * np.eye(len(self.data2.Q))
        elif t == 1.0:
            if not self.problem.state2.symbol.is_vacuum:
                return 1.0
            bracket = 2.0 * self.data1.Q + 2.0 * np.eye(len(self.data1.Q))
        else:
            bracket = self._f_matrix(self._es_r1, t) + self._f_matrix(self._es_r2, 1.0 - t)
        quad = _solve_quadratic_form(eigh(bracket), self.ybar)
        return float(np.exp(-2.0 * self.kappa * quad))

    def _log_trace_term(self, t: float, tol: float, error: type) -> float:
        w = np.linalg.eigvalsh(sandwich_power_es(self._es_r1, self._es_r2, t))
        if w.max(initial=0.0) >= 1.0 - tol:
            raise error(f"sandwiched product has eigenvalue {w.max():.12g} >= 1 at t = {t}")
        return -float(np.sum(np.log1p(-np.minimum(w, 1.0))))

    def psi(self, t: float) -> float:
        """log of the quasi-power trace of the two restricted states, t in [0, 1]."""
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"psi_n is defined for t in [0, 1], got {t}")
        log_c = float(np.log(self.displacement_factor(t)))
        base = t * self.data1.logN + (1.0 - t) * self.data2.logN
        return log_c + base + self._log_trace_term(t, 0.0, DomainError)

    def psi_extended(self, t: float) -> float:
        """Same-displacement extension of psi to any real t with W_t < I."""
        if dict(self.problem.state1.displacement.support) != dict(
            self.problem.state2.displacement.support
        ):
            raise DisplacementMismatch("extension requires identical displacements")
        base = t * self.data1.logN + (1.0 - t) * self.data2.logN
        return base + self._log_trace_term(t, W_ONE_TOL, NotTraceClass)

    def chernoff(self, coarse: int = 33, tol: float = 1e-10) -> tuple[float, float]:
        """(-min psi over [0,1], minimizing t); psi is convex in t."""
        value, t_star = minimize_convex(self.psi, 0.0, 1.0, coarse=coarse, tol=tol)
        return -value, t_star

    def hoeffding(self, r: float) -> float:
        """sup over t in [0,1) of (-t r - psi(t)) / (1 - t); r = 0 uses the derivative identity."""
        if r < 0:
            raise NegativeParameter(f"rate parameter must be >= 0, got {r}")
        if r == 0:
            return self.relative_entropy("12")
        value, _ = maximize_concave(
            lambda t: (-t * r - self.psi(t)) / (1.0 - t), 0.0, 1.0 - 1e-6
        )
        return value

    def relative_entropy(self, direction: str = "12") -> float:
        """Relative entropy of the restricted states; needs strictly positive symbols."""
        if not strict_positivity_required(self.problem):
            raise StrictPositivityRequired(
                "relative entropy needs both symbols bounded away from zero"
            )
        if direction == "12":
            da, db = self.data1, self.data2
        elif direction == "21":
            da, db = self.data2, self.data1
        else:
            raise ValidationError("direction", "must be '12' or '21'")
        log_ra = apply_fn(da.eig, lambda s: np.log(s) - np.log1p(s))
        log_rb = apply_fn(db.eig, lambda s: np.log(s) - np.log1p(s))
        log_ia = apply_fn(da.eig, lambda s: -np.log1p(s))  # log(I - R_a)
        log_ib = apply_fn(db.eig, lambda s: -np.log1p(s))
        eye = np.eye(len(da.R))
        s2 = da.R @ (log_ra - log_rb) + (eye - da.R) @ (log_ia - log_ib)
        weight = da.Q + eye
        value = float(np.real(np.trace(weight @ s2)))
        if np.any(self.ybar != 0):
            value -= self.kappa * float(
                np.real(self.ybar.conj() @ (log_rb @ self.ybar))
            )
        return value


def displacement_factor(problem: DiscriminationProblem, n: int, t: float) -> float:
    return FiniteProblem(problem, n).displacement_factor(t)


def psi_n(problem: DiscriminationProblem, n: int, t: float) -> float:
    return FiniteProblem(problem, n).psi(t)


def psi_n_extended(problem: DiscriminationProblem, n: int, t: float) -> float:
    return FiniteProblem(problem, n).psi_extended(t)


def chernoff_finite(problem: DiscriminationProblem, n: int) -> tuple[float, float]:
    return FiniteProblem(problem, n).chernoff()


def hoeffding_finite(problem: DiscriminationProblem, n: int, r: float) -> float:
    return FiniteProblem(problem, n).hoeffding(r)


def relative_entropy_finite(
    problem: DiscriminationProblem, n: int, direction: str = "12"
) -> float:
    return FiniteProblem(problem, n).relative_entropy(direction)


@dataclass(frozen=True)
class FiniteReport:
    """Per-n summary: psi curve, Chernoff distance, Hoeffding values, entropies."""

    n: int
    t_grid: np.ndarray
    psi_values: np.ndarray
    chernoff: float
    t_star: float
    hoeffding: Mapping[float, float]
    rel_entropy_12: float | None
    rel_entropy_21: float | None


def finite_report(
    problem: DiscriminationProblem,
    n: int,
    t_grid: np.ndarray,
    r_list: tuple[float, ...] = (),
    dense_cap: int = DENSE_CAP,
) -> FiniteReport:
    fp = FiniteProblem(problem, n, dense_cap=dense_cap)
    psi_values = np.array([fp.psi(t) for t in t_grid])
    if psi_values.size and psi_values.max() > 1e-9:
        raise DomainError(f"psi_n exceeded its nonpositivity tolerance: {psi_values.max():.3e}")
    chernoff, t_star = fp.chernoff()
    strict = strict_positivity_required(problem)
    hoeffding = {float(r): fp.hoeffding(float(r)) for r in r_list if r > 0 or strict}
    d12 = fp.relative_entropy("12") if strict else None
    d21 = fp.relative_entropy("21") if strict else None
    return FiniteReport(
        n=n,
        t_grid=np.asarray(t_grid, dtype=float),
        psi_values=psi_values,
        chernoff=max(chernoff, 0.0),
        t_star=t_star,
        hoeffding=hoeffding,
        rel_entropy_12=d12,
        rel_entropy_21=d21,
    )
