"""Standard-form LPs and a stepwise infeasible-start predictor-corrector.

The solver works on ``min c'x  s.t.  Ax = b, x >= 0`` and keeps a primal
iterate ``x > 0`` and a dual iterate ``(y, s > 0)`` with ``s ~ c - A'y``.
Each :func:`pd_step` is one Mehrotra predictor-corrector iteration: the
normal equations ``A diag(x/s) A'`` are factorized once (dense Cholesky,
static diagonal regularization) and reused for the predictor and corrector
solves; steps are damped by a 0.9995 fraction-to-boundary rule. Iterates,
residual norms and objective values are exposed after every iteration so
callers can stop on bound information alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from ._kernels import STEP_FACTORIZATION_FAILED, pd_step_kernel
from .errors import ContractViolation, SolverFailure

#: Residual norm below which an iterate counts as (primal/dual) feasible.
EPS_FEAS = 1e-8
#: Default duality-gap tolerance for full solves.
DEFAULT_EPS = 1e-8
#: Iteration cap per LP.
MAX_ITER = 500
#: Fraction-to-boundary damping.
FTB = 0.9995
#: Static regularization added to the normal-equations diagonal.
REG = 1e-10
#: Warm-start clamp for source-variable coordinates.
DELTA_INTERIOR = 1e-2
#: Warm-start floor for derived slack coordinates; below EPS_FEAS so an
#: exactly feasible warm start stays certified after interiorization.
SLACK_FLOOR = 1e-9
#: Rank threshold for redundant equality-row removal.
RANK_TOL = 1e-12

_DIVERGENCE = 1e12


@dataclass(frozen=True)
class LpProblem:
    """A source LP: equalities, <= and >= rows over nonnegative/free variables."""

    objective: np.ndarray
    maximize: bool = False
    free: Optional[np.ndarray] = None  # bool mask, default all nonnegative
    a_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    a_le: Optional[np.ndarray] = None
    b_le: Optional[np.ndarray] = None
    a_ge: Optional[np.ndarray] = None
    b_ge: Optional[np.ndarray] = None


@dataclass(frozen=True)
class StandardFormLP:
    """``min c'x, Ax = b, x >= 0`` plus the bookkeeping to undo the rewrite.

    ``var_plus``/``var_minus`` give, per source variable, the column of its
    (positive part and, for split free variables, negative part);
    ``slack_cols[i]`` is the slack column of row i (-1 for equalities).
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    var_plus: np.ndarray
    var_minus: np.ndarray
    slack_cols: np.ndarray
    flip_objective: bool = False
    name: str = ""

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def n_source(self) -> int:
        return self.var_plus.size

    def source_values(self, x: np.ndarray) -> np.ndarray:
        """Recover source-variable values from a standard-form point."""
        v = x[self.var_plus].copy()
        split = self.var_minus >= 0
        v[split] -= x[self.var_minus[split]]
        return v

    def source_objective(self, std_value: float) -> float:
        """Map a standard-form objective value back to the source sense."""
        return -std_value if self.flip_objective else std_value


def _as_rows(a, b, n_src, what):
    if a is None and b is None:
        return np.zeros((0, n_src)), np.zeros(0)
    a = np.asarray(a, dtype=float)
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.ndim != 2 or a.shape[1] != n_src or a.shape[0] != b.size:
        raise ContractViolation(f"{what}: inconsistent dimensions {a.shape} vs {b.shape}")
    return a, b


def _drop_redundant_eq(a_eq, b_eq):
    """Remove linearly dependent equality rows (rank-revealing QR)."""
    m = a_eq.shape[0]
    if m < 2:
        return a_eq, b_eq
    _, r, piv = scipy.linalg.qr(a_eq.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = max(diag[0] if diag.size else 0.0, 1.0)
    rank = int((diag > RANK_TOL * scale).sum())
    if rank == m:
        return a_eq, b_eq
    keep = np.sort(piv[:rank])
    drop = np.sort(piv[rank:])
    coeff, *_ = np.linalg.lstsq(a_eq[keep].T, a_eq[drop].T, rcond=None)
    if np.abs(b_eq[drop] - coeff.T @ b_eq[keep]).max(initial=0.0) > 1e-9:
        raise ContractViolation("inconsistent redundant equality rows")
    return a_eq[keep], b_eq[keep]


def to_standard_form(spec: LpProblem, name: str = "") -> StandardFormLP:
    """Rewrite a source LP into ``min c'x, Ax = b, x >= 0``.

    Equalities are preserved, every inequality row gets one slack column and
    every free variable is split into a difference of two nonnegative
    columns; the returned metadata recovers source values exactly.
    """
    objective = np.asarray(spec.objective, dtype=float)
    n_src = objective.size
    free = (np.zeros(n_src, dtype=bool) if spec.free is None
            else np.asarray(spec.free, dtype=bool))
    if free.size != n_src:
        raise ContractViolation("free mask length differs from objective length")

    a_eq, b_eq = _as_rows(spec.a_eq, spec.b_eq, n_src, "equalities")
    a_le, b_le = _as_rows(spec.a_le, spec.b_le, n_src, "<= rows")
    a_ge, b_ge = _as_rows(spec.a_ge, spec.b_ge, n_src, ">= rows")
    a_eq, b_eq = _drop_redundant_eq(a_eq, b_eq)

    m_eq, m_le, m_ge = a_eq.shape[0], a_le.shape[0], a_ge.shape[0]
    m = m_eq + m_le + m_ge
    if m == 0:
        raise ContractViolation("LP needs at least one constraint row")

    var_plus = np.empty(n_src, dtype=np.intp)
    var_minus = np.full(n_src, -1, dtype=np.intp)
    col = 0
    for j in range(n_src):
        var_plus[j] = col
        col += 1
        if free[j]:
            var_minus[j] = col
            col += 1
    n = col + m_le + m_ge

    a_src = np.vstack([a_eq, a_le, a_ge])
    b = np.concatenate([b_eq, b_le, b_ge])
    A = np.zeros((m, n))
    A[:, var_plus] = a_src
    if free.any():
        A[:, var_minus[free]] = -a_src[:, free]
    slack_cols = np.full(m, -1, dtype=np.intp)
    for i in range(m_le):
        slack_cols[m_eq + i] = col
        A[m_eq + i, col] = 1.0
        col += 1
    for i in range(m_ge):
        slack_cols[m_eq + m_le + i] = col
        A[m_eq + m_le + i, col] = -1.0
        col += 1

    c_src = -objective if spec.maximize else objective
    c = np.zeros(n)
    c[var_plus] = c_src
    if free.any():
        c[var_minus[free]] = -c_src[free]

    return StandardFormLP(
        c=np.ascontiguousarray(c), A=np.ascontiguousarray(A),
        b=np.ascontiguousarray(b), var_plus=var_plus, var_minus=var_minus,
        slack_cols=slack_cols, flip_objective=bool(spec.maximize), name=name)


@dataclass
class IterateState:
    """One interior-point iterate: strictly positive x and s, free y."""

    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    r_p: float
    r_d: float
    mu: float
    primal_value: float
    dual_value: float
    iteration: int = 0


@dataclass(frozen=True)
class BoundsPair:
    """Certified objective bounds: dual value below, primal value above."""

    lower: float
    upper: float
    certified: bool


def _make_state(lp: StandardFormLP, x, y, s, iteration=0) -> IterateState:
    r_p = float(np.abs(lp.A @ x - lp.b).max(initial=0.0))
    r_d = float(np.abs(lp.A.T @ y + s - lp.c).max(initial=0.0))
    return IterateState(
        x=x, y=y, s=s, r_p=r_p, r_d=r_d, mu=float(x @ s) / lp.n,
        primal_value=float(lp.c @ x), dual_value=float(lp.b @ y),
        iteration=iteration)


def pd_init(lp: StandardFormLP, warm=None, dual_warm=None) -> IterateState:
    """Initial iterate, cold or interiorized from warm starts.

    ``warm`` is a source-variable assignment: nonnegative coordinates are
    clamped up to DELTA_INTERIOR, free variables are split exactly (both
    halves raised by DELTA_INTERIOR), slack columns are recomputed from their
    rows and floored at SLACK_FLOOR. ``dual_warm`` is a y vector; s is set to
    c - A'y floored at SLACK_FLOOR. An exactly feasible warm start therefore
    stays feasible to within SLACK_FLOOR; a violated constraint simply shows
    up in the residuals (infeasible starts are legal). The cold start is
    x = max(1, ||b||_inf) * 1, s = max(1, ||c||_inf) * 1, y = 0.
    """
    if warm is None:
        x = np.full(lp.n, max(1.0, float(np.abs(lp.b).max(initial=0.0))))
    else:
        v = np.asarray(warm, dtype=float)
        if v.size != lp.n_source:
            raise ContractViolation(
                f"warm start has {v.size} values, LP has {lp.n_source} source variables")
        x = np.zeros(lp.n)
        split = lp.var_minus >= 0
        plus = np.where(split, np.maximum(v, 0.0) + DELTA_INTERIOR,
                        np.maximum(v, DELTA_INTERIOR))
        x[lp.var_plus] = plus
        x[lp.var_minus[split]] = np.maximum(-v[split], 0.0) + DELTA_INTERIOR
        rows = np.nonzero(lp.slack_cols >= 0)[0]
        if rows.size:
            cols = lp.slack_cols[rows]
            resid = lp.b[rows] - lp.A[rows] @ x
            x[cols] = np.maximum(resid / lp.A[rows, cols], SLACK_FLOOR)
    if dual_warm is None:
        y = np.zeros(lp.m)
        s = np.full(lp.n, max(1.0, float(np.abs(lp.c).max(initial=0.0))))
    else:
        y = np.array(dual_warm, dtype=float)
        if y.size != lp.m:
            raise ContractViolation(f"dual warm start has {y.size} values for {lp.m} rows")
        s = np.maximum(lp.c - lp.A.T @ y, SLACK_FLOOR)
    return _make_state(lp, x, y, s)


def pd_step(lp: StandardFormLP, state: IterateState, reg: float = REG,
            ftb: float = FTB) -> IterateState:
    """One predictor-corrector iteration; preserves strict interiority.

    Raises :class:`SolverFailure` (carrying the iterate) on numerical
    breakdown of the normal-equations factorization.
    """
    x, y, s, r_p, r_d, mu, cx, by, status = pd_step_kernel(
        lp.A, lp.b, lp.c, state.x, state.y, state.s, reg, ftb)
    if status != 0:
        what = ("singular normal equations" if status == STEP_FACTORIZATION_FAILED
                else "non-finite iterate")
        raise SolverFailure(f"{what} at iteration {state.iteration + 1}"
                            f"{' of ' + lp.name if lp.name else ''}", state=state)
    return IterateState(x=np.asarray(x), y=np.asarray(y), s=np.asarray(s),
                        r_p=r_p, r_d=r_d, mu=mu, primal_value=cx, dual_value=by,
                        iteration=state.iteration + 1)


def bounds(state: IterateState, eps_feas: float = EPS_FEAS) -> BoundsPair:
    """Objective bounds at an iterate; trusted only when certified."""
    return BoundsPair(lower=state.dual_value, upper=state.primal_value,
                      certified=state.r_p < eps_feas and state.r_d < eps_feas)


class SolveStatus(Enum):
    CONVERGED = "converged"
    EARLY_STOPPED = "early_stopped"
    ITERATION_LIMIT = "iteration_limit"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    value: Optional[float]
    state: IterateState


def solve_to_tolerance(lp: StandardFormLP, eps: float = DEFAULT_EPS,
                       stop: Optional[Callable[[BoundsPair], bool]] = None, *,
                       warm=None, dual_warm=None, state: Optional[IterateState] = None,
                       max_iter: int = MAX_ITER, eps_feas: float = EPS_FEAS,
                       on_iterate: Optional[Callable[[IterateState], None]] = None
                       ) -> SolveResult:
    """Iterate pd_step until max(gap, r_P, r_D) < eps, a stop fires, or a cap.

    ``stop`` is consulted only on certified bounds and yields EARLY_STOPPED
    with ``value=None``. Divergence heuristics flag UNBOUNDED (primal value
    below -1e12 while near primal-feasible) and INFEASIBLE (dual value above
    1e12 while near dual-feasible).
    """
    if eps <= 0:
        raise ContractViolation(f"eps must be positive, got {eps}")
    if state is None:
        state = pd_init(lp, warm=warm, dual_warm=dual_warm)
    for _ in range(max_iter):
        state = pd_step(lp, state)
        if on_iterate is not None:
            on_iterate(state)
        gap = state.primal_value - state.dual_value
        if max(gap, state.r_p, state.r_d) < eps:
            value = 0.5 * (state.primal_value + state.dual_value)
            return SolveResult(SolveStatus.CONVERGED, value, state)
        if stop is not None:
            bp = bounds(state, eps_feas)
            if bp.certified and stop(bp):
                return SolveResult(SolveStatus.EARLY_STOPPED, None, state)
        if state.primal_value < -_DIVERGENCE and state.r_p < 1e-3:
            return SolveResult(SolveStatus.UNBOUNDED, None, state)
        if state.dual_value > _DIVERGENCE and state.r_d < 1e-3:
            return SolveResult(SolveStatus.INFEASIBLE, None, state)
    return SolveResult(SolveStatus.ITERATION_LIMIT, None, state)
