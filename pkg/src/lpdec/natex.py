"""Natural extensions: LP pairs, reusable warm starts, streaming bounds.

For a lower prevision P and gamble f the lower natural extension is the
minimum of E_p(f) over the credal set {p : E_p(g_i) >= P(g_i)}; the upper one
is the maximum. Each sense is an LP pair: the credal-side program (P1 for
LOWER, D2 for UPPER) and the multiplier-side program over (lambda, alpha) or
(lambda, beta) (D1, P2), exposed as ``primal_lp``/``dual_lp``.

The interior-point sessions run an *anchored* multiplier-side encoding: the
free variable is replaced by u = alpha - L >= 0 (resp. v = beta - U >= 0)
with an anchor far enough below every optimum that the new bound is strictly
slack; the encoded optimum equals the natural extension minus the anchor.
This avoids splitting a free variable, whose standard-form dual has an empty
strict interior and breaks warm-started predictor-corrector steps; with the
anchor, both the closed-form multiplier start and the shared credal point
(scaled to (1 +- theta) p) are exactly feasible and strictly interior, so
sessions are certified from iteration 0. Rows stay indexed by outcomes, so
per-gamble work does not grow with the domain size; only the one-off
phase-one LP does.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from .core import Gamble, LowerPrevision, Pmf
from .errors import ContractViolation, DegenerateCredalError, SolverFailure, SureLossError
from .linprog import (DEFAULT_EPS, EPS_FEAS, MAX_ITER, IterateState, LpProblem,
                      SolveStatus, StandardFormLP, pd_init, pd_step,
                      solve_to_tolerance, to_standard_form)

#: ASL classification tolerance on the phase-one optimum.
TOL_ASL = 1e-9
#: Gap tolerance for the phase-one solve (finer than the classification).
PHASE1_EPS = 1e-9
#: Multiplier weight in the direct warm starts.
DELTA_W = 1e-2
#: Interior scaling of the credal point on the dual side of a session.
CREDAL_THETA = 1e-3
#: Distance of the anchor below/above the direct start; keeps the anchored
#: bound slack by at least 2 at the start and at every optimum.
ANCHOR_PAD = 3.0


class Sense(Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class CredalStart:
    """A pmf strictly inside the credal set, reusable across every gamble.

    ``margin`` is the smallest slack: expectation(point, g_i) - P(g_i) >=
    margin for every assessment and every mass is >= margin/|Omega|.
    """

    point: Pmf
    margin: float


class NatexFamily:
    """Shared LP structure for all natural-extension solves of one prevision.

    The anchored multiplier-side constraint matrices do not depend on the
    gamble (only the right-hand side does), so they are built once here.
    """

    def __init__(self, prevision: LowerPrevision):
        self.prevision = prevision
        gt = prevision.shifted_domain  # (M, N): rows g_i - P(g_i)
        m_dom, n_out = gt.shape
        self._n_out = n_out
        self._gt = gt
        self._h0 = DELTA_W * gt.sum(axis=0)
        objective = np.zeros(m_dom + 1)
        objective[m_dom] = 1.0
        # anchored D1: max u s.t. sum_i lambda_i gt_i(w) + u <= f(w) - L
        self._lower0 = to_standard_form(LpProblem(
            objective=objective, maximize=True,
            a_le=np.hstack([gt.T, np.ones((n_out, 1))]), b_le=np.zeros(n_out)),
            name="D1a")
        # anchored P2: min v s.t. v - sum_i lambda_i gt_i(w) >= f(w) - U
        self._upper0 = to_standard_form(LpProblem(
            objective=objective, maximize=False,
            a_ge=np.hstack([-gt.T, np.ones((n_out, 1))]), b_ge=np.zeros(n_out)),
            name="P2a")

    def problem(self, gamble: Gamble, sense: Sense) -> "NatexProblem":
        f = gamble.payoffs
        if sense is Sense.LOWER:
            offset = float(min(f.min(), (f - self._h0).min())) - ANCHOR_PAD
            lp = replace(self._lower0, b=np.ascontiguousarray(f - offset))
        else:
            offset = float(min(f.min(), (f + self._h0).min())) - ANCHOR_PAD
            lp = replace(self._upper0, b=np.ascontiguousarray(f - offset))
        return NatexProblem(self, gamble, sense, lp, offset)


class NatexProblem:
    """One (prevision, gamble, sense) instance.

    ``primal_lp``/``dual_lp`` are the literal program pair (P1/D1 for LOWER,
    P2/D2 for UPPER; both optima equal the natural extension). ``solve_lp``
    is the anchored multiplier-side encoding the sessions iterate; its
    optimum is the natural extension minus ``offset``.
    """

    def __init__(self, family: NatexFamily, gamble: Gamble, sense: Sense,
                 solve_lp: StandardFormLP, offset: float):
        self.family = family
        self.prevision = family.prevision
        self.gamble = gamble
        self.sense = sense
        self.solve_lp = solve_lp
        self.offset = offset

    @cached_property
    def _credal_side(self) -> StandardFormLP:
        gt = self.family._gt
        n_out = self.family._n_out
        return to_standard_form(LpProblem(
            objective=self.gamble.payoffs, maximize=self.sense is Sense.UPPER,
            a_ge=gt, b_ge=np.zeros(gt.shape[0]),
            a_eq=np.ones((1, n_out)), b_eq=np.ones(1)),
            name="P1" if self.sense is Sense.LOWER else "D2")

    @cached_property
    def _multiplier_side(self) -> StandardFormLP:
        gt = self.family._gt
        m_dom, n_out = gt.shape
        objective = np.zeros(m_dom + 1)
        objective[m_dom] = 1.0
        free = np.zeros(m_dom + 1, dtype=bool)
        free[m_dom] = True
        if self.sense is Sense.LOWER:
            return to_standard_form(LpProblem(
                objective=objective, maximize=True, free=free,
                a_le=np.hstack([gt.T, np.ones((n_out, 1))]),
                b_le=self.gamble.payoffs), name="D1")
        return to_standard_form(LpProblem(
            objective=objective, maximize=False, free=free,
            a_ge=np.hstack([-gt.T, np.ones((n_out, 1))]),
            b_ge=self.gamble.payoffs), name="P2")

    @property
    def primal_lp(self) -> StandardFormLP:
        """The minimizing side: P1 (over the credal set) or P2 (beta/lambda)."""
        return self._credal_side if self.sense is Sense.LOWER else self._multiplier_side

    @property
    def dual_lp(self) -> StandardFormLP:
        """The maximizing side: D1 (alpha/lambda) or D2 (over the credal set)."""
        return self._multiplier_side if self.sense is Sense.LOWER else self._credal_side

    def warm_assignment(self, delta_w: float = DELTA_W) -> np.ndarray:
        """Direct start mapped to the anchored variables (lambda..., u or v)."""
        if not 0.0 <= delta_w <= DELTA_W:
            raise ContractViolation(
                f"delta_w must lie in [0, {DELTA_W}] for the anchored encoding")
        out = direct_dual_start(self.prevision, self.gamble, self.sense, delta_w)
        out[-1] -= self.offset
        return out

    def credal_dual_warm(self, credal: CredalStart) -> np.ndarray:
        """Map the shared credal point onto the solver LP's dual variables.

        Scaled off the normalization face so every dual slack is strictly
        positive while remaining exactly feasible.
        """
        mass = credal.point.mass
        if self.sense is Sense.LOWER:
            return -(1.0 + CREDAL_THETA) * mass
        return (1.0 - CREDAL_THETA) * mass

    def value_bounds(self, state: IterateState) -> tuple[float, float]:
        """(lo, hi) bracket of the natural-extension value at an iterate."""
        if self.sense is Sense.LOWER:
            return (-state.primal_value + self.offset,
                    -state.dual_value + self.offset)
        return (state.dual_value + self.offset,
                state.primal_value + self.offset)


def build_lower(prevision: LowerPrevision, gamble: Gamble) -> NatexProblem:
    """The P1/D1 pair whose common optimum is the lower natural extension."""
    return NatexFamily(prevision).problem(gamble, Sense.LOWER)


def build_upper(prevision: LowerPrevision, gamble: Gamble) -> NatexProblem:
    """The P2/D2 pair whose common optimum is the upper natural extension."""
    return NatexFamily(prevision).problem(gamble, Sense.UPPER)


def direct_dual_start(prevision: LowerPrevision, gamble: Gamble, sense: Sense,
                      delta_w: float = DELTA_W) -> np.ndarray:
    """Closed-form feasible start for D1 (LOWER) or P2 (UPPER).

    All multipliers are set to ``delta_w``; the free variable is pushed one
    unit past the binding constraint, leaving slack >= 1 on every row.
    """
    f = gamble.payoffs
    h = delta_w * prevision.shifted_domain.sum(axis=0)
    out = np.full(prevision.dom_size + 1, delta_w)
    if sense is Sense.LOWER:
        out[-1] = float((f - h).min()) - 1.0
    else:
        out[-1] = float((f + h).max()) + 1.0
    return out


def phase_one_lp(prevision: LowerPrevision) -> tuple[StandardFormLP, float]:
    """The credal-side phase-one LP: maximize the uniform slack delta over
    (p, delta) with E_p(g_i) - P(g_i) >= delta and p(w) >= delta/|Omega|.

    Encoded with the anchored variable u = delta - anchor >= 0; the uniform
    pmf shows the optimum satisfies delta* >= min(0, min gtilde), so the
    anchor leaves the bound slack by at least ANCHOR_PAD. Returns (lp,
    anchor); the source objective value plus the anchor is delta*.
    """
    gt = prevision.shifted_domain
    m_dom, n_out = gt.shape
    anchor = float(min(0.0, gt.min())) - ANCHOR_PAD
    objective = np.zeros(n_out + 1)
    objective[n_out] = 1.0
    a_ge = np.zeros((m_dom + n_out, n_out + 1))
    a_ge[:m_dom, :n_out] = gt
    a_ge[:m_dom, n_out] = -1.0
    a_ge[m_dom:, :n_out] = np.eye(n_out)
    a_ge[m_dom:, n_out] = -1.0 / n_out
    b_ge = np.concatenate([np.full(m_dom, anchor), np.full(n_out, anchor / n_out)])
    a_eq = np.zeros((1, n_out + 1))
    a_eq[0, :n_out] = 1.0
    lp = to_standard_form(LpProblem(
        objective=objective, maximize=True,
        a_ge=a_ge, b_ge=b_ge, a_eq=a_eq, b_eq=np.ones(1)),
        name="phase-one")
    return lp, anchor


def interior_credal_point(prevision: LowerPrevision,
                          eps: float = PHASE1_EPS) -> CredalStart:
    """Solve the phase-one LP once; the result is reused by every gamble.

    Raises SureLossError when the optimum is below -TOL_ASL (empty credal
    set) and DegenerateCredalError when it sits within TOL_ASL of zero (no
    strict interior, so no warm start exists).
    """
    lp, anchor = phase_one_lp(prevision)
    res = solve_to_tolerance(lp, eps)
    if res.status is not SolveStatus.CONVERGED:
        raise SolverFailure(f"phase-one solve ended with {res.status.value}",
                            state=res.state)
    delta = lp.source_objective(res.value) + anchor
    if delta <= -TOL_ASL:
        raise SureLossError(
            f"prevision incurs sure loss (phase-one optimum {delta:.3e})")
    if delta <= TOL_ASL:
        raise DegenerateCredalError(
            f"credal set has empty interior (phase-one optimum {delta:.3e})")
    raw = lp.source_values(res.state.x)[:-1]
    mass = raw / raw.sum()
    margin = float(min((prevision.shifted_domain @ mass).min(),
                       mass.size * mass.min()))
    if margin <= 0.0:
        raise DegenerateCredalError(
            f"recovered credal point has nonpositive margin {margin:.3e}")
    return CredalStart(point=Pmf(prevision.space, mass), margin=margin)


class NatexSession:
    """Stepwise solve of one natural-extension value with live bounds.

    ``lo``/``hi`` bracket the value in its own frame (not the standard-form
    one); they are meaningful only while ``certified`` holds. With both warm
    starts installed the session is certified from iteration 0.
    """

    def __init__(self, problem: NatexProblem, credal: Optional[CredalStart] = None,
                 warm: bool = True, delta_w: float = DELTA_W,
                 eps_feas: float = EPS_FEAS, max_iter: int = MAX_ITER):
        self.problem = problem
        self.lp = problem.solve_lp
        self.eps_feas = eps_feas
        self.max_iter = max_iter
        if warm:
            dual_warm = problem.credal_dual_warm(credal) if credal is not None else None
            self.state = pd_init(self.lp, warm=problem.warm_assignment(delta_w),
                                 dual_warm=dual_warm)
        else:
            self.state = pd_init(self.lp)

    def step(self) -> None:
        if self.state.iteration >= self.max_iter:
            raise SolverFailure(
                f"iteration cap {self.max_iter} reached on {self.lp.name}",
                state=self.state)
        self.state = pd_step(self.lp, self.state)

    @property
    def iterations(self) -> int:
        return self.state.iteration

    @property
    def certified(self) -> bool:
        return self.state.r_p < self.eps_feas and self.state.r_d < self.eps_feas

    @property
    def lo(self) -> float:
        return self.problem.value_bounds(self.state)[0]

    @property
    def hi(self) -> float:
        return self.problem.value_bounds(self.state)[1]

    @property
    def gap(self) -> float:
        lo, hi = self.problem.value_bounds(self.state)
        return hi - lo

    def converged(self, eps: float) -> bool:
        return max(self.gap, self.state.r_p, self.state.r_d) < eps

    @property
    def value(self) -> float:
        lo, hi = self.problem.value_bounds(self.state)
        return 0.5 * (lo + hi)

    def solve(self, eps: float) -> float:
        while not self.converged(eps):
            self.step()
        return self.value


def _natex(prevision, gamble, sense, eps, credal):
    if credal is None:
        credal = interior_credal_point(prevision)  # rejects sure-loss previsions
    prob = NatexFamily(prevision).problem(gamble, sense)
    res = solve_to_tolerance(prob.solve_lp, eps,
                             warm=prob.warm_assignment(),
                             dual_warm=prob.credal_dual_warm(credal))
    if res.status is not SolveStatus.CONVERGED:
        raise SolverFailure(f"natural-extension solve ended with {res.status.value}",
                            state=res.state)
    return prob.solve_lp.source_objective(res.value) + prob.offset


def lower_natex(prevision: LowerPrevision, gamble: Gamble,
                eps: float = DEFAULT_EPS, credal: Optional[CredalStart] = None) -> float:
    """Certified lower natural extension (within eps)."""
    return _natex(prevision, gamble, Sense.LOWER, eps, credal)


def upper_natex(prevision: LowerPrevision, gamble: Gamble,
                eps: float = DEFAULT_EPS, credal: Optional[CredalStart] = None) -> float:
    """Certified upper natural extension (within eps)."""
    return _natex(prevision, gamble, Sense.UPPER, eps, credal)
