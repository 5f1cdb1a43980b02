"""The ten decision algorithms over a set of gambles.

Three families, each in an original (cold-start, solve-to-optimality)
variant and improved variants that exploit shared feasible warm starts,
expectation-based sorting, bound-based early stopping, and candidate
elimination:

====================  ==========================  =========================
criterion             variants                    CLI labels
====================  ==========================  =========================
Gamma-maximin         original / sorted / elim    maximin1 maximin2 maximin3
Gamma-maximax         original / sorted / elim    maximax1 maximax2 maximax3
interval dominance    original / staged /
                      interleaved / hybrid        id1 id2 id3 id4
====================  ==========================  =========================

All variants certify their answers to the tolerance ``eps``: a maximin (or
maximax) result attains the criterion's optimum within eps, and all four
interval-dominance variants agree whenever values are separated by more than
the tolerance.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .core import GambleSet, LowerPrevision, sort_by_expectation
from .errors import SolverFailure
from .linprog import DEFAULT_EPS
from .natex import CredalStart, NatexFamily, NatexSession, Sense, interior_credal_point


class Kind(Enum):
    MAXIMIN = "maximin"
    MAXIMAX = "maximax"
    INTERVAL_DOMINANCE = "interval_dominance"


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one decision algorithm.

    ``chosen`` is the returned index set (singleton for the sequential
    maximin/maximax variants, all ties for the elimination ones, the
    interval-dominant set for ID). ``maximin_set`` carries the stage-I
    answer of the ID variants that produce one. ``values`` holds certified
    criterion values for every index whose LP was solved to full tolerance;
    ``final_bounds`` the last (lo, hi) bracket per touched index.
    """

    kind: Kind
    chosen: tuple[int, ...]
    per_gamble_iterations: tuple[int, ...]
    lp_solves: int
    maximin_set: Optional[tuple[int, ...]] = None
    maximin_bounds: Optional[tuple[float, float]] = None
    values: dict[int, float] = field(default_factory=dict)
    final_bounds: dict[int, tuple[float, float]] = field(default_factory=dict)
    setup_ns: int = 0

    @property
    def iterations(self) -> int:
        return int(sum(self.per_gamble_iterations))


def _fail(exc: SolverFailure, index: int) -> SolverFailure:
    exc.index = index
    return exc


class _Run:
    """Session bookkeeping shared by all algorithms of one invocation."""

    def __init__(self, prevision: LowerPrevision, gambles: GambleSet):
        self.family = NatexFamily(prevision)
        self.gambles = gambles
        self.k = gambles.k
        self.lower: list[Optional[NatexSession]] = [None] * self.k
        self.upper: list[Optional[NatexSession]] = [None] * self.k

    def make(self, sense: Sense, credal: Optional[CredalStart], warm: bool) -> None:
        slot = self.lower if sense is Sense.LOWER else self.upper
        for i, f in enumerate(self.gambles.members):
            slot[i] = NatexSession(self.family.problem(f, sense),
                                   credal=credal, warm=warm)

    def iterations(self) -> tuple[int, ...]:
        return tuple(
            (self.lower[i].iterations if self.lower[i] else 0)
            + (self.upper[i].iterations if self.upper[i] else 0)
            for i in range(self.k))

    def lp_solves(self) -> int:
        return sum(1 for s in self.lower + self.upper
                   if s is not None and s.iterations > 0)

    def bounds_of(self, sessions) -> dict[int, tuple[float, float]]:
        return {i: (s.lo, s.hi) for i, s in enumerate(sessions)
                if s is not None and s.iterations > 0}

    def values_of(self, sessions, eps) -> dict[int, float]:
        return {i: s.value for i, s in enumerate(sessions)
                if s is not None and s.iterations > 0 and s.gap < eps}


def _scan(sessions, order, eps, sense: Sense, early_stop: bool):
    """Sequential pass: solve each gamble, keep the strict-''>'' incumbent.

    With ``early_stop`` a gamble's solve halts as soon as its certified
    upper bound falls below the incumbent (it cannot win); otherwise each
    solve runs to max(gap, r_P, r_D) < eps.
    """
    best = -np.inf
    best_i = None
    for i in order:
        sess = sessions[i]
        try:
            while True:
                sess.step()
                if early_stop:
                    if sess.certified and (sess.hi < best or sess.gap < eps):
                        break
                elif sess.converged(eps):
                    break
        except SolverFailure as exc:
            raise _fail(exc, i)
        cand = sess.lo if sense is Sense.LOWER else sess.hi
        if cand > best:
            best = cand
            best_i = int(i)
    return best_i, best


def _eliminate(sessions, eps, indices):
    """Bulk-synchronous elimination rounds; returns (R, M_lo, M_hi).

    Uncertified candidates contribute (-inf, +inf) to the round bounds and
    are never eliminated on them.
    """
    remaining = list(indices)
    while True:
        for i in remaining:
            try:
                sessions[i].step()
            except SolverFailure as exc:
                raise _fail(exc, i)
        m_lo = max((sessions[i].lo if sessions[i].certified else -np.inf)
                   for i in remaining)
        m_hi = max((sessions[i].hi if sessions[i].certified else np.inf)
                   for i in remaining)
        remaining = [i for i in remaining
                     if not sessions[i].certified or sessions[i].hi >= m_lo]
        if len(remaining) == 1 or m_hi - m_lo < eps:
            return remaining, m_lo, m_hi


def _setup(prevision, gambles, credal, senses, sort=False):
    """Improved-variant setup: phase-one point, optional sort, warm installs."""
    t0 = time.perf_counter_ns()
    if credal is None:
        credal = interior_credal_point(prevision)
    run = _Run(prevision, gambles)
    order = (sort_by_expectation(gambles, credal.point) if sort
             else np.arange(gambles.k))
    for sense in senses:
        run.make(sense, credal, warm=True)
    return run, credal, order, time.perf_counter_ns() - t0


# ---------------------------------------------------------------------------
# Gamma-maximin / Gamma-maximax

def maximin_original(prevision: LowerPrevision, gambles: GambleSet,
                     eps: float = DEFAULT_EPS,
                     credal: Optional[CredalStart] = None) -> CriterionResult:
    """Solve every E(f_i) to tolerance from cold starts; first strict winner.

    ``credal`` is accepted for interface uniformity and ignored (the
    original variant has no setup stage).
    """
    run = _Run(prevision, gambles)
    run.make(Sense.LOWER, None, warm=False)
    i_star, best = _scan(run.lower, range(run.k), eps, Sense.LOWER, early_stop=False)
    return CriterionResult(
        Kind.MAXIMIN, chosen=(i_star,), per_gamble_iterations=run.iterations(),
        lp_solves=run.lp_solves(), values=run.values_of(run.lower, eps),
        final_bounds=run.bounds_of(run.lower))


def maximax_original(prevision: LowerPrevision, gambles: GambleSet,
                     eps: float = DEFAULT_EPS,
                     credal: Optional[CredalStart] = None) -> CriterionResult:
    """Mirror of maximin_original over the upper natural extension."""
    run = _Run(prevision, gambles)
    run.make(Sense.UPPER, None, warm=False)
    i_star, best = _scan(run.upper, range(run.k), eps, Sense.UPPER, early_stop=False)
    return CriterionResult(
        Kind.MAXIMAX, chosen=(i_star,), per_gamble_iterations=run.iterations(),
        lp_solves=run.lp_solves(), values=run.values_of(run.upper, eps),
        final_bounds=run.bounds_of(run.upper))


def maximin_sorted(prevision: LowerPrevision, gambles: GambleSet,
                   eps: float = DEFAULT_EPS,
                   credal: Optional[CredalStart] = None) -> CriterionResult:
    """Warm starts, expectation-sorted order, early stop on hopeless gambles."""
    run, credal, order, setup_ns = _setup(prevision, gambles, credal,
                                          (Sense.LOWER,), sort=True)
    i_star, best = _scan(run.lower, order, eps, Sense.LOWER, early_stop=True)
    return CriterionResult(
        Kind.MAXIMIN, chosen=(i_star,), per_gamble_iterations=run.iterations(),
        lp_solves=run.lp_solves(), values=run.values_of(run.lower, eps),
        final_bounds=run.bounds_of(run.lower), setup_ns=setup_ns)


def maximax_sorted(prevision: LowerPrevision, gambles: GambleSet,
                   eps: float = DEFAULT_EPS,
                   credal: Optional[CredalStart] = None) -> CriterionResult:
    """Mirror of maximin_sorted over the upper natural extension."""
    run, credal, order, setup_ns = _setup(prevision, gambles, credal,
                                          (Sense.UPPER,), sort=True)
    i_star, best = _scan(run.upper, order, eps, Sense.UPPER, early_stop=True)
    return CriterionResult(
        Kind.MAXIMAX, chosen=(i_star,), per_gamble_iterations=run.iterations(),
        lp_solves=run.lp_solves(), values=run.values_of(run.upper, eps),
        final_bounds=run.bounds_of(run.upper), setup_ns=setup_ns)


def maximin_elimination(prevision: LowerPrevision, gambles: GambleSet,
                        eps: float = DEFAULT_EPS,
                        credal: Optional[CredalStart] = None) -> CriterionResult:
    """Advance all candidates in lockstep, pruning dominated ones each round.

    The only maximin variant that returns every tie: R keeps each index
    whose value reaches the maximum within eps.
    """
    run, credal, _, setup_ns = _setup(prevision, gambles, credal, (Sense.LOWER,))
    remaining, m_lo, m_hi = _eliminate(run.lower, eps, range(run.k))
    return CriterionResult(
        Kind.MAXIMIN, chosen=tuple(remaining), per_gamble_iterations=run.iterations(),
        lp_solves=run.lp_solves(), maximin_bounds=(m_lo, m_hi),
        values=run.values_of(run.lower, eps), final_bounds=run.bounds_of(run.lower),
        setup_ns=setup_ns)


def maximax_elimination(prevision: LowerPrevision, gambles: GambleSet,
                        eps: float = DEFAULT_EPS,
                        credal: Optional[CredalStart] = None) -> CriterionResult:
    """Mirror of maximin_elimination over the upper natural extension."""
    run, credal, _, setup_ns = _setup(prevision, gambles, credal, (Sense.UPPER,))
    remaining, m_lo, m_hi = _eliminate(run.upper, eps, range(run.k))
    return CriterionResult(
        Kind.MAXIMAX, chosen=tuple(remaining), per_gamble_iterations=run.iterations(),
        lp_solves=run.lp_solves(), maximin_bounds=(m_lo, m_hi),
        values=run.values_of(run.upper, eps), final_bounds=run.bounds_of(run.upper),
        setup_ns=setup_ns)


# ---------------------------------------------------------------------------
# Interval dominance

def id_original(prevision: LowerPrevision, gambles: GambleSet,
                eps: float = DEFAULT_EPS,
                credal: Optional[CredalStart] = None) -> CriterionResult:
    """Stage I: cold maximin scan. Stage II: full upper solve per other
    gamble, kept iff its value reaches the maximin value. 2k-1 LP solves."""
    run = _Run(prevision, gambles)
    run.make(Sense.LOWER, None, warm=False)
    i_star, e_low = _scan(run.lower, range(run.k), eps, Sense.LOWER, early_stop=False)

    run.make(Sense.UPPER, None, warm=False)
    kept = {i_star}
    for i in range(run.k):
        if i == i_star:
            continue
        sess = run.upper[i]
        try:
            while not sess.converged(eps):
                sess.step()
        except SolverFailure as exc:
            raise _fail(exc, i)
        if sess.hi >= e_low:
            kept.add(i)
    run.upper[i_star] = None  # never touched; 2k-1 sessions total
    return CriterionResult(
        Kind.INTERVAL_DOMINANCE, chosen=tuple(sorted(kept)),
        per_gamble_iterations=run.iterations(), lp_solves=run.lp_solves(),
        maximin_set=(i_star,), values=run.values_of(run.upper, eps),
        final_bounds=run.bounds_of(run.upper))


def id_staged(prevision: LowerPrevision, gambles: GambleSet,
              eps: float = DEFAULT_EPS,
              credal: Optional[CredalStart] = None) -> CriterionResult:
    """Stage I: sorted maximin with early stopping. Stage II: two-sided
    stop per gamble (out as soon as its upper bound drops below the maximin
    value, in as soon as its lower bound reaches it)."""
    run, credal, order, setup_ns = _setup(prevision, gambles, credal,
                                          (Sense.LOWER, Sense.UPPER), sort=True)
    i_star, e_low = _scan(run.lower, order, eps, Sense.LOWER, early_stop=True)

    kept = {i_star}
    for i in order:
        if i == i_star:
            continue
        sess = run.upper[i]
        try:
            while True:
                sess.step()
                if not sess.certified:
                    continue
                if sess.hi < e_low:
                    break
                if sess.lo >= e_low or sess.gap < eps:
                    kept.add(int(i))
                    break
        except SolverFailure as exc:
            raise _fail(exc, i)
    return CriterionResult(
        Kind.INTERVAL_DOMINANCE, chosen=tuple(sorted(kept)),
        per_gamble_iterations=run.iterations(), lp_solves=run.lp_solves(),
        maximin_set=(i_star,), values=run.values_of(run.upper, eps),
        final_bounds=run.bounds_of(run.upper), setup_ns=setup_ns)


def id_interleaved(prevision: LowerPrevision, gambles: GambleSet,
                   eps: float = DEFAULT_EPS,
                   credal: Optional[CredalStart] = None) -> CriterionResult:
    """Advance the maximin bound and all upper solves together, classifying
    gambles against the running (M_lo, M_hi) bracket each round."""
    run, credal, _, setup_ns = _setup(prevision, gambles, credal,
                                      (Sense.LOWER, Sense.UPPER))
    k = run.k
    candidates = list(range(k))
    undetermined = set(range(k))
    kept: set[int] = set()
    out: set[int] = set()
    m_lo, m_hi = -np.inf, np.inf
    while True:
        if m_hi - m_lo >= eps:
            for i in candidates:
                try:
                    run.lower[i].step()
                except SolverFailure as exc:
                    raise _fail(exc, i)
            m_lo = max((run.lower[i].lo if run.lower[i].certified else -np.inf)
                       for i in candidates)
            m_hi = max((run.lower[i].hi if run.lower[i].certified else np.inf)
                       for i in candidates)
            candidates = [i for i in candidates
                          if not run.lower[i].certified or run.lower[i].hi >= m_lo]
        for j in sorted(undetermined):
            try:
                run.upper[j].step()
            except SolverFailure as exc:
                raise _fail(exc, j)
        kept |= {j for j in undetermined
                 if run.upper[j].certified and run.upper[j].lo >= m_hi}
        out |= {j for j in undetermined
                if run.upper[j].certified and run.upper[j].hi < m_lo}
        undetermined -= kept | out
        if not undetermined:
            break
        if (m_hi - m_lo < eps
                and all(run.upper[j].converged(eps) for j in undetermined)):
            break
    kept |= undetermined
    return CriterionResult(
        Kind.INTERVAL_DOMINANCE, chosen=tuple(sorted(kept)),
        per_gamble_iterations=run.iterations(), lp_solves=run.lp_solves(),
        maximin_bounds=(m_lo, m_hi), values=run.values_of(run.upper, eps),
        final_bounds=run.bounds_of(run.upper), setup_ns=setup_ns)


def id_hybrid(prevision: LowerPrevision, gambles: GambleSet,
              eps: float = DEFAULT_EPS,
              credal: Optional[CredalStart] = None) -> CriterionResult:
    """Stage I: maximin elimination identifies the candidate set R (its
    bound bracket may still be wide). Stage II: classify the rest as in the
    interleaved variant while continuing to refine the bracket on R."""
    run, credal, _, setup_ns = _setup(prevision, gambles, credal,
                                      (Sense.LOWER, Sense.UPPER))
    k = run.k
    remaining, m_lo, m_hi = _eliminate(run.lower, eps, range(k))

    kept = set(remaining)
    out: set[int] = set()
    undetermined = set(range(k)) - kept
    while True:
        for j in sorted(undetermined):
            try:
                run.upper[j].step()
            except SolverFailure as exc:
                raise _fail(exc, j)
        if m_hi - m_lo >= eps:
            for r in remaining:
                try:
                    run.lower[r].step()
                except SolverFailure as exc:
                    raise _fail(exc, r)
            m_lo = max((run.lower[r].lo if run.lower[r].certified else -np.inf)
                       for r in remaining)
            m_hi = max((run.lower[r].hi if run.lower[r].certified else np.inf)
                       for r in remaining)
        kept |= {j for j in undetermined
                 if run.upper[j].certified and run.upper[j].lo >= m_hi}
        out |= {j for j in undetermined
                if run.upper[j].certified and run.upper[j].hi < m_lo}
        undetermined -= kept | out
        if not undetermined:
            break
        if (m_hi - m_lo < eps
                and all(run.upper[j].converged(eps) for j in undetermined)):
            break
    kept |= undetermined
    return CriterionResult(
        Kind.INTERVAL_DOMINANCE, chosen=tuple(sorted(kept)),
        per_gamble_iterations=run.iterations(), lp_solves=run.lp_solves(),
        maximin_set=tuple(remaining), maximin_bounds=(m_lo, m_hi),
        values=run.values_of(run.upper, eps), final_bounds=run.bounds_of(run.upper),
        setup_ns=setup_ns)


#: CLI label -> implementation, in the benchmark's canonical order.
ALGORITHMS = {
    "maximin1": maximin_original,
    "maximin2": maximin_sorted,
    "maximin3": maximin_elimination,
    "maximax1": maximax_original,
    "maximax2": maximax_sorted,
    "maximax3": maximax_elimination,
    "id1": id_original,
    "id2": id_staged,
    "id3": id_interleaved,
    "id4": id_hybrid,
}

def kind_of_label(label: str) -> Kind:
    if label.startswith("maximin"):
        return Kind.MAXIMIN
    if label.startswith("maximax"):
        return Kind.MAXIMAX
    return Kind.INTERVAL_DOMINANCE
