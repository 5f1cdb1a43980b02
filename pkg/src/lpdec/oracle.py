"""Independent ground truth: a dense two-phase Bland simplex and
definition-level computation of the three optimal sets.

Nothing here shares code with the interior-point path: the credal LPs are
assembled from scratch and solved by tableau pivoting, so agreement between
the two is a meaningful check rather than a tautology.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import LP_INFEASIBLE, LP_OPTIMAL, LP_UNBOUNDED, simplex_kernel
from .core import Gamble, GambleSet, LowerPrevision
from .errors import SolverFailure, SureLossError
from .natex import Sense

#: Default decision tolerance, deliberately decoupled from the solver's eps.
ORACLE_TOL = 1e-6

_PIVOT_TOL = 1e-9
_MAX_PIVOTS = 200000


def solve_standard_form(A, b, c) -> tuple[float, np.ndarray]:
    """Simplex solve of min c'x s.t. Ax=b, x>=0; returns (value, x).

    Raises SureLossError on infeasibility (the one way our LPs can be
    infeasible) and SolverFailure on unbounded/pivot-limit outcomes.
    """
    status, x, value, pivots = simplex_kernel(
        np.asarray(A, dtype=float), np.asarray(b, dtype=float),
        np.asarray(c, dtype=float), _PIVOT_TOL, _MAX_PIVOTS)
    if status == LP_OPTIMAL:
        return value, x
    if status == LP_INFEASIBLE:
        raise SureLossError("oracle: LP infeasible")
    if status == LP_UNBOUNDED:
        raise SolverFailure("oracle: LP unbounded")
    raise SolverFailure(f"oracle: pivot limit hit after {pivots} pivots")


def _credal_lp(prevision: LowerPrevision, payoffs: np.ndarray):
    """Equality form of the credal polytope: variables (p, surplus)."""
    gt = prevision.shifted_domain
    m_dom, n_out = gt.shape
    A = np.zeros((m_dom + 1, n_out + m_dom))
    A[:m_dom, :n_out] = gt
    A[:m_dom, n_out:] = -np.eye(m_dom)
    A[m_dom, :n_out] = 1.0
    b = np.zeros(m_dom + 1)
    b[m_dom] = 1.0
    c = np.zeros(n_out + m_dom)
    c[:n_out] = payoffs
    return A, b, c


def oracle_natex(prevision: LowerPrevision, gamble: Gamble, sense: Sense) -> float:
    """Natural extension by simplex over the credal polytope.

    LOWER minimizes E_p(f); UPPER maximizes it (as min of -f).
    """
    if sense is Sense.LOWER:
        A, b, c = _credal_lp(prevision, gamble.payoffs)
        value, _ = solve_standard_form(A, b, c)
        return value
    A, b, c = _credal_lp(prevision, -gamble.payoffs)
    value, _ = solve_standard_form(A, b, c)
    return -value


@dataclass(frozen=True)
class OracleSets:
    """Definition-level optimal sets with their separation margins."""

    maximin: tuple[int, ...]
    maximax: tuple[int, ...]
    interval_dominant: tuple[int, ...]
    e_values: np.ndarray
    ebar_values: np.ndarray
    margins: dict[str, float]


def oracle_opt_sets(prevision: LowerPrevision, gambles: GambleSet,
                    tol: float = ORACLE_TOL) -> OracleSets:
    """All three optimal sets straight from the definitions.

    maximin/maximax are the argmax of E / Ebar within tol; the interval
    dominant set keeps every gamble whose Ebar reaches max E - tol. The
    margins report how far each in/out decision is from flipping:
    ``id`` is min over gambles of |Ebar_i - max E|, ``maximin``/``maximax``
    the gap between the best and best excluded value (inf when all tie).
    """
    k = gambles.k
    e_values = np.array([oracle_natex(prevision, f, Sense.LOWER)
                         for f in gambles.members])
    ebar_values = np.array([oracle_natex(prevision, f, Sense.UPPER)
                            for f in gambles.members])
    e_max = e_values.max()
    ebar_max = ebar_values.max()
    maximin = tuple(np.nonzero(e_values >= e_max - tol)[0].tolist())
    maximax = tuple(np.nonzero(ebar_values >= ebar_max - tol)[0].tolist())
    dominant = tuple(np.nonzero(ebar_values >= e_max - tol)[0].tolist())

    def argmax_margin(values, members):
        rest = np.delete(values, list(members))
        return float(values.max() - rest.max()) if rest.size else np.inf

    margins = {
        "maximin": argmax_margin(e_values, maximin),
        "maximax": argmax_margin(ebar_values, maximax),
        "id": float(np.abs(ebar_values - e_max).min()),
    }
    return OracleSets(maximin=maximin, maximax=maximax, interval_dominant=dominant,
                      e_values=e_values, ebar_values=ebar_values, margins=margins)
