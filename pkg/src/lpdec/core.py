"""Finite possibility spaces, gambles, pmfs, lower previsions and expectations.

All types are immutable after construction (arrays are copied and marked
read-only), so they are safe to share across threads; the operations here are
pure functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractViolation

#: Tolerance for probability mass function validation.
PMF_TOL = 1e-10


def _readonly(values, dtype=float) -> np.ndarray:
    a = np.array(values, dtype=dtype)
    a.setflags(write=False)
    return a


def default_labels(size: int) -> tuple[str, ...]:
    return tuple(f"w{i + 1}" for i in range(size))


@dataclass(frozen=True)
class PossibilitySpace:
    """A finite set of outcomes, optionally with names."""

    size: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.size < 1:
            raise ContractViolation(f"possibility space needs size >= 1, got {self.size}")
        labels = self.labels or default_labels(self.size)
        if len(labels) != self.size:
            raise ContractViolation(
                f"{len(labels)} labels for a space of size {self.size}")
        if len(set(labels)) != len(labels):
            raise ContractViolation("outcome labels must be unique")
        object.__setattr__(self, "labels", tuple(labels))


@dataclass(frozen=True, eq=False)
class Gamble:
    """A real payoff vector over a possibility space (utility units)."""

    space: PossibilitySpace
    payoffs: np.ndarray

    def __post_init__(self):
        payoffs = _readonly(self.payoffs)
        if payoffs.ndim != 1 or payoffs.size != self.space.size:
            raise ContractViolation(
                f"gamble has {payoffs.size} payoffs on a space of size {self.space.size}")
        if not np.isfinite(payoffs).all():
            raise ContractViolation("gamble payoffs must be finite")
        object.__setattr__(self, "payoffs", payoffs)

    def __neg__(self) -> "Gamble":
        return Gamble(self.space, -self.payoffs)

    def shifted(self, c: float) -> "Gamble":
        return Gamble(self.space, self.payoffs + c)

    def scaled(self, a: float) -> "Gamble":
        return Gamble(self.space, a * self.payoffs)


def negate(f: Gamble) -> Gamble:
    """Entrywise negation; negate(negate(f)) equals f."""
    return -f


@dataclass(frozen=True, eq=False)
class Pmf:
    """A probability mass function over a possibility space."""

    space: PossibilitySpace
    mass: np.ndarray

    def __post_init__(self):
        mass = _readonly(self.mass)
        if mass.ndim != 1 or mass.size != self.space.size:
            raise ContractViolation(
                f"pmf has {mass.size} entries on a space of size {self.space.size}")
        if not np.isfinite(mass).all():
            raise ContractViolation("pmf entries must be finite")
        if mass.min(initial=0.0) < -PMF_TOL:
            raise ContractViolation(f"pmf entry below -{PMF_TOL}: {mass.min()}")
        if abs(mass.sum() - 1.0) > PMF_TOL:
            raise ContractViolation(f"pmf sums to {mass.sum()!r}, not 1")
        object.__setattr__(self, "mass", mass)


@dataclass(frozen=True, eq=False)
class LowerPrevision:
    """A finite list of (gamble, supremum buying price) assessments."""

    space: PossibilitySpace
    entries: tuple[tuple[Gamble, float], ...]

    def __post_init__(self):
        entries = tuple((g, float(p)) for g, p in self.entries)
        if not entries:
            raise ContractViolation("a lower prevision needs at least one assessment")
        for i, (g, p) in enumerate(entries):
            if g.space != self.space:
                raise ContractViolation(f"domain gamble {i} bound to a different space")
            if not np.isfinite(p):
                raise ContractViolation(f"price {i} is not finite")
        object.__setattr__(self, "entries", entries)

    @property
    def dom_size(self) -> int:
        return len(self.entries)

    @cached_property
    def domain_matrix(self) -> np.ndarray:
        """Domain gamble payoffs, one row per assessment; shape (M, N)."""
        return _readonly([g.payoffs for g, _ in self.entries])

    @cached_property
    def prices(self) -> np.ndarray:
        return _readonly([p for _, p in self.entries])

    @cached_property
    def shifted_domain(self) -> np.ndarray:
        """Rows g_i - P(g_i); the credal set is {p : shifted_domain @ p >= 0}."""
        return _readonly(self.domain_matrix - self.prices[:, None])


@dataclass(frozen=True, eq=False)
class GambleSet:
    """An ordered decision set of gambles over one possibility space."""

    space: PossibilitySpace
    members: tuple[Gamble, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ContractViolation("a gamble set needs at least one member")
        for i, g in enumerate(members):
            if g.space != self.space:
                raise ContractViolation(f"gamble {i} bound to a different space")
        object.__setattr__(self, "members", members)

    @property
    def k(self) -> int:
        return len(self.members)

    @cached_property
    def payoff_matrix(self) -> np.ndarray:
        """One row per member; shape (k, N)."""
        return _readonly([g.payoffs for g in self.members])

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i: int) -> Gamble:
        return self.members[i]


def expectation(p: Pmf, f: Gamble) -> float:
    """Expectation of f under p, sum over omega of p(omega) f(omega)."""
    if p.space != f.space:
        raise ContractViolation("pmf and gamble live on different spaces")
    return float(p.mass @ f.payoffs)


def sort_by_expectation(gambles: GambleSet, p: Pmf) -> np.ndarray:
    """Indices of the members by nonincreasing expectation under p.

    Ties keep the original index order (stable sort), so the result is
    deterministic.
    """
    if p.space != gambles.space:
        raise ContractViolation("pmf and gamble set live on different spaces")
    values = gambles.payoff_matrix @ p.mass
    return np.argsort(-values, kind="stable")
