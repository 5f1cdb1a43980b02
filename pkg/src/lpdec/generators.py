"""Seeded random instances: envelope lower previsions that avoid sure loss,
uniform gamble sets, and gamble sets with exact counts of maximin and
interval-dominant members.

Randomness comes from Philox (counter-based) generators keyed by
SeedSequence(seed, branch...), so every product is reproducible and
independent instances can be generated concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Gamble, GambleSet, LowerPrevision, Pmf, PossibilitySpace
from .errors import ContractViolation, GenerationError
from .natex import Sense
from .oracle import oracle_natex, oracle_opt_sets

#: Target value the controlled maximin gambles tie at.
TARGET_VALUE = 0.5
#: Verification tolerance for the controlled generator's self-check.
VERIFY_TOL = 1e-6

_MAX_ATTEMPTS = 20

# role branches for the per-instance substreams
_BRANCH_PREVISION = 0
_BRANCH_GAMBLES = 1
_BRANCH_CONTROLLED = 2


@dataclass(frozen=True)
class GenConfig:
    """Sizes, seed and options for one generated instance."""

    seed: int
    n_omega: int
    dom_size: int
    k: int
    s_coherent: int = 16
    option: Optional[str] = None
    margin: float = 1e-3

    def __post_init__(self):
        for name in ("n_omega", "dom_size", "k", "s_coherent"):
            if getattr(self, name) < 1:
                raise ContractViolation(f"{name} must be >= 1")
        if self.margin <= 0:
            raise ContractViolation("margin must be positive")


def substream(seed: int, *branch) -> np.random.Generator:
    """Deterministic child generator for (seed, branch...)."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=tuple(branch))))


def _simplex_uniform(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Rows uniform on the probability simplex (normalized exponentials)."""
    raw = rng.standard_exponential(size=(count, dim))
    return raw / raw.sum(axis=1, keepdims=True)


def gen_envelope(cfg: GenConfig) -> tuple[LowerPrevision, list[Pmf]]:
    """Lower envelope of s_coherent expectations over random domain gambles.

    Each envelope pmf lies in the induced credal set, so the prevision
    avoids sure loss by construction.
    """
    rng = substream(cfg.seed, _BRANCH_PREVISION)
    space = PossibilitySpace(cfg.n_omega)
    pmfs = _simplex_uniform(rng, cfg.s_coherent, cfg.n_omega)
    payoffs = rng.uniform(0.0, 1.0, size=(cfg.dom_size, cfg.n_omega))
    prices = (payoffs @ pmfs.T).min(axis=1)
    prevision = LowerPrevision(
        space, tuple((Gamble(space, payoffs[j]), float(prices[j]))
                     for j in range(cfg.dom_size)))
    return prevision, [Pmf(space, row) for row in pmfs]


def gen_lower_prevision(cfg: GenConfig) -> LowerPrevision:
    """A lower prevision avoiding sure loss (envelope construction)."""
    return gen_envelope(cfg)[0]


def gen_gamble_set(cfg: GenConfig) -> GambleSet:
    """k gambles with payoffs i.i.d. uniform on [0, 1]."""
    rng = substream(cfg.seed, _BRANCH_GAMBLES)
    space = PossibilitySpace(cfg.n_omega)
    payoffs = rng.uniform(0.0, 1.0, size=(cfg.k, cfg.n_omega))
    return GambleSet(space, tuple(Gamble(space, row) for row in payoffs))


_PAPER_GRID = {
    16: (1, 5, 11),
    64: (1, 21, 42),
    256: (1, 85, 170),
}

_OPTION_LABELS = "abcdefghij"


def option_grid(k: int) -> dict[str, tuple[int, int]]:
    """The ten (maximin count, interval-dominant count) options a-j.

    Exact published anchors for k in {16, 64, 256}; other k use the same
    ~1/3 and ~2/3 fractions.
    """
    if k < 2:
        raise ContractViolation("option grid needs k >= 2")
    if k in _PAPER_GRID:
        _, r1, r2 = _PAPER_GRID[k]
    else:
        r1 = max(1, round(k / 3))
        r2 = max(r1, round(2 * k / 3))
    pairs = [(1, 1), (1, r1), (1, r2), (1, k), (r1, r1), (r1, r2), (r1, k),
             (r2, r2), (r2, k), (k, k)]
    return dict(zip(_OPTION_LABELS, pairs))


def gen_controlled_set(cfg: GenConfig, prevision: LowerPrevision) -> GambleSet:
    """A gamble set with exactly (l, n) maximin / interval-dominant members.

    Uses translation and positive scaling covariance of the natural
    extensions: l gambles are shifted so E lands exactly on the target t,
    n - l more get E = t - margin with Ebar >= t + margin (widened first if
    their imprecision is too narrow), and the rest get Ebar = t - margin.
    Which positions play which role is shuffled. The result is oracle
    verified before being returned.
    """
    if cfg.option is None:
        raise ContractViolation("gen_controlled_set needs cfg.option")
    grid = option_grid(cfg.k)
    if cfg.option not in grid:
        raise ContractViolation(
            f"unknown option {cfg.option!r}; valid: {','.join(grid)}")
    n_maximin, n_dominant = grid[cfg.option]
    if prevision.space.size != cfg.n_omega:
        raise ContractViolation("prevision space does not match cfg.n_omega")

    rng = substream(cfg.seed, _BRANCH_CONTROLLED)
    space = prevision.space
    t = TARGET_VALUE
    margin = cfg.margin
    min_width = 2.0 * margin + 1e-3

    for _ in range(_MAX_ATTEMPTS):
        base = rng.uniform(0.0, 1.0, size=(cfg.k, cfg.n_omega))
        roles = rng.permutation(cfg.k)
        members: list[Optional[Gamble]] = [None] * cfg.k
        for slot, idx in enumerate(roles):
            g = Gamble(space, base[idx])
            e_low = oracle_natex(prevision, g, Sense.LOWER)
            if slot < n_maximin:
                members[idx] = g.shifted(t - e_low)
            elif slot < n_dominant:
                e_high = oracle_natex(prevision, g, Sense.UPPER)
                width = e_high - e_low
                if width < min_width:
                    scale = min_width / max(width, 1e-9)
                    g = g.scaled(scale)
                    e_low *= scale
                members[idx] = g.shifted(t - margin - e_low)
            else:
                e_high = oracle_natex(prevision, g, Sense.UPPER)
                members[idx] = g.shifted(t - margin - e_high)
        gambles = GambleSet(space, tuple(members))
        sets = oracle_opt_sets(prevision, gambles, tol=VERIFY_TOL)
        if (len(sets.maximin) == n_maximin
                and len(sets.interval_dominant) == n_dominant):
            return gambles
    raise GenerationError(
        f"could not realize option {cfg.option!r} (l={n_maximin}, n={n_dominant}) "
        f"after {_MAX_ATTEMPTS} attempts")
