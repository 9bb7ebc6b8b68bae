"""Finitely supported probability measures on [0, 1] and the Markov operator.

Measures are weighted atom lists.  The Markov operator of a system acts by
``P nu = sum_i w_i (g_i)_* nu``; to keep sizes bounded each step is followed
by deterministic mid-quantile pruning, which moves the measure by at most
``1/N`` in Wasserstein-1 distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hypotheses import StochasticSystem
from .pwlin import PwlMap

__all__ = [
    "AtomMeasure",
    "WalkRng",
    "InvariantEstimate",
    "wasserstein1",
    "pushforward",
    "quantile_prune",
    "markov_step",
    "iterate_markov",
    "invariant_estimate",
    "max_window_mass",
]

MASS_TOL = 1e-12


class AtomMeasure:
    """Probability measure ``sum_j w_j delta_{x_j}`` with sorted, distinct positions.

    Coincident positions are merged before the total mass is checked, and the
    merge is independent of the order in which atoms are supplied.
    """

    __slots__ = ("positions", "weights")

    def __init__(self, positions, weights=None, normalize: bool = False):
        x = np.asarray(positions, dtype=float).ravel()
        if weights is None:
            w = np.full(x.size, 1.0 / max(x.size, 1))
        else:
            w = np.asarray(weights, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("a measure needs at least one atom")
        if x.shape != w.shape:
            raise ValueError("positions and weights differ in length")
        if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("atom positions must lie in [0, 1]")
        if np.any(w <= 0.0):
            raise ValueError("atom weights must be positive")
        order = np.lexsort((w, x))
        x, w = x[order], w[order]
        starts = np.flatnonzero(np.r_[True, x[1:] != x[:-1]])
        x = x[starts]
        w = np.add.reduceat(w, starts)
        total = w.sum()
        if normalize:
            w = w / total
        elif abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        x.setflags(write=False)
        w.setflags(write=False)
        self.positions = x
        self.weights = w

    @classmethod
    def dirac(cls, x: float) -> "AtomMeasure":
        return cls([x], [1.0])

    @classmethod
    def uniform_grid(cls, n: int) -> "AtomMeasure":
        """``n`` equal atoms at ``0, 1/(n-1), ..., 1``."""
        return cls(np.linspace(0.0, 1.0, n))

    def __len__(self) -> int:
        return self.positions.size

    def __repr__(self) -> str:
        return f"AtomMeasure({len(self)} atoms, mean={self.mean():.6g})"

    def __eq__(self, other):
        if not isinstance(other, AtomMeasure):
            return NotImplemented
        return np.array_equal(self.positions, other.positions) and np.array_equal(self.weights, other.weights)

    def mean(self) -> float:
        return float(np.dot(self.positions, self.weights))

    def integrate(self, f) -> float:
        return float(np.dot(f(self.positions), self.weights))

    def cdf(self, t) -> np.ndarray:
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(self.positions, t, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def cdf_table(self) -> tuple[np.ndarray, np.ndarray]:
        """``(t, F(t))`` at every atom position."""
        return self.positions, np.minimum(np.cumsum(self.weights), 1.0)

    def support_diameter(self) -> float:
        return float(self.positions[-1] - self.positions[0])


class WalkRng:
    """Seed derivation for independent per-trial random streams.

    The stream of trial ``k`` depends only on ``(seed, k)``, so results do not
    depend on how trials are split among workers.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)

    def trial(self, index: int, purpose: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(int(purpose), int(index)))
        return np.random.Generator(np.random.PCG64(ss))

    def __repr__(self) -> str:
        return f"WalkRng(seed={self.seed})"


def wasserstein1(a: AtomMeasure, b: AtomMeasure) -> float:
    """``int_0^1 |F_a - F_b| dt`` evaluated exactly on the merged atom grid."""
    for m in (a, b):
        if abs(m.weights.sum() - 1.0) > MASS_TOL:
            raise ValueError("wasserstein1 needs normalized measures")
    grid = np.union1d(a.positions, b.positions)
    if grid.size < 2:
        return 0.0
    diff = np.abs(a.cdf(grid[:-1]) - b.cdf(grid[:-1]))
    return float(np.dot(diff, np.diff(grid)))


def _clip_unit(x: np.ndarray) -> np.ndarray:
    return np.clip(x, 0.0, 1.0)


def pushforward(map: PwlMap, m: AtomMeasure) -> AtomMeasure:
    return AtomMeasure(_clip_unit(map.evaluate(m.positions)), m.weights, normalize=True)


def quantile_prune(positions: np.ndarray, weights: np.ndarray, n: int) -> AtomMeasure:
    """``n`` equal atoms at the mid-quantiles ``(j - 1/2)/n`` of the given mixture."""
    if n < 1:
        raise ValueError("prune_to must be at least 1")
    order = np.lexsort((weights, positions))
    x = positions[order]
    cum = np.cumsum(weights[order])
    cum /= cum[-1]
    u = (np.arange(n) + 0.5) / n
    idx = np.minimum(np.searchsorted(cum, u, side="left"), x.size - 1)
    return AtomMeasure(x[idx], np.full(n, 1.0 / n), normalize=True)


def _mixture(sys: StochasticSystem, m: AtomMeasure) -> tuple[np.ndarray, np.ndarray]:
    # fixed map order keeps the concatenation deterministic
    xs = [_clip_unit(g.evaluate(m.positions)) for g in sys.maps]
    ws = [w * m.weights for w in sys.float_weights]
    return np.concatenate(xs), np.concatenate(ws)


def markov_step(sys: StochasticSystem, m: AtomMeasure, prune_to: int) -> AtomMeasure:
    """One application of the Markov operator followed by quantile pruning."""
    x, w = _mixture(sys, m)
    return quantile_prune(x, w, prune_to)


def iterate_markov(sys: StochasticSystem, m0: AtomMeasure, steps: int, prune_to: int) -> list[AtomMeasure]:
    """Trajectory ``[m0, P m0, ..., P^steps m0]``."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    out = [m0]
    for _ in range(steps):
        out.append(markov_step(sys, out[-1], prune_to))
    return out


@dataclass(frozen=True)
class InvariantEstimate:
    measure: AtomMeasure
    residual: float  # d_W(P nu_hat, nu_hat)
    steps: int
    burn_in: int
    prune_to: int


def invariant_estimate(
    sys: StochasticSystem,
    prune_to: int,
    steps: int,
    burn_in: int,
    start: AtomMeasure | None = None,
) -> InvariantEstimate:
    """Cesàro average of ``P^k start`` for ``k = burn_in+1 .. steps``, pruned.

    ``start`` defaults to ``delta_{1/2}``.
    """
    if steps <= burn_in:
        raise ValueError("steps must exceed burn_in")
    m = start if start is not None else AtomMeasure.dirac(0.5)
    kept_x, kept_w = [], []
    count = steps - burn_in
    for k in range(1, steps + 1):
        m = markov_step(sys, m, prune_to)
        if k > burn_in:
            kept_x.append(m.positions)
            kept_w.append(m.weights / count)
    nu = quantile_prune(np.concatenate(kept_x), np.concatenate(kept_w), prune_to)
    residual = wasserstein1(markov_step(sys, nu, prune_to), nu)
    return InvariantEstimate(nu, residual, steps, burn_in, prune_to)


def max_window_mass(m: AtomMeasure, width: float) -> float:
    """Largest mass in a closed window ``[t, t + width]``."""
    if not 0.0 < width <= 1.0:
        raise ValueError("width must lie in (0, 1]")
    x = m.positions
    cum = np.r_[0.0, np.cumsum(m.weights)]
    # windows may start at an atom without loss of generality
    right = np.searchsorted(x, x + width, side="right")
    left = np.arange(x.size)
    return float(np.max(cum[right] - cum[left]))
