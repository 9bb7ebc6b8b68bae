"""Central-limit harness for Birkhoff sums along the Markov chain.

``S_n(phi, omega, x) = (phi(X_1) + ... + phi(X_n)) / sqrt(n)`` with
``X_k = g_{omega_k}(X_{k-1})`` and ``X_0 = x``.  Passing ``include_x0=True``
adds the ``phi(X_0)`` term as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from .hypotheses import StochasticSystem
from .measure import AtomMeasure, WalkRng
from .pwlin import ONE, ZERO, PwlError, as_fraction
from .walk import STARTS, advance, run_trials, sample_words

__all__ = [
    "Observable",
    "CltSample",
    "Sigma2Estimate",
    "center_observable",
    "sample_Sn",
    "estimate_sigma2",
    "ks_normality",
    "jackknife_se",
    "prop61_diagnostic",
]

DEFAULT_CHUNK = 2500


@dataclass(frozen=True)
class Observable:
    """Continuous piecewise-linear function on [0, 1] with arbitrary rational values.

    The evaluated function is ``raw(x) - centered_offset``.
    """

    breakpoints: tuple
    values: tuple
    centered_offset: float = 0.0

    def __post_init__(self):
        xs = tuple(as_fraction(x) for x in self.breakpoints)
        ys = tuple(as_fraction(y) for y in self.values)
        if len(xs) != len(ys) or len(xs) < 2:
            raise PwlError("observable needs matching breakpoints and values")
        if xs[0] != ZERO or xs[-1] != ONE or any(not a < b for a, b in zip(xs, xs[1:])):
            raise PwlError("observable breakpoints must increase from 0 to 1")
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", ys)
        object.__setattr__(self, "_fx", np.array([float(x) for x in xs]))
        object.__setattr__(self, "_fy", np.array([float(y) for y in ys]))

    @classmethod
    def identity(cls) -> "Observable":
        return cls((0, 1), (0, 1))

    @classmethod
    def constant(cls, c) -> "Observable":
        return cls((0, 1), (c, c))

    @classmethod
    def from_points(cls, points) -> "Observable":
        pts = list(points)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts))

    @property
    def lipschitz_constant(self) -> Fraction:
        xs, ys = self.breakpoints, self.values
        return max(abs((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])) for i in range(len(xs) - 1))

    def raw(self, x):
        return np.interp(x, self._fx, self._fy)

    def __call__(self, x):
        return self.raw(x) - self.centered_offset

    def scaled(self, c) -> "Observable":
        """``c * phi``, offset included."""
        c = as_fraction(c)
        return Observable(self.breakpoints, tuple(c * y for y in self.values), float(c) * self.centered_offset)


def center_observable(phi: Observable, nu_hat: AtomMeasure) -> Observable:
    """Shift ``phi`` so that its integral against ``nu_hat`` vanishes."""
    return replace(phi, centered_offset=nu_hat.integrate(phi.raw))


@dataclass(frozen=True)
class CltSample:
    n: int
    values: np.ndarray
    sigma2_hat: float  # mean of S_n^2

    @property
    def trials(self) -> int:
        return self.values.size


def _birkhoff_sums(sys, phi, x0: np.ndarray, words: np.ndarray, include_x0: bool) -> np.ndarray:
    x = x0.astype(float, copy=True)
    acc = phi(x) if include_x0 else np.zeros_like(x)
    for k in range(words.shape[1]):
        x = advance(sys, x, words[:, k])
        acc = acc + phi(x)
    return acc


def sample_Sn(
    sys: StochasticSystem,
    phi: Observable,
    x: float,
    n: int,
    trials: int,
    rng: WalkRng,
    include_x0: bool = False,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> CltSample:
    """``trials`` independent realisations of ``S_n`` started at ``x``."""
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be positive")

    def job(idx):
        words = sample_words(rng, sys, n, idx)
        return list(_birkhoff_sums(sys, phi, np.full(len(idx), float(x)), words, include_x0))

    values = np.array(run_trials(job, trials, workers, chunk)) / math.sqrt(n)
    return CltSample(n, values, float(np.mean(values**2)))


def jackknife_se(values: np.ndarray) -> float:
    """Delete-one jackknife standard error of the sample mean."""
    v = np.asarray(values, dtype=float)
    t = v.size
    if t < 2:
        return float("nan")
    loo = (v.sum() - v) / (t - 1)
    return float(math.sqrt((t - 1) / t * np.sum((loo - loo.mean()) ** 2)))


@dataclass(frozen=True)
class Sigma2Estimate:
    n: int
    sigma2: float
    stderr: float
    sigma2_2n: float
    stderr_2n: float
    relative_change: float
    diverging: bool  # n and 2n estimates differ by more than 25%


def _stationary_sums(sys, phi, nu_hat, n, trials, rng, workers, chunk) -> np.ndarray:
    cum = np.cumsum(nu_hat.weights)
    cum[-1] = 1.0

    def job(idx):
        starts = np.array([
            nu_hat.positions[min(np.searchsorted(cum, rng.trial(t, STARTS).random(), side="right"), cum.size - 1)]
            for t in idx
        ])
        words = sample_words(rng, sys, n, idx)
        return list(_birkhoff_sums(sys, phi, starts, words, include_x0=False))

    return np.array(run_trials(job, trials, workers, chunk)) / math.sqrt(n)


def estimate_sigma2(
    sys: StochasticSystem,
    phi: Observable,
    nu_hat: AtomMeasure,
    n: int,
    trials: int,
    rng: WalkRng,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> Sigma2Estimate:
    """Stationary-start estimate of ``E S_n^2`` at ``n`` and ``2n``.

    The 2n run reuses the first ``n`` letters of each trial's word, so the two
    estimates are coupled and their ratio is a low-noise stability check.
    """
    s_n = _stationary_sums(sys, phi, nu_hat, n, trials, rng, workers, chunk) ** 2
    s_2n = _stationary_sums(sys, phi, nu_hat, 2 * n, trials, rng, workers, chunk) ** 2
    a, b = float(s_n.mean()), float(s_2n.mean())
    scale = max(abs(a), abs(b))
    change = 0.0 if scale == 0.0 else abs(b - a) / scale
    return Sigma2Estimate(n, a, jackknife_se(s_n), b, jackknife_se(s_2n), change, change > 0.25)


def ks_normality(sample: CltSample, eps: float = 1e-6, degenerate_below: float = 1e-12) -> float:
    """Kolmogorov-Smirnov distance to ``Normal(0, sigma2_hat)``.

    When ``sigma2_hat`` is (numerically) zero the limit law is ``delta_0`` and
    the fraction of values with ``|S_n| > eps`` is returned instead.
    """
    if sample.sigma2_hat <= degenerate_below:
        return float(np.mean(np.abs(sample.values) > eps))
    return float(stats.kstest(sample.values, "norm", args=(0.0, math.sqrt(sample.sigma2_hat))).statistic)


def prop61_diagnostic(
    sys: StochasticSystem,
    phi: Observable,
    x: float,
    y: float,
    n_max: int,
    trials: int,
    rng: WalkRng,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> list[tuple[int, float]]:
    """Running ``|sum_{i<=n} (U^i phi(x) - U^i phi(y))|`` for ``n = 1 .. n_max``.

    ``U^i phi(z)`` is the Monte-Carlo mean of ``phi(X_i)`` from ``z``.  Both
    start points are driven by the same words (common random numbers).
    """

    def job(idx):
        words = sample_words(rng, sys, n_max, idx)
        xa = np.full(len(idx), float(x))
        xb = np.full(len(idx), float(y))
        sums = np.empty(n_max)
        for k in range(n_max):
            xa = advance(sys, xa, words[:, k])
            xb = advance(sys, xb, words[:, k])
            sums[k] = np.sum(phi(xa) - phi(xb))
        return [sums]

    # chunk partial sums are fixed by ``chunk`` alone, so workers do not change the result
    mean_diff = np.sum(run_trials(job, trials, workers, chunk), axis=0) / trials
    running = np.abs(np.cumsum(mean_diff))
    return [(k + 1, float(v)) for k, v in enumerate(running)]
