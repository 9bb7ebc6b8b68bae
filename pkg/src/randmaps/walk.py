"""Random words, forward orbits and backward compositions.

Two regimes are used for backward objects ``g_1 o ... o g_n``:

* exact composition (:func:`right_composition`), which is capped on breakpoint
  count because a single expanding map can multiply the piece count at every
  step;
* pointwise float evaluation (:func:`backward_collapse`), which scales to long
  words.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .hypotheses import StochasticSystem, check_mu_injectivity
from .measure import AtomMeasure, WalkRng, iterate_markov, quantile_prune, wasserstein1
from .pwlin import ZERO, PwlMap, compose, eval, identity, total_variation

__all__ = [
    "sample_indices",
    "sample_word",
    "sample_words",
    "left_orbit",
    "advance",
    "right_composition",
    "variation_trace",
    "SupermartingaleCheck",
    "supermartingale_step_check",
    "geometric_schedule",
    "backward_collapse",
    "theta_samples",
    "barycenter_check",
    "stability_experiment",
    "bifurcation_experiment",
    "run_trials",
]

# stream purposes, so different experiments with one seed draw independent words
WORDS = 0
STARTS = 1


def sample_indices(gen: np.random.Generator, probs: Sequence[float], n: int) -> np.ndarray:
    """``n`` i.i.d. indices with the given probabilities (inverse-CDF on uniforms)."""
    cum = np.cumsum(np.asarray(probs, dtype=float))
    cum[-1] = 1.0
    u = gen.random(n)
    return np.searchsorted(cum, u, side="right").astype(np.intp)


def sample_word(rng: WalkRng, sys: StochasticSystem, n: int, trial: int = 0) -> np.ndarray:
    """Word of length ``n`` for trial ``trial``; depends only on ``(rng.seed, trial)``."""
    if n < 0:
        raise ValueError("word length must be nonnegative")
    return sample_indices(rng.trial(trial, WORDS), sys.float_weights, n)


def sample_words(rng: WalkRng, sys: StochasticSystem, n: int, trials: Sequence[int]) -> np.ndarray:
    """Stack of words, one row per trial index."""
    out = np.empty((len(trials), n), dtype=np.int8 if len(sys) < 128 else np.intp)
    for row, t in enumerate(trials):
        out[row] = sample_word(rng, sys, n, t)
    return out


def run_trials(func, trials: int, workers: int = 1, chunk: int = 1000) -> list:
    """Apply ``func(trial_indices)`` over consecutive chunks and concatenate in trial order.

    ``func`` must depend only on the indices it receives, which makes the
    result independent of ``workers``.
    """
    chunks = [range(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    if workers <= 1 or len(chunks) <= 1:
        parts = [func(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, chunks))
    out = []
    for p in parts:
        out.extend(p)
    return out


def advance(sys: StochasticSystem, x: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Apply map ``idx[j]`` to ``x[j]`` for every ``j`` (float)."""
    out = np.empty_like(x)
    for i, g in enumerate(sys.maps):
        mask = idx == i
        if mask.any():
            out[mask] = g.evaluate(x[mask])
    return out


def left_orbit(sys: StochasticSystem, w: Sequence[int], x):
    """Trace ``X_0 = x, X_k = g_{w_k}(X_{k-1})``.

    Exact when ``x`` is a Fraction or int, float64 otherwise.
    """
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        pts = [Fraction(x)]
        for i in w:
            pts.append(eval(sys.maps[i], pts[-1]))
        return pts
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError("start point must lie in [0, 1]")
    pts = np.empty(len(w) + 1)
    pts[0] = x
    for k, i in enumerate(w, start=1):
        pts[k] = sys.maps[i].evaluate(pts[k - 1])
    return pts


def right_composition(sys: StochasticSystem, w: Sequence[int], cap: int = 100_000) -> PwlMap:
    """Exact ``g_{w_1} o ... o g_{w_n}``, the newest map innermost."""
    if cap < 2:
        raise ValueError("cap must be at least 2")
    f = identity()
    for i in w:
        f = compose(f, sys.maps[i], cap=cap)
    return f


def variation_trace(sys: StochasticSystem, w: Sequence[int], cap: int = 100_000) -> list[Fraction]:
    """Exact variations ``V_k`` of all nonempty prefix compositions."""
    f = identity()
    out = []
    for i in w:
        f = compose(f, sys.maps[i], cap=cap)
        out.append(total_variation(f))
    return out


class SupermartingaleCheck(NamedTuple):
    lhs: Fraction
    rhs: Fraction
    holds: bool
    precondition: bool  # False when the system is not mu-injective


def supermartingale_step_check(
    sys: StochasticSystem, prefix: Sequence[int], cap: int = 100_000, injective: bool | None = None
) -> SupermartingaleCheck:
    """Exact one-step conditional expectation of the variation process.

    ``lhs = sum_i w_i * Var(F o g_i)`` against ``rhs = Var(F)`` where ``F`` is
    the prefix composition.  Pass ``injective`` to skip re-certifying the system.
    """
    if injective is None:
        injective = check_mu_injectivity(sys)[0]
    f = right_composition(sys, prefix, cap)
    lhs = sum((w * total_variation(compose(f, g, cap=cap)) for w, g in zip(sys.weights, sys.maps)), ZERO)
    rhs = total_variation(f)
    return SupermartingaleCheck(lhs, rhs, lhs <= rhs, bool(injective))


def geometric_schedule(n: int, ratio: float = 2.0) -> list[int]:
    """``ceil(ratio**k)`` for k = 0, 1, ... up to ``n``, always ending at ``n``."""
    if n <= 0:
        return [0]
    out = []
    k = 0
    while True:
        v = math.ceil(ratio**k)
        if v >= n:
            break
        if not out or v > out[-1]:
            out.append(v)
        k += 1
    out.append(n)
    return out


def _backward_points(sys: StochasticSystem, word: np.ndarray, n: int, x: np.ndarray) -> np.ndarray:
    y = x.copy()
    for j in range(n - 1, -1, -1):
        y = sys.maps[word[j]].evaluate(y)
    return y


def backward_collapse(
    sys: StochasticSystem,
    rng: WalkRng,
    sample: AtomMeasure,
    n: int,
    report_at: Sequence[int] | None = None,
    trial: int = 0,
) -> list[tuple[int, float, float]]:
    """Diameter and midpoint of ``g_1 o ... o g_{n_k}`` applied to the sample atoms.

    Returns ``(n_k, diameter, midpoint)`` for each report length; the midpoint
    estimates the collapse point of the backward pushforward.
    """
    schedule = list(report_at) if report_at is not None else geometric_schedule(n)
    if schedule != sorted(schedule) or (schedule and schedule[-1] > n):
        raise ValueError("report_at must be sorted with entries <= n")
    word = sample_word(rng, sys, n, trial)
    out = []
    for nk in schedule:
        y = _backward_points(sys, word, nk, sample.positions)
        lo, hi = float(y.min()), float(y.max())
        out.append((nk, hi - lo, 0.5 * (lo + hi)))
    return out


def theta_samples(
    sys: StochasticSystem, rng: WalkRng, sample: AtomMeasure, words: int, n: int, workers: int = 1
) -> list[tuple[float, float]]:
    """``(diameter, midpoint)`` at length ``n`` for trials ``0 .. words-1``."""

    def job(trials):
        return [backward_collapse(sys, rng, sample, n, [n], trial=t)[-1][1:] for t in trials]

    return run_trials(job, words, workers, chunk=50)


def barycenter_check(
    sys: StochasticSystem,
    rng: WalkRng,
    nu_hat: AtomMeasure,
    words: int,
    n: int,
    sample_size: int = 200,
    workers: int = 1,
) -> float:
    """``d_W`` between the empirical law of collapse points and ``nu_hat``."""
    sample = quantile_prune(nu_hat.positions, nu_hat.weights, min(sample_size, len(nu_hat)))
    thetas = [mid for _, mid in theta_samples(sys, rng, sample, words, n, workers)]
    return wasserstein1(AtomMeasure(thetas), nu_hat)


def stability_experiment(
    sys: StochasticSystem, a: AtomMeasure, b: AtomMeasure, steps: int, prune_to: int
) -> list[tuple[int, float]]:
    ta = iterate_markov(sys, a, steps, prune_to)
    tb = iterate_markov(sys, b, steps, prune_to)
    return [(k, wasserstein1(x, y)) for k, (x, y) in enumerate(zip(ta, tb))]


def bifurcation_experiment(
    sys: StochasticSystem, probes: Sequence[float], steps: int, prune_to: int
) -> np.ndarray:
    """Pairwise ``d_W`` between ``P^steps delta_probe`` for all probe pairs."""
    finals = [iterate_markov(sys, AtomMeasure.dirac(p), steps, prune_to)[-1] for p in probes]
    k = len(finals)
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = wasserstein1(finals[i], finals[j])
    return out
