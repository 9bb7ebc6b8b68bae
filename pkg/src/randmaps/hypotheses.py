"""Exact certification of the standing assumptions on a finite weighted family.

The checks cover condition (A), the diagonal conditions at the endpoints
and mu-injectivity.  Results come with witnesses (labels, intervals) that can
be re-verified by plain evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .pwlin import (
    ONE,
    ZERO,
    PwlError,
    PwlMap,
    RatInterval,
    StepFunction,
    affine,
    as_fraction,
    reflect,
    preimage_count_function,
)

__all__ = [
    "StochasticSystem",
    "CertificateReport",
    "ConditionA",
    "sublevel_set",
    "superlevel_set",
    "interval_union",
    "interval_complement",
    "check_condition_A",
    "check_below_diagonal_left",
    "check_above_diagonal_right",
    "injectivity_profile",
    "check_mu_injectivity",
    "certify",
    "example22_system",
    "example22_maps",
    "reflect_system",
]


@dataclass(frozen=True)
class StochasticSystem:
    """Finitely many maps with strictly positive rational weights summing to 1."""

    maps: tuple
    weights: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        maps = tuple(self.maps)
        weights = tuple(as_fraction(w) for w in self.weights)
        labels = tuple(self.labels) or tuple(f"g{i + 1}" for i in range(len(maps)))
        if not maps:
            raise PwlError("a system needs at least one map")
        if not all(isinstance(m, PwlMap) for m in maps):
            raise TypeError("maps must be PwlMap instances")
        if len(weights) != len(maps) or len(labels) != len(maps):
            raise PwlError("maps, weights and labels must have equal length")
        for lab, w in zip(labels, weights):
            if w <= 0:
                raise PwlError(f"weight of {lab} must be positive, got {w}")
        total = sum(weights, ZERO)
        if total != ONE:
            raise PwlError(f"weights sum to {total}, not 1")
        if len(set(labels)) != len(labels):
            raise PwlError("labels must be unique")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.maps)

    def __getitem__(self, label: str) -> PwlMap:
        return self.maps[self.labels.index(label)]

    @property
    def float_weights(self) -> list[float]:
        return [float(w) for w in self.weights]

    @property
    def monotone(self) -> bool:
        return all(m.pieces == 1 for m in self.maps)


def reflect_system(sys: StochasticSystem) -> StochasticSystem:
    """Same weights and labels, every map conjugated by ``x -> 1 - x``."""
    return StochasticSystem(tuple(reflect(m) for m in sys.maps), sys.weights, sys.labels)


# -- interval sets ---------------------------------------------------------


def _intersect(a: RatInterval | None, b: RatInterval | None) -> RatInterval | None:
    if a is None or b is None:
        return None
    if a.lo > b.lo:
        lo, lo_c = a.lo, a.lo_closed
    elif b.lo > a.lo:
        lo, lo_c = b.lo, b.lo_closed
    else:
        lo, lo_c = a.lo, a.lo_closed and b.lo_closed
    if a.hi < b.hi:
        hi, hi_c = a.hi, a.hi_closed
    elif b.hi < a.hi:
        hi, hi_c = b.hi, b.hi_closed
    else:
        hi, hi_c = a.hi, a.hi_closed and b.hi_closed
    if lo > hi or (lo == hi and not (lo_c and hi_c)):
        return None
    return RatInterval(lo, hi, lo_c, hi_c)


def interval_union(intervals: Sequence[RatInterval]) -> list[RatInterval]:
    """Union of intervals as a sorted list of disjoint maximal intervals."""
    items = sorted(
        (iv for iv in intervals if not iv.is_empty()),
        key=lambda iv: (iv.lo, not iv.lo_closed),
    )
    out: list[RatInterval] = []
    for iv in items:
        if out:
            cur = out[-1]
            touching = iv.lo < cur.hi or (iv.lo == cur.hi and (cur.hi_closed or iv.lo_closed))
            if touching:
                if iv.hi > cur.hi:
                    hi, hi_c = iv.hi, iv.hi_closed
                elif iv.hi == cur.hi:
                    hi, hi_c = cur.hi, cur.hi_closed or iv.hi_closed
                else:
                    hi, hi_c = cur.hi, cur.hi_closed
                out[-1] = RatInterval(cur.lo, hi, cur.lo_closed, hi_c)
                continue
        out.append(iv)
    return out


def interval_complement(intervals: Sequence[RatInterval], domain: RatInterval) -> list[RatInterval]:
    """``domain`` minus the union of ``intervals``."""
    clipped = [_intersect(iv, domain) for iv in intervals]
    covered = interval_union([iv for iv in clipped if iv is not None])
    gaps: list[RatInterval] = []
    pos, pos_c = domain.lo, domain.lo_closed
    for iv in covered:
        gap = _intersect(RatInterval(pos, iv.lo, pos_c, not iv.lo_closed), domain) if pos <= iv.lo else None
        if gap is not None:
            gaps.append(gap)
        pos, pos_c = iv.hi, not iv.hi_closed
    if pos <= domain.hi:
        gap = _intersect(RatInterval(pos, domain.hi, pos_c, domain.hi_closed), domain)
        if gap is not None:
            gaps.append(gap)
    return gaps


def _positive_part(a: Fraction, b: Fraction, fa: Fraction, fb: Fraction) -> RatInterval | None:
    """``{x in [a, b] : f(x) > 0}`` for ``f`` linear with ``f(a)=fa``, ``f(b)=fb``."""
    if fa > 0 and fb > 0:
        return RatInterval(a, b)
    if fa <= 0 and fb <= 0:
        return None
    root = a + (b - a) * fa / (fa - fb)
    if fa > 0:
        return RatInterval(a, root, True, False)
    return RatInterval(root, b, False, True)


def sublevel_set(map: PwlMap) -> list[RatInterval]:
    """``{x in (0, 1] : 0 < map(x) < x}`` as disjoint intervals with closure flags."""
    parts = []
    for i in range(map.pieces):
        a, b = map.xs[i], map.xs[i + 1]
        ya, yb = map.ys[i], map.ys[i + 1]
        s = _intersect(_positive_part(a, b, ya, yb), _positive_part(a, b, a - ya, b - yb))
        if s is not None:
            parts.append(s)
    return interval_union(parts)


def superlevel_set(map: PwlMap) -> list[RatInterval]:
    """``{x in [0, 1) : x < map(x) < 1}``; the mirror image of :func:`sublevel_set`."""
    parts = []
    for i in range(map.pieces):
        a, b = map.xs[i], map.xs[i + 1]
        ya, yb = map.ys[i], map.ys[i + 1]
        s = _intersect(_positive_part(a, b, ya - a, yb - b), _positive_part(a, b, 1 - ya, 1 - yb))
        if s is not None:
            parts.append(s)
    return interval_union(parts)


# -- certificates ----------------------------------------------------------

LEFT_DOMAIN = RatInterval(0, 1, False, True)
RIGHT_DOMAIN = RatInterval(0, 1, True, False)


class ConditionA(NamedTuple):
    holds: bool
    uncovered_left: list
    uncovered_right: list

    @property
    def uncovered(self) -> list:
        return self.uncovered_left + self.uncovered_right


def check_condition_A(sys: StochasticSystem) -> ConditionA:
    """Pointwise cover test for condition (A).

    Left side: the sets ``{x : 0 < g(x) < x}`` over maps with ``g(0) = 0`` must
    cover ``(0, 1]``.  Right side: ``{x : x < h(x) < 1}`` over maps with
    ``h(1) = 1`` must cover ``[0, 1)``.  The gaps are returned exactly.
    """
    left = [iv for m in sys.maps if m.ys[0] == ZERO for iv in sublevel_set(m)]
    right = [iv for m in sys.maps if m.ys[-1] == ONE for iv in superlevel_set(m)]
    gaps_left = interval_complement(left, LEFT_DOMAIN)
    gaps_right = interval_complement(right, RIGHT_DOMAIN)
    return ConditionA(not gaps_left and not gaps_right, gaps_left, gaps_right)


def check_below_diagonal_left(sys: StochasticSystem) -> tuple[bool, str | None]:
    # g(0) = 0 forces an increasing first piece; g(x) < x near 0 iff its slope < 1
    for label, m in zip(sys.labels, sys.maps):
        if m.ys[0] == ZERO and m.slope(0) < 1:
            return True, label
    return False, None


def check_above_diagonal_right(sys: StochasticSystem) -> tuple[bool, str | None]:
    for label, m in zip(sys.labels, sys.maps):
        if m.ys[-1] == ONE and m.slope(m.pieces - 1) < 1:
            return True, label
    return False, None


def injectivity_profile(sys: StochasticSystem) -> StepFunction:
    """Exact ``x -> sum_i w_i * n(g_i, x)`` on the common refinement of critical values."""
    total = None
    for w, m in zip(sys.weights, sys.maps):
        term = preimage_count_function(m).scale(w)
        total = term if total is None else total + term
    return total


def check_mu_injectivity(sys: StochasticSystem) -> tuple[bool, Fraction, RatInterval]:
    """Return ``(holds, margin, argmax)`` with ``margin`` the exact sup of the profile."""
    margin, where = injectivity_profile(sys).sup()
    return margin <= 1, margin, where


@dataclass(frozen=True)
class CertificateReport:
    condition_A: bool
    uncovered: list
    below_diag_left: bool
    below_witness: str | None
    above_diag_right: bool
    above_witness: str | None
    mu_injective: bool
    injectivity_margin: Fraction
    margin_argmax: RatInterval

    @property
    def ok(self) -> bool:
        return self.condition_A and self.below_diag_left and self.above_diag_right and self.mu_injective


def certify(sys: StochasticSystem) -> CertificateReport:
    cond = check_condition_A(sys)
    below, bw = check_below_diagonal_left(sys)
    above, aw = check_above_diagonal_right(sys)
    inj, margin, where = check_mu_injectivity(sys)
    return CertificateReport(cond.holds, cond.uncovered, below, bw, above, aw, inj, margin, where)


def example22_maps() -> tuple[PwlMap, PwlMap, PwlMap]:
    third = Fraction(1, 3)
    phi1 = PwlMap([0, third, 2 * third, 1], [0, 1, 0, 1])
    phi2 = affine(third, 0)
    phi3 = affine(third, 2 * third)
    return phi1, phi2, phi3


def example22_system(p) -> StochasticSystem:
    """The three-map family: tent-like ``phi1`` with weight ``1-2p``, ``x/3`` and ``x/3+2/3`` with ``p`` each."""
    p = as_fraction(p)
    if not ZERO < p < Fraction(1, 2):
        raise PwlError(f"p must lie in (0, 1/2), got {p}")
    return StochasticSystem(example22_maps(), (1 - 2 * p, p, p), ("phi1", "phi2", "phi3"))
