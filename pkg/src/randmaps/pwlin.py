"""Exact continuous piecewise-linear self-maps of [0, 1].

A :class:`PwlMap` is stored by its breakpoints ``x_0 = 0 < ... < x_k = 1`` and
the values ``y_0, ..., y_k`` at those breakpoints.  Every piece is required to
be strictly monotone, so preimage counts are always finite.  All coordinates
are :class:`fractions.Fraction` and every operation here is exact.

Float evaluation (``PwlMap.evaluate``) is provided for the statistical layers
built on top of this module.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Fraction",
    "PwlMap",
    "RatInterval",
    "StepFunction",
    "PwlError",
    "BreakpointBudgetError",
    "as_fraction",
    "identity",
    "affine",
    "reflect",
    "eval",
    "compose",
    "preimage_count",
    "preimage_count_function",
    "total_variation",
    "banach_vitali_variation",
    "image_interval",
    "ordered_blocks_bound_check",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class PwlError(ValueError):
    """Invalid piecewise-linear data or argument outside [0, 1]."""


class BreakpointBudgetError(RuntimeError):
    """A composition produced more breakpoints than the caller allowed."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"composition needs {count} breakpoints, cap is {cap}")
        self.count = count
        self.cap = cap


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to Fraction.

    Floats are rejected: the exact layer never guesses a rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise PwlError(f"not a rational: {value!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _check_unit(x: Fraction, what: str = "argument") -> None:
    if not ZERO <= x <= ONE:
        raise PwlError(f"{what} {x} lies outside [0, 1]")


@dataclass(frozen=True)
class RatInterval:
    """Interval with rational endpoints inside [0, 1].

    Endpoints are closed by default; ``lo_closed``/``hi_closed`` are used by the
    set computations in :mod:`randmaps.hypotheses`.
    """

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise PwlError(f"empty interval: lo={self.lo} > hi={self.hi}")
        _check_unit(self.lo, "interval endpoint")
        _check_unit(self.hi, "interval endpoint")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        x = as_fraction(x)
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def is_empty(self) -> bool:
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


class PwlMap:
    """Continuous piecewise-linear map of [0, 1] into itself.

    Collinear interior breakpoints are removed on construction, so two maps
    describing the same function compare equal.

    >>> phi2 = PwlMap([0, 1], [0, Fraction(1, 3)])
    >>> phi2(Fraction(1, 2))
    Fraction(1, 6)
    """

    __slots__ = ("xs", "ys", "__dict__")

    def __init__(self, breakpoints: Sequence, values: Sequence):
        xs = [as_fraction(x) for x in breakpoints]
        ys = [as_fraction(y) for y in values]
        if len(xs) != len(ys):
            raise PwlError("breakpoints and values differ in length")
        if len(xs) < 2:
            raise PwlError("a map needs at least one piece")
        if xs[0] != ZERO or xs[-1] != ONE:
            raise PwlError("breakpoints must start at 0 and end at 1")
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise PwlError(f"breakpoints not strictly increasing at {a}, {b}")
        for y in ys:
            _check_unit(y, "value")
        for i in range(1, len(ys)):
            if ys[i - 1] == ys[i]:
                raise PwlError(
                    f"flat piece on [{xs[i - 1]}, {xs[i]}]: pieces must be strictly monotone"
                )
        self.xs, self.ys = _prune_collinear(xs, ys)

    @classmethod
    def from_points(cls, points: Iterable[tuple]) -> "PwlMap":
        pts = list(points)
        return cls([p[0] for p in pts], [p[1] for p in pts])

    @classmethod
    def _trusted(cls, xs: tuple, ys: tuple) -> "PwlMap":
        obj = cls.__new__(cls)
        obj.xs, obj.ys = _prune_collinear(list(xs), list(ys))
        return obj

    @property
    def pieces(self) -> int:
        return len(self.xs) - 1

    @property
    def points(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.xs, self.ys))

    def slope(self, i: int) -> Fraction:
        """Slope of piece ``i`` (0-based)."""
        return (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])

    @cached_property
    def lipschitz(self) -> Fraction:
        return max(abs(self.slope(i)) for i in range(self.pieces))

    def __call__(self, x) -> Fraction:
        return eval(self, x)

    @cached_property
    def _float_xs(self) -> np.ndarray:
        return np.array([float(x) for x in self.xs])

    @cached_property
    def _float_ys(self) -> np.ndarray:
        return np.array([float(y) for y in self.ys])

    def evaluate(self, x):
        """Float evaluation, vectorised over numpy arrays."""
        return np.interp(x, self._float_xs, self._float_ys)

    def __eq__(self, other):
        if not isinstance(other, PwlMap):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        return hash((self.xs, self.ys))

    def __repr__(self):
        pts = " ".join(f"({x},{y})" for x, y in self.points)
        return f"PwlMap({pts})"


def _prune_collinear(xs: list, ys: list) -> tuple[tuple, tuple]:
    out_x = [xs[0]]
    out_y = [ys[0]]
    for i in range(1, len(xs) - 1):
        # keep x_i unless the slopes on both sides agree
        s_left = (ys[i] - out_y[-1]) * (xs[i + 1] - xs[i])
        s_right = (ys[i + 1] - ys[i]) * (xs[i] - out_x[-1])
        if s_left != s_right:
            out_x.append(xs[i])
            out_y.append(ys[i])
    out_x.append(xs[-1])
    out_y.append(ys[-1])
    return tuple(out_x), tuple(out_y)


def identity() -> PwlMap:
    return PwlMap([0, 1], [0, 1])


def affine(slope, intercept) -> PwlMap:
    """The map ``x -> slope*x + intercept``; must send [0, 1] into [0, 1]."""
    slope = as_fraction(slope)
    intercept = as_fraction(intercept)
    return PwlMap([0, 1], [intercept, slope + intercept])


def reflect(m: PwlMap) -> PwlMap:
    """Conjugate by ``x -> 1 - x``: the map ``x -> 1 - m(1 - x)``."""
    return PwlMap([1 - x for x in reversed(m.xs)], [1 - y for y in reversed(m.ys)])


def _piece_index(m: PwlMap, x: Fraction) -> int:
    i = bisect.bisect_right(m.xs, x) - 1
    return min(max(i, 0), m.pieces - 1)


def _interp(x0, y0, x1, y1, x):
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def eval(map: PwlMap, x) -> Fraction:  # noqa: A001 - mirrors the operation name
    """Exact value of ``map`` at ``x`` in [0, 1]."""
    x = as_fraction(x)
    _check_unit(x)
    i = _piece_index(map, x)
    return _interp(map.xs[i], map.ys[i], map.xs[i + 1], map.ys[i + 1], x)


def compose(f: PwlMap, g: PwlMap, cap: int | None = None) -> PwlMap:
    """Exact composition ``x -> f(g(x))``.

    Breakpoints of the result are those of ``g`` together with every preimage
    under ``g`` of an interior breakpoint of ``f``.  Raises
    :class:`BreakpointBudgetError` when more than ``cap`` breakpoints survive
    pruning.
    """
    fx = f.xs
    inner = fx[1:-1]
    xs = [g.xs[0]]
    for i in range(g.pieces):
        x0, x1 = g.xs[i], g.xs[i + 1]
        y0, y1 = g.ys[i], g.ys[i + 1]
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        a = bisect.bisect_right(inner, lo)
        b = bisect.bisect_left(inner, hi)
        hits = inner[a:b]
        if y0 > y1:
            hits = hits[::-1]
        dx = x1 - x0
        dy = y1 - y0
        for c in hits:
            xs.append(x0 + (c - y0) * dx / dy)
        xs.append(x1)
    ys = [_eval_on_piece(f, _eval_on_piece(g, x)) for x in xs]
    out = PwlMap._trusted(tuple(xs), tuple(ys))
    if cap is not None and len(out.xs) > cap:
        raise BreakpointBudgetError(len(out.xs), cap)
    return out


def _eval_on_piece(m: PwlMap, x: Fraction) -> Fraction:
    i = _piece_index(m, x)
    if m.xs[i] == x:
        return m.ys[i]
    if m.xs[i + 1] == x:
        return m.ys[i + 1]
    return _interp(m.xs[i], m.ys[i], m.xs[i + 1], m.ys[i + 1], x)


def preimage_count(map: PwlMap, x) -> int:
    """Number of distinct ``z`` in [0, 1] with ``map(z) == x``."""
    x = as_fraction(x)
    _check_unit(x)
    count = sum(1 for y in map.ys if y == x)
    for y0, y1 in zip(map.ys, map.ys[1:]):
        if min(y0, y1) < x < max(y0, y1):
            count += 1
    return count


@dataclass(frozen=True)
class StepFunction:
    """Function on [0, 1] that is constant between consecutive cut points.

    ``open_values[j]`` is the value on ``(cuts[j], cuts[j+1])`` and
    ``point_values[j]`` the value at ``cuts[j]``.
    """

    cuts: tuple
    open_values: tuple
    point_values: tuple

    def __post_init__(self):
        if len(self.cuts) < 2 or self.cuts[0] != ZERO or self.cuts[-1] != ONE:
            raise PwlError("cuts must run from 0 to 1")
        if any(not a < b for a, b in zip(self.cuts, self.cuts[1:])):
            raise PwlError("cuts must be strictly increasing")
        if len(self.open_values) != len(self.cuts) - 1:
            raise PwlError("need one open value per gap")
        if len(self.point_values) != len(self.cuts):
            raise PwlError("need one point value per cut")

    @classmethod
    def constant(cls, value) -> "StepFunction":
        v = as_fraction(value)
        return cls((ZERO, ONE), (v,), (v, v))

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        _check_unit(x)
        j = bisect.bisect_left(self.cuts, x)
        if j < len(self.cuts) and self.cuts[j] == x:
            return self.point_values[j]
        return self.open_values[j - 1]

    def integral(self) -> Fraction:
        """Lebesgue integral over [0, 1]; point values carry no mass."""
        return sum(
            (v * (b - a) for v, a, b in zip(self.open_values, self.cuts, self.cuts[1:])),
            ZERO,
        )

    def refine(self, cuts: Sequence) -> "StepFunction":
        cuts = tuple(cuts)
        mids = [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
        return StepFunction(cuts, tuple(self(m) for m in mids), tuple(self(c) for c in cuts))

    def scale(self, c) -> "StepFunction":
        c = as_fraction(c)
        return StepFunction(
            self.cuts,
            tuple(c * v for v in self.open_values),
            tuple(c * v for v in self.point_values),
        )

    def __add__(self, other: "StepFunction") -> "StepFunction":
        cuts = tuple(sorted(set(self.cuts) | set(other.cuts)))
        a, b = self.refine(cuts), other.refine(cuts)
        return StepFunction(
            cuts,
            tuple(u + v for u, v in zip(a.open_values, b.open_values)),
            tuple(u + v for u, v in zip(a.point_values, b.point_values)),
        )

    def simplify(self) -> "StepFunction":
        """Drop cuts where the function does not actually change."""
        keep = [self.cuts[0]]
        for j in range(1, len(self.cuts) - 1):
            if not self.open_values[j - 1] == self.point_values[j] == self.open_values[j]:
                keep.append(self.cuts[j])
        keep.append(self.cuts[-1])
        return self.refine(keep)

    def pieces(self):
        """Yield ``(locus, value)`` in left-to-right order, alternating points and gaps."""
        for j, c in enumerate(self.cuts):
            yield RatInterval(c, c), self.point_values[j]
            if j + 1 < len(self.cuts):
                yield RatInterval(c, self.cuts[j + 1], False, False), self.open_values[j]

    def sup(self) -> tuple[Fraction, RatInterval]:
        """Supremum and the maximal contiguous locus (first from the left) attaining it."""
        items = list(self.pieces())
        best = max(v for _, v in items)
        start = next(k for k, (_, v) in enumerate(items) if v == best)
        stop = start
        while stop + 1 < len(items) and items[stop + 1][1] == best:
            stop += 1
        first, last = items[start][0], items[stop][0]
        return best, RatInterval(first.lo, last.hi, first.lo_closed, last.hi_closed)


def preimage_count_function(map: PwlMap) -> StepFunction:
    """The function ``x -> preimage_count(map, x)`` as an exact step function."""
    cuts = tuple(sorted(set(map.ys) | {ZERO, ONE}))
    index = {c: j for j, c in enumerate(cuts)}
    m = len(cuts)
    points = [0] * m
    for y in map.ys:
        points[index[y]] += 1
    # difference arrays over gaps and over cut points strictly inside a piece's range
    gap_diff = [0] * m
    pt_diff = [0] * (m + 1)
    for y0, y1 in zip(map.ys, map.ys[1:]):
        a, b = sorted((index[y0], index[y1]))
        gap_diff[a] += 1
        gap_diff[b] -= 1
        pt_diff[a + 1] += 1
        pt_diff[b] -= 1
    opens = []
    run = 0
    for j in range(m - 1):
        run += gap_diff[j]
        opens.append(Fraction(run))
    run = 0
    for j in range(m):
        run += pt_diff[j]
        points[j] += run
    return StepFunction(cuts, tuple(opens), tuple(Fraction(p) for p in points))


def total_variation(map: PwlMap) -> Fraction:
    """Sum of ``|y_i - y_{i-1}|`` over the breakpoints."""
    return sum((abs(b - a) for a, b in zip(map.ys, map.ys[1:])), ZERO)


def banach_vitali_variation(map: PwlMap) -> Fraction:
    """Integral over [0, 1] of the preimage-count function.

    Computed independently of :func:`total_variation`; the two must agree.
    """
    return preimage_count_function(map).integral()


def image_interval(map: PwlMap, iv: RatInterval) -> RatInterval:
    """Exact closed image ``[min, max]`` of ``map`` over the interval ``iv``."""
    candidates = [eval(map, iv.lo), eval(map, iv.hi)]
    a = bisect.bisect_right(map.xs, iv.lo)
    b = bisect.bisect_left(map.xs, iv.hi)
    candidates.extend(map.ys[a:b])
    return RatInterval(min(candidates), max(candidates))


def ordered_blocks_bound_check(
    map: PwlMap, blocks: Sequence[RatInterval]
) -> tuple[Fraction, Fraction, bool]:
    """Compare the summed image diameters of ordered blocks with the variation.

    Blocks must satisfy ``B_1 <= B_2 <= ...`` (every point of a block lies at or
    below every point of the next one).
    """
    for prev, nxt in zip(blocks, blocks[1:]):
        if prev.hi > nxt.lo:
            raise PwlError(f"blocks out of order: {prev} then {nxt}")
    lhs = sum((image_interval(map, b).length for b in blocks), ZERO)
    rhs = total_variation(map)
    return lhs, rhs, lhs <= rhs
