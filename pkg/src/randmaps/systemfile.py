"""Text format for stochastic systems.

Grammar (one statement per line, ``#`` starts a comment)::

    map <label> = (x0,y0) (x1,y1) ... (xk,yk)
    weights <label>=<rational> <label>=<rational> ...

Coordinates and weights are integers or ``p/q`` fractions.  Labels match
``[A-Za-z_][A-Za-z0-9_.-]*``.  ``weights`` may be split across several lines;
every map needs exactly one weight.  Observables use the same point syntax
with the keyword ``observable`` and unrestricted values.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .hypotheses import StochasticSystem
from .pwlin import PwlError, PwlMap

__all__ = [
    "SystemFileError",
    "parse_system",
    "serialize_system",
    "parse_observable",
    "serialize_observable",
]

LABEL = r"[A-Za-z_][A-Za-z0-9_.\-]*"
RATIONAL = r"[+-]?\d+(?:/\d+)?"
_map_head = re.compile(rf"\s*(map|observable)\s+({LABEL})\s*=\s*")
_point = re.compile(rf"\s*\(\s*({RATIONAL})\s*,\s*({RATIONAL})\s*\)")
_weights_head = re.compile(r"\s*weights\b")
_weight = re.compile(rf"\s*({LABEL})\s*=\s*({RATIONAL})")


class SystemFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None, label: str | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        if label is not None:
            message = f"{label}: {message}"
        super().__init__(where + message)
        self.line = line
        self.col = col
        self.label = label


def _rational(text: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise SystemFileError(f"zero denominator in {text!r}", line, col) from None


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _parse_points(text: str, pos: int, lineno: int) -> list[tuple[Fraction, Fraction]]:
    points = []
    while pos < len(text):
        m = _point.match(text, pos)
        if m is None:
            raise SystemFileError("expected a point '(x,y)'", lineno, pos + 1)
        points.append((_rational(m.group(1), lineno, m.start(1) + 1), _rational(m.group(2), lineno, m.start(2) + 1)))
        pos = m.end()
    if not points:
        raise SystemFileError("map has no points", lineno, pos + 1)
    return points


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if line.strip():
            yield lineno, line


def parse_system(text: str) -> StochasticSystem:
    maps: dict[str, tuple[int, list]] = {}
    weights: dict[str, Fraction] = {}
    weight_line: dict[str, int] = {}
    for lineno, line in _statements(text):
        head = _map_head.match(line)
        if head is not None:
            if head.group(1) != "map":
                raise SystemFileError("'observable' is not allowed in a system file", lineno, 1)
            label = head.group(2)
            if label in maps:
                raise SystemFileError(f"duplicate map label {label!r}", lineno, head.start(2) + 1)
            maps[label] = (lineno, _parse_points(line, head.end(), lineno))
            continue
        wh = _weights_head.match(line)
        if wh is not None:
            pos = wh.end()
            if not line[pos:].strip():
                raise SystemFileError("empty weights statement", lineno, pos + 1)
            while pos < len(line):
                m = _weight.match(line, pos)
                if m is None:
                    raise SystemFileError("expected '<label>=<rational>'", lineno, pos + 1)
                label = m.group(1)
                if label in weights:
                    raise SystemFileError(f"weight for {label!r} given twice", lineno, m.start(1) + 1)
                weights[label] = _rational(m.group(2), lineno, m.start(2) + 1)
                weight_line[label] = lineno
                pos = m.end()
            continue
        col = len(line) - len(line.lstrip()) + 1
        raise SystemFileError("expected 'map' or 'weights'", lineno, col)

    if not maps:
        raise SystemFileError("no maps defined")
    for label in weights:
        if label not in maps:
            raise SystemFileError(f"weight for unknown map {label!r}", weight_line[label])
    built = []
    for label, (lineno, pts) in maps.items():
        if label not in weights:
            raise SystemFileError("map has no weight", lineno, label=label)
        if weights[label] <= 0:
            raise SystemFileError(f"weight must be positive, got {weights[label]}", weight_line[label], label=label)
        try:
            built.append(PwlMap.from_points(pts))
        except PwlError as exc:
            raise SystemFileError(str(exc), lineno, label=label) from None
    total = sum(weights.values(), Fraction(0))
    if total != 1:
        raise SystemFileError(f"weights sum to {total}, not 1")
    labels = tuple(maps)
    return StochasticSystem(tuple(built), tuple(weights[lab] for lab in labels), labels)


def _fmt_points(points) -> str:
    return " ".join(f"({x},{y})" for x, y in points)


def serialize_system(sys: StochasticSystem) -> str:
    lines = [f"map {lab} = {_fmt_points(m.points)}" for lab, m in zip(sys.labels, sys.maps)]
    lines.append("weights " + " ".join(f"{lab}={w}" for lab, w in zip(sys.labels, sys.weights)))
    return "\n".join(lines) + "\n"


def parse_observable(text: str):
    """First ``observable`` statement of ``text`` as a :class:`randmaps.clt.Observable`."""
    from .clt import Observable

    for lineno, line in _statements(text):
        head = _map_head.match(line)
        if head is None or head.group(1) != "observable":
            raise SystemFileError("expected 'observable <label> = (x,y) ...'", lineno, 1)
        pts = _parse_points(line, head.end(), lineno)
        try:
            return Observable.from_points(pts)
        except PwlError as exc:
            raise SystemFileError(str(exc), lineno, label=head.group(2)) from None
    raise SystemFileError("no observable defined")


def serialize_observable(phi, label: str = "phi") -> str:
    return f"observable {label} = {_fmt_points(zip(phi.breakpoints, phi.values))}\n"
