"""Points, lines, order types and combinatorial line arrangements, all exact.

Point-line duality maps the point ``(a, b)`` to the line ``y = a*x - b`` and
back.  Lines of an arrangement are numbered by decreasing slope and each line
records the lines it meets from left to right; crossings at the same point
share a group.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from typing import Iterable, Sequence


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True, order=True)
class Point:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))


@dataclass(frozen=True)
class DualLine:
    """The non-vertical line ``y = a*x - b``."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def at(self, x) -> Fraction:
        return self.a * x - self.b

    def side(self, p: Point) -> int:
        """+1 if ``p`` is above the line, 0 on it, -1 below."""
        return _sgn(p.y - self.at(p.x))


def triple_sign(p: Point, q: Point, r: Point) -> int:
    """Orientation of the turn p -> q -> r: +1 left, 0 straight, -1 right."""
    return _sgn((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x))


def dualize(p: Point) -> DualLine:
    return DualLine(p.x, p.y)


def dualize_line(line: DualLine) -> Point:
    return Point(line.a, line.b)


# -- order types --------------------------------------------------------------

@dataclass(frozen=True)
class CombinatorialOrderType:
    """Signs of the triples ``i < j < k`` of ``1..n``."""

    n: int
    signs: dict

    @property
    def simple(self) -> bool:
        return all(s != 0 for s in self.signs.values())

    def sign(self, i: int, j: int, k: int) -> int:
        """Sign of an arbitrarily ordered triple of distinct indices."""
        triple = [i, j, k]
        if len(set(triple)) != 3:
            raise ValueError("indices must be distinct")
        inversions = sum(1 for a, b in combinations(triple, 2) if a > b)
        s = self.signs[tuple(sorted(triple))]
        return -s if inversions % 2 else s

    def check_total(self) -> None:
        for t in combinations(range(1, self.n + 1), 3):
            if t not in self.signs or self.signs[t] not in (-1, 0, 1):
                raise ValueError(f"order type has no valid sign for {t}")


def order_type(points: Sequence[Point]) -> CombinatorialOrderType:
    if len(points) < 3:
        raise ValueError("an order type needs at least three points")
    signs = {}
    for i, j, k in combinations(range(len(points)), 3):
        signs[(i + 1, j + 1, k + 1)] = triple_sign(points[i], points[j], points[k])
    return CombinatorialOrderType(len(points), signs)


# -- arrangements -------------------------------------------------------------

@dataclass(frozen=True)
class ArrangementDescription:
    """``lists[i-1]`` holds the crossing groups met along line ``i`` from left
    to right.  ``labels`` optionally names the input object behind each line."""

    n: int
    lists: tuple[tuple[frozenset, ...], ...]
    labels: tuple[int, ...] | None = None

    def to_text(self) -> str:
        out = []
        for i, groups in enumerate(self.lists, start=1):
            cells = " ".join("{" + " ".join(str(x) for x in sorted(g)) + "}" for g in groups)
            out.append(f"{i}: {cells}".rstrip())
        return "\n".join(out)

    def same_lists(self, other: ArrangementDescription) -> bool:
        return self.n == other.n and self.lists == other.lists


def parse_description(text: str) -> ArrangementDescription:
    """Inverse of :meth:`ArrangementDescription.to_text`."""
    import re

    lists = []
    for expected, line in enumerate((l for l in text.splitlines() if l.strip()), start=1):
        head, _, rest = line.partition(":")
        if int(head) != expected:
            raise ValueError(f"line {expected} is labelled {head.strip()}")
        groups = re.findall(r"\{([^}]*)\}", rest)
        lists.append(tuple(frozenset(int(x) for x in g.split()) for g in groups))
    return ArrangementDescription(len(lists), tuple(lists))


def arrangement_description(lines: Sequence[DualLine]) -> ArrangementDescription:
    """Combinatorial description of an arrangement with pairwise distinct slopes."""
    slopes = [l.a for l in lines]
    if len(set(slopes)) != len(slopes):
        raise ValueError("two lines have the same slope")
    order = sorted(range(len(lines)), key=lambda t: -lines[t].a)
    ranked = [lines[t] for t in order]
    n = len(ranked)
    lists = []
    for i in range(n):
        crossings: dict[Fraction, set[int]] = {}
        li = ranked[i]
        for j in range(n):
            if j == i:
                continue
            lj = ranked[j]
            x = (li.b - lj.b) / (li.a - lj.a)
            crossings.setdefault(x, set()).add(j + 1)
        lists.append(tuple(frozenset(crossings[x]) for x in sorted(crossings)))
    return ArrangementDescription(n, tuple(lists), tuple(t + 1 for t in order))


def _positions(groups: Iterable[frozenset]) -> dict[int, int]:
    pos = {}
    for g_index, g in enumerate(groups):
        for x in g:
            pos[x] = g_index
    return pos


def check_description_consistency(d: ArrangementDescription) -> list[str]:
    """Violated conditions; empty for descriptions of actual arrangements.

    Checks that list ``i`` names every other line exactly once, and, for each
    triple ``i < j < k``, that the three lists agree on the order of the three
    crossings: ``k`` before ``j`` on line ``i`` exactly when ``k`` comes before
    ``i`` on line ``j`` and ``j`` before ``i`` on line ``k``, with ties
    (a common crossing point) on all three lines at once.
    """
    report = []
    n = d.n
    if len(d.lists) != n:
        report.append(f"expected {n} lists, found {len(d.lists)}")
        return report
    positions = []
    for i, groups in enumerate(d.lists, start=1):
        seen: list[int] = [x for g in groups for x in g]
        expected = set(range(1, n + 1)) - {i}
        if sorted(seen) != sorted(expected):
            missing = sorted(expected - set(seen))
            extra = sorted(x for x in set(seen) if seen.count(x) > 1 or x not in expected)
            report.append(f"coverage: line {i} missing {missing} extra {extra}")
        if any(not g for g in groups):
            report.append(f"coverage: line {i} has an empty group")
        positions.append(_positions(groups))
    if report:
        return report
    for i, j, k in combinations(range(1, n + 1), 3):
        on_i = _sgn(positions[i - 1][k] - positions[i - 1][j])
        on_j = _sgn(positions[j - 1][k] - positions[j - 1][i])
        on_k = _sgn(positions[k - 1][j] - positions[k - 1][i])
        if not on_i == on_j == on_k:
            report.append(f"order: triple ({i},{j},{k}) crossing orders disagree "
                          f"({on_i:+d},{on_j:+d},{on_k:+d})")
    return report


def order_type_to_arrangement(t: CombinatorialOrderType) -> ArrangementDescription:
    """Description of the dual arrangement of ``p_1..p_{n-1}`` for any
    realization in which ``p_n`` lies far below all other points.

    With ``p_n`` far below, ``sign(i, j, n) = -1`` exactly when ``x_i < x_j``,
    which fixes the slope order of the dual lines.  Along the dual line of
    ``p_k`` the crossing with the dual of ``p_i`` sits at the slope of the
    segment ``p_k p_i``; two such slopes compare by
    ``sign(k, i, j) * sign(x_i - x_k) * sign(x_j - x_k)``.
    """
    if not t.simple:
        raise ValueError("the order type is not simple")
    n = t.n
    if n < 3:
        raise ValueError("need at least three points")
    last = n

    def x_cmp(i: int, j: int) -> int:
        """sign(x_i - x_j)."""
        if i == j:
            return 0
        return t.sign(i, j, last)

    pts = list(range(1, n))
    by_x_desc = sorted(pts, key=cmp_to_key(lambda i, j: -x_cmp(i, j)))
    for a, b in combinations(by_x_desc, 2):
        if x_cmp(a, b) <= 0:
            raise ValueError("triples with the last point do not induce a linear order")
    rank = {p: r for r, p in enumerate(by_x_desc, start=1)}

    lists = []
    for k in by_x_desc:
        others = [i for i in pts if i != k]

        def before(i: int, j: int, k: int = k) -> int:
            return t.sign(k, i, j) * x_cmp(i, k) * x_cmp(j, k)

        ordered = sorted(others, key=cmp_to_key(lambda i, j: -before(i, j)))
        lists.append(tuple(frozenset((rank[i],)) for i in ordered))
    return ArrangementDescription(n - 1, tuple(lists), tuple(by_x_desc))


# -- cross-ratio --------------------------------------------------------------

def cross_ratio(a: Point, b: Point, c: Point, d: Point) -> Fraction:
    """``(a,b;c,d) = |a,c| |b,d| / (|a,d| |b,c|)`` for collinear points, with
    oriented distances measured by signed coordinate differences."""
    pts = (a, b, c, d)
    base = next((q for q in pts[1:] if q != a), None)
    if base is None:
        raise ValueError("points coincide")
    if any(triple_sign(a, base, q) != 0 for q in pts):
        raise ValueError("points are not collinear")
    if a.x != base.x:
        coord = [p.x for p in pts]
    else:
        coord = [p.y for p in pts]
    ca, cb, cc, cd = coord
    den = (cd - ca) * (cc - cb)
    if den == 0:
        raise ValueError("coincident points make the cross-ratio undefined")
    return (cc - ca) * (cd - cb) / den


# -- I/O ----------------------------------------------------------------------

def parse_points(text: str) -> list[Point]:
    """Lines ``x y`` with rational coordinates such as ``3/4``."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'x y'")
        try:
            out.append(Point(Fraction(parts[0]), Fraction(parts[1])))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def format_order_type(t: CombinatorialOrderType) -> str:
    lines = [f"{i} {j} {k} {s:+d}" for (i, j, k), s in sorted(t.signs.items())]
    return "\n".join(lines)


def parse_order_type(text: str) -> CombinatorialOrderType:
    signs = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        i, j, k, s = (int(x) for x in line.split())
        if not i < j < k:
            raise ValueError(f"triple {i} {j} {k} is not increasing")
        signs[(i, j, k)] = s
    n = max((max(t) for t in signs), default=0)
    ot = CombinatorialOrderType(n, signs)
    ot.check_total()
    return ot
