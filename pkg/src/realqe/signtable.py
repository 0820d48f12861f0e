"""Sign tables of univariate polynomials, computed without locating roots.

The polynomial list is first closed under derivatives and pseudoremainders
and sorted by degree.  The table is then grown one polynomial at a time:
the sign of the new polynomial at every old boundary is read off from the
sign of its pseudoremainder by a polynomial vanishing there, and a new
boundary is inserted in an open interval exactly when the signs at its two
ends are opposite.

All coefficient sign questions go through a *sign oracle*.  For genuinely
univariate input the oracle just inspects rational constants; the
quantifier-elimination module plugs in an oracle that branches on the sign
of coefficients that are polynomials in other variables.
"""
from __future__ import annotations

import math

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Protocol, Sequence

from realqe import formula as fm
from realqe.polynomials import Polynomial, poly_from_term, pseudoremainder, sign

INTERVAL = "I"
BOUNDARY = "B"


class SignOracle(Protocol):
    def sign(self, p: Polynomial) -> int:
        """Sign of ``p``, a polynomial free of the main variable."""


class ExactSigns:
    """Oracle for constant coefficients."""

    def sign(self, p: Polynomial) -> int:
        if not p.is_constant():
            raise ValueError(f"coefficient {p} is not a constant; input is not univariate")
        return sign(p.constant_value)


EXACT = ExactSigns()


class InconsistentSigns(Exception):
    """The oracle's answers cannot all hold at once.

    Never raised for exact (univariate) oracles; under symbolic branching it
    marks a path whose sign assumptions are jointly unsatisfiable.
    """


class ClosureInvariantError(AssertionError):
    pass


@lru_cache(maxsize=200_000)
def _prem(a: Polynomial, b: Polynomial, v: str) -> Polynomial:
    return pseudoremainder(a, b, v, even=True)


@lru_cache(maxsize=200_000)
def _derivative(p: Polynomial, v: str) -> Polynomial:
    return p.derivative(v)


@lru_cache(maxsize=200_000)
def _truncations(p: Polynomial, v: str) -> tuple[tuple[Polynomial, Polynomial, int], ...]:
    """``(coefficient of v^k, primitive truncation to degree k, k)`` for every
    k present in ``p``, highest first."""
    coeffs = p.coefficients(v)
    top = max(coeffs)
    out = []
    for k in sorted(coeffs, reverse=True):
        q = p if k == top else p.truncate(v, k)
        out.append((coeffs[k], q.primitive()[1], k))
    return tuple(out)


def effective(p: Polynomial, v: str, oracle: SignOracle) -> tuple[Polynomial, int] | None:
    """Drop leading coefficients the oracle reports as zero.

    Returns ``(q, d)`` where ``q`` is a positive rational multiple of the
    truncated polynomial and ``d`` its degree in ``v``, or None when every
    coefficient vanishes.
    """
    if p.is_zero():
        return None
    for c, q, k in _truncations(p, v):
        if oracle.sign(c) != 0:
            return q, k
    return None


@dataclass
class ClosureList:
    """Polynomials closed under derivative and pairwise pseudoremainder,
    sorted by degree; back-pointers refer to positions in ``polys``."""

    var: str
    polys: list[Polynomial]
    degrees: list[int]
    derivative: dict[int, int | None] = field(default_factory=dict)
    remainder: dict[tuple[int, int], int | None] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.polys)

    def index(self, p: Polynomial) -> int:
        return self._pos[p]

    def __post_init__(self):
        self._pos = {p: i for i, p in enumerate(self.polys)}

    def __contains__(self, p: Polynomial) -> bool:
        return p in self._pos


def _sort_key(p: Polynomial, d: int):
    return (d, str(p))


def closure(polys: Iterable[Polynomial], var: str | None = None,
            oracle: SignOracle = EXACT) -> ClosureList:
    """Close ``polys`` under derivative and pseudoremainder in ``var``.

    Zero polynomials and positive rational multiples of members already present
    are dropped.  With the default exact oracle all inputs must be univariate.
    """
    polys = list(polys)
    if var is None:
        var = _common_var(polys)
    if all(set(p.vars) <= {var} for p in polys):
        # only constant coefficients get asked about, and every oracle signs those exactly
        return _univariate_closure(polys, var)
    found: dict[Polynomial, int] = {}
    order: list[Polynomial] = []
    deriv: dict[Polynomial, Polynomial | None] = {}
    rem: dict[tuple[Polynomial, Polynomial], Polynomial | None] = {}

    def add(p: Polynomial) -> Polynomial | None:
        e = effective(p, var, oracle)
        if e is None:
            return None
        q, d = e
        if q not in found:
            found[q] = d
            order.append(q)
        return q

    for p in polys:
        add(p)
    i = 0
    while i < len(order):
        p = order[i]
        dp = found[p]
        if dp >= 1:
            deriv[p] = add(_derivative(p, var))
            for q in order[:i]:
                dq = found[q]
                if dq < 1:
                    continue
                if dp >= dq:
                    rem[p, q] = add(_prem(p, q, var))
                if dq >= dp:
                    rem[q, p] = add(_prem(q, p, var))
        i += 1

    ranked = sorted(order, key=lambda p: _sort_key(p, found[p]))
    pos = {p: k for k, p in enumerate(ranked)}
    idx = lambda p: None if p is None else pos[p]
    return ClosureList(
        var=var,
        polys=ranked,
        degrees=[found[p] for p in ranked],
        derivative={pos[p]: idx(d) for p, d in deriv.items()},
        remainder={(pos[a], pos[b]): idx(r) for (a, b), r in rem.items()},
    )


def _dense(p: Polynomial, var: str) -> tuple[int, ...]:
    _, q = p.primitive()
    out = [0] * (int(q.degree(var)) + 1)
    for e, c in q.terms.items():
        out[e[0] if e else 0] = int(c)
    return tuple(out)


def _primitive_dense(p: list[int]) -> tuple[int, ...] | None:
    while p and not p[-1]:
        p.pop()
    if not p:
        return None
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return tuple(c // g for c in p)


def _dense_prem(a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
    """Even pseudoremainder on integer coefficient tuples (constant term first)."""
    e = len(b) - 1
    lc = b[e]
    n = len(a) - e
    if n % 2:
        n += 1
    r = list(a)
    steps = 0
    while r and len(r) - 1 >= e:
        lr, shift = r[-1], len(r) - 1 - e
        r = [lc * c for c in r[:-1]]
        for k in range(e):
            r[k + shift] -= lr * b[k]
        while r and not r[-1]:
            r.pop()
        steps += 1
    # only the sign of the leftover scale factor matters after taking the content
    if n > steps and lc < 0 and (n - steps) % 2:
        r = [-c for c in r]
    return r


def _univariate_closure(polys: Sequence[Polynomial], var: str) -> ClosureList:
    # same procedure as the general loop, on integer tuples
    found: dict[tuple[int, ...], int] = {}
    order: list[tuple[int, ...]] = []
    deriv: dict = {}
    rem: dict = {}

    def add(p: tuple[int, ...] | None) -> tuple[int, ...] | None:
        if p is not None and p not in found:
            found[p] = len(p) - 1
            order.append(p)
        return p

    for p in polys:
        if not p.is_zero():
            add(_dense(p, var))
    i = 0
    while i < len(order):
        p = order[i]
        dp = found[p]
        if dp >= 1:
            deriv[p] = add(_primitive_dense([k * c for k, c in enumerate(p)][1:]))
            for q in order[:i]:
                dq = found[q]
                if dq < 1:
                    continue
                if dp >= dq:
                    rem[p, q] = add(_primitive_dense(_dense_prem(p, q)))
                if dq >= dp:
                    rem[q, p] = add(_primitive_dense(_dense_prem(q, p)))
        i += 1

    as_poly = {t: Polynomial((var,), {(k,): c for k, c in enumerate(t) if c}) for t in order}
    ranked = sorted(order, key=lambda t: _sort_key(as_poly[t], found[t]))
    pos = {t: k for k, t in enumerate(ranked)}
    idx = lambda t: None if t is None else pos[t]
    return ClosureList(
        var=var,
        polys=[as_poly[t] for t in ranked],
        degrees=[found[t] for t in ranked],
        derivative={pos[t]: idx(d) for t, d in deriv.items()},
        remainder={(pos[a], pos[b]): idx(r) for (a, b), r in rem.items()},
    )


def _common_var(polys: Sequence[Polynomial]) -> str:
    names = set()
    for p in polys:
        names.update(p.vars)
    if len(names) > 1:
        raise ValueError(f"polynomials are not univariate: variables {sorted(names)}")
    return names.pop() if names else "X"


@dataclass(frozen=True)
class SignTable:
    """Sign vectors over alternating open intervals and boundary points.

    ``columns[c][i]`` is the sign of ``polys[i]`` on column ``c``; column kinds
    alternate, starting and ending with an interval.
    """

    polys: tuple[Polynomial, ...]
    kinds: tuple[str, ...]
    columns: tuple[tuple[int, ...], ...]

    @property
    def boundaries(self) -> int:
        return len(self.kinds) // 2

    def row(self, i: int) -> tuple[int, ...]:
        return tuple(col[i] for col in self.columns)

    def restrict(self, indices: Sequence[int]) -> SignTable:
        """Table of the sub-list ``polys[indices]``: boundaries where none of
        them vanishes are dissolved into the neighbouring intervals."""
        keep_polys = tuple(self.polys[i] for i in indices)
        kinds: list[str] = []
        cols: list[tuple[int, ...]] = []
        for kind, col in zip(self.kinds, self.columns):
            sub = tuple(col[i] for i in indices)
            if kind == BOUNDARY and 0 not in sub:
                continue
            if kind == INTERVAL and kinds and kinds[-1] == INTERVAL:
                if cols[-1] != sub:
                    raise ClosureInvariantError("adjacent intervals disagree after restriction")
                continue
            if kind == BOUNDARY and kinds and kinds[-1] == BOUNDARY:
                raise ClosureInvariantError("adjacent boundaries")
            kinds.append(kind)
            cols.append(sub)
        return SignTable(keep_polys, tuple(kinds), tuple(cols))

    def check(self, var: str | None = None) -> list[str]:
        """Violations of the well-formedness invariants (empty if none)."""
        problems = []
        n = len(self.kinds)
        if n % 2 == 0:
            problems.append("even number of columns")
        for c, kind in enumerate(self.kinds):
            expected = INTERVAL if c % 2 == 0 else BOUNDARY
            if kind != expected:
                problems.append(f"column {c} has kind {kind}, expected {expected}")
        positive = [i for i, p in enumerate(self.polys)
                    if not p.is_constant() and (var is None or p.degree(var) >= 1)]
        for c, kind in enumerate(self.kinds):
            if kind == BOUNDARY:
                if not any(self.columns[c][i] == 0 for i in positive):
                    problems.append(f"boundary column {c} has no vanishing polynomial")
                for i in range(len(self.polys)):
                    l, b, r = self.columns[c - 1][i], self.columns[c][i], self.columns[c + 1][i]
                    if b != 0 and (l != b or r != b):
                        problems.append(f"polynomial {i} changes sign at column {c} without vanishing")
            else:
                if any(self.columns[c][i] == 0 for i in positive):
                    problems.append(f"interval column {c} has a vanishing polynomial")
        return problems

    def to_machine(self) -> str:
        lines = []
        for kind, col in zip(self.kinds, self.columns):
            lines.append(kind + " " + ",".join(str(s) for s in col))
        return "\n".join(lines)

    def to_human(self) -> str:
        width = max((len(str(p)) for p in self.polys), default=1)
        header = " " * width + " | " + " ".join(k for k in self.kinds)
        body = []
        for i, p in enumerate(self.polys):
            cells = " ".join("+0-"[1 - col[i]] for col in self.columns)
            body.append(f"{str(p):>{width}} | {cells}")
        return "\n".join([header] + body)


def parse_machine_table(text: str) -> tuple[tuple[str, ...], tuple[tuple[int, ...], ...]]:
    """Parse the line-oriented machine format back into kinds and columns."""
    kinds, cols = [], []
    for line in text.strip().splitlines():
        kind, _, rest = line.strip().partition(" ")
        if kind not in (INTERVAL, BOUNDARY):
            raise ValueError(f"bad column kind {kind!r}")
        kinds.append(kind)
        cols.append(tuple(int(x) for x in rest.split(",")) if rest.strip() else ())
    return tuple(kinds), tuple(cols)


# -- incremental construction -------------------------------------------------

class _Builder:
    """Mutable table over a closure prefix; columns are lists of signs.

    ``owners[c]`` caches, for a boundary column, the lowest-index vanishing
    polynomial of positive degree (it never changes once the column exists).
    """

    def __init__(self, cl: ClosureList, oracle: SignOracle):
        self.cl = cl
        self.oracle = oracle
        self.kinds = [INTERVAL]
        self.columns: list[list[int]] = [[]]
        self.owners: list[int | None] = [None]

    def load(self, table: SignTable) -> None:
        self.kinds = list(table.kinds)
        self.columns = [list(c) for c in table.columns]
        k = len(table.polys)
        self.owners = [self._scan(c, k) if kind == BOUNDARY else None
                       for c, kind in enumerate(self.kinds)]

    def add_constant(self, k: int) -> None:
        s = self.oracle.sign(self.cl.polys[k])
        if s == 0:
            raise ClosureInvariantError("zero polynomial in closure")
        for col in self.columns:
            col.append(s)

    def _scan(self, c: int, k: int) -> int:
        degrees = self.cl.degrees
        col = self.columns[c]
        for i in range(k):
            if degrees[i] >= 1 and col[i] == 0:
                return i
        raise InconsistentSigns(f"boundary column {c} has no vanishing polynomial")

    def sign_at_boundary(self, c: int, k: int) -> int:
        i = self.owners[c]
        key = (k, i)
        if key not in self.cl.remainder:
            raise ClosureInvariantError(f"pseudoremainder of #{k} by #{i} missing from closure")
        r = self.cl.remainder[key]
        if r is None:
            return 0
        if r >= k:
            raise ClosureInvariantError("pseudoremainder sorted after its dividend")
        return self.columns[c][r]

    def extend(self, k: int) -> None:
        p = self.cl.polys[k]
        v = self.cl.var
        d = self.cl.degrees[k]
        lead = self.oracle.sign(_truncations(p, v)[0][0])
        if lead == 0:
            raise ClosureInvariantError("closure member with vanishing leading coefficient")
        at_minus = lead if d % 2 == 0 else -lead
        at_plus = lead
        kinds, columns, owners = self.kinds, self.columns, self.owners
        bsign = {c: self.sign_at_boundary(c, k)
                 for c in range(1, len(kinds), 2)}
        new_kinds: list[str] = []
        new_cols: list[list[int]] = []
        new_owners: list[int | None] = []
        last = len(kinds) - 1
        for c, kind in enumerate(kinds):
            col = columns[c]
            if kind == BOUNDARY:
                col.append(bsign[c])
                new_kinds.append(BOUNDARY)
                new_cols.append(col)
                new_owners.append(owners[c])
                continue
            left = at_minus if c == 0 else bsign[c - 1]
            right = at_plus if c == last else bsign[c + 1]
            if left * right == -1:
                root, after = col + [0], col + [right]
                col.append(left)
                new_kinds += [INTERVAL, BOUNDARY, INTERVAL]
                new_cols += [col, root, after]
                new_owners += [None, k, None]
            elif left == 0 and right == 0:
                raise InconsistentSigns("polynomial vanishes at both ends of an interval")
            else:
                col.append(left or right)
                new_cols.append(col)
                new_kinds.append(INTERVAL)
                new_owners.append(None)
        self.kinds, self.columns, self.owners = new_kinds, new_cols, new_owners

    def table(self) -> SignTable:
        return SignTable(tuple(self.cl.polys), tuple(self.kinds),
                         tuple(tuple(c) for c in self.columns))


def table_from_closure(cl: ClosureList, oracle: SignOracle = EXACT) -> SignTable:
    b = _Builder(cl, oracle)
    for k in range(len(cl)):
        if cl.degrees[k] == 0:
            b.add_constant(k)
        else:
            b.extend(k)
    return b.table()


def extend_table(table: SignTable, cl: ClosureList, k: int, oracle: SignOracle = EXACT) -> SignTable:
    """Extend a table over ``cl.polys[:k]`` by the polynomial ``cl.polys[k]``.

    Requires that the table was built from the same closure (so every needed
    derivative root is already a boundary and every needed pseudoremainder is
    an earlier row).
    """
    if len(table.polys) != k or tuple(cl.polys[:k]) != table.polys:
        raise ClosureInvariantError("table does not cover the closure prefix")
    b = _Builder(cl, oracle)
    b.load(table)
    if cl.degrees[k] == 0:
        b.add_constant(k)
    else:
        b.extend(k)
    return SignTable(tuple(cl.polys[:k + 1]), tuple(b.kinds), tuple(tuple(c) for c in b.columns))


def build_sign_table(polys: Iterable[Polynomial], var: str | None = None,
                     oracle: SignOracle = EXACT) -> tuple[ClosureList, SignTable]:
    """Closure of ``polys`` and the sign table over all of it."""
    polys = list(polys)
    if var is None:
        var = _common_var(polys)
    cl = closure(polys, var, oracle)
    return cl, table_from_closure(cl, oracle)


def input_rows(cl: ClosureList, table: SignTable, polys: Sequence[Polynomial],
               oracle: SignOracle = EXACT) -> list[tuple[int, ...]]:
    """Sign row of each input polynomial (zero polynomials give all zeros)."""
    rows = []
    for p in polys:
        e = effective(p, cl.var, oracle)
        if e is None:
            rows.append((0,) * len(table.kinds))
        else:
            rows.append(table.row(cl.index(e[0])))
    return rows


def restricted_table(polys: Sequence[Polynomial], var: str | None = None) -> SignTable:
    """Sign table of exactly the given polynomials (in the given order)."""
    cl, table = build_sign_table(polys, var)
    rows = input_rows(cl, table, polys)
    full = SignTable(tuple(polys), table.kinds, tuple(zip(*rows)) if rows else tuple(() for _ in table.kinds))
    positive = [i for i, p in enumerate(polys) if not p.is_constant()]
    # dissolve boundaries owned only by auxiliary closure members
    kinds, cols = [], []
    for kind, col in zip(full.kinds, full.columns):
        if kind == BOUNDARY and not any(col[i] == 0 for i in positive):
            continue
        if kind == INTERVAL and kinds and kinds[-1] == INTERVAL:
            continue
        kinds.append(kind)
        cols.append(col)
    return SignTable(tuple(polys), tuple(kinds), tuple(cols))


# -- formulas over sign vectors -----------------------------------------------

_REL_SIGNS = {"<": {-1}, "<=": {-1, 0}, ">": {1}, ">=": {0, 1}, "=": {0}, "!=": {-1, 1}}


def rel_signs(rel: str) -> set[int]:
    return _REL_SIGNS[rel]


def atom_polynomial(a: fm.Atom) -> Polynomial:
    return poly_from_term(a.left) - poly_from_term(a.right)


def evaluate_with(f: fm.Formula, truth: Callable[[fm.Atom], bool]) -> bool:
    if isinstance(f, fm.Atom):
        return truth(f)
    if isinstance(f, fm.Not):
        return not evaluate_with(f.arg, truth)
    if isinstance(f, fm.And):
        return all(evaluate_with(a, truth) for a in f.args)
    if isinstance(f, fm.Or):
        return any(evaluate_with(a, truth) for a in f.args)
    if isinstance(f, fm.Iff):
        return evaluate_with(f.left, truth) == evaluate_with(f.right, truth)
    raise ValueError("quantifier inside a quantifier-free matrix")


def satisfying_columns(f: fm.Formula, var: str | None = None) -> tuple[SignTable, list[bool]]:
    """Restricted sign table of the atoms of ``f`` and, per column, whether the
    matrix holds there."""
    atom_list = list(dict.fromkeys(fm.atoms(f)))
    polys = [atom_polynomial(a) for a in atom_list]
    names = set()
    for p in polys:
        names.update(p.vars)
    if var is None:
        if len(names) > 1:
            raise ValueError(f"formula is not univariate: variables {sorted(names)}")
        var = names.pop() if names else "X"
    elif names - {var}:
        raise ValueError(f"formula has variables other than {var}: {sorted(names - {var})}")
    table = restricted_table(polys, var) if polys else SignTable((), (INTERVAL,), ((),))
    where = {a: i for i, a in enumerate(atom_list)}
    verdicts = [evaluate_with(f, lambda a: col[where[a]] in _REL_SIGNS[a.rel])
                for col in table.columns]
    return table, verdicts


def decide_exists_univariate(f: fm.Formula) -> bool:
    """Truth of ``(E X) F`` with ``F`` quantifier-free in the single variable X."""
    prefix, matrix = fm.split_prefix(f)
    if any(k != "E" for k, _ in prefix) or len(prefix) > 1:
        raise ValueError("expected a sentence with a single existential quantifier")
    if not fm.is_quantifier_free(matrix):
        raise ValueError("matrix must be quantifier-free")
    var = prefix[0][1] if prefix else None
    _, verdicts = satisfying_columns(matrix, var)
    return any(verdicts)


def count_components(f: fm.Formula, var: str | None = None) -> int:
    """Number of connected components of the subset of R defined by ``f``."""
    if not fm.is_quantifier_free(f):
        raise ValueError("count_components needs a quantifier-free formula")
    _, verdicts = satisfying_columns(f, var)
    runs = 0
    prev = False
    for v in verdicts:
        if v and not prev:
            runs += 1
        prev = v
    return runs
