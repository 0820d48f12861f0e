"""Quantifier elimination by running the univariate sign-table algorithm
symbolically.

To eliminate ``(E X) F(X, Y...)`` the coefficients of every polynomial are
treated as polynomials in the remaining variables.  Whenever the univariate
engine needs the sign of such a coefficient, the computation branches three
ways (negative, zero, positive).  Each root-to-leaf path of the resulting tree
is a conjunction of sign conditions on polynomials in Y, and the leaf records
whether the univariate run found a satisfying column.  The eliminated formula
is the disjunction of the paths that end in a TRUE leaf.

The tree is explored by replay: a run under a partial set of assumptions
either finishes, or stops at the first unanswered sign question, after which
each of the three answers is explored by re-running from the start.  All the
expensive polynomial arithmetic is memoised, so replays are cheap.
"""
from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from realqe import formula as fm
from realqe.polynomials import Polynomial, poly_from_term, poly_to_term, sign
from realqe.signtable import (InconsistentSigns, closure, evaluate_with, input_rows,
                              rel_signs, table_from_closure)

DEFAULT_NODE_BUDGET = 10**5
_SIGN_REL = {-1: "<", 0: "=", 1: ">"}


class BranchBudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"branch tree exceeds {budget} nodes")
        self.budget = budget


class NeedSign(Exception):
    """Raised by a path oracle for a sign it has not been told."""

    def __init__(self, poly: Polynomial):
        super().__init__(str(poly))
        self.poly = poly


@lru_cache(maxsize=200_000)
def _canonical(p: Polynomial) -> tuple[int, Polynomial]:
    return p.canonical()


class PathOracle:
    """Answers sign queries from the assumptions on one branch.

    Polynomials are compared in canonical form, so a question about ``-2*Y``
    is answered from an assumption about ``Y``.
    """

    def __init__(self, assumptions: dict[Polynomial, int]):
        self.assumptions = assumptions

    def sign(self, p: Polynomial) -> int:
        if p.is_constant():
            return sign(p.constant_value)
        s, q = _canonical(p)
        known = self.assumptions.get(q)
        if known is None:
            raise NeedSign(q)
        return s * known


@dataclass(frozen=True)
class ConditionPath:
    """Sign assumptions in the order they were made along a branch.

    Labels are integral primitive polynomials: pseudo-division never divides,
    so no proper rational function ever needs a sign.
    """

    tests: tuple[tuple[Polynomial, int], ...] = ()

    def __len__(self) -> int:
        return len(self.tests)

    def extend(self, p: Polynomial, s: int) -> ConditionPath:
        return ConditionPath(self.tests + ((p, s),))

    def as_dict(self) -> dict[Polynomial, int]:
        return dict(self.tests)

    def formula(self) -> fm.Formula:
        return fm.conj(fm.Atom(_SIGN_REL[s], poly_to_term(p), fm.ZERO) for p, s in self.tests)


@dataclass(frozen=True)
class BranchOutcome:
    path: ConditionPath
    verdict: bool


class _Counter:
    def __init__(self, budget: int):
        self.budget = budget
        self.count = 0
        self.lock = threading.Lock()

    def tick(self) -> None:
        with self.lock:
            self.count += 1
            if self.count > self.budget:
                raise BranchBudgetExceeded(self.budget)


def explore(run: Callable[[PathOracle], bool], budget: int = DEFAULT_NODE_BUDGET,
            threads: int = 1) -> list[BranchOutcome]:
    """Enumerate the leaves of the sign-branching tree of ``run``.

    Branch order is -1, 0, +1 at every node.  With ``threads > 1`` the three
    subtrees below the root are explored concurrently and concatenated in
    that order, so the result is identical to the sequential one.
    """
    counter = _Counter(budget)

    def visit(path: ConditionPath, out: list[BranchOutcome]) -> None:
        counter.tick()
        try:
            verdict = run(PathOracle(path.as_dict()))
        except NeedSign as need:
            for s in (-1, 0, 1):
                visit(path.extend(need.poly, s), out)
            return
        out.append(BranchOutcome(path, verdict))

    root = ConditionPath()
    if threads <= 1:
        out: list[BranchOutcome] = []
        visit(root, out)
        return out

    counter.tick()
    try:
        verdict = run(PathOracle({}))
    except NeedSign as need:
        children = [root.extend(need.poly, s) for s in (-1, 0, 1)]
    else:
        return [BranchOutcome(root, verdict)]

    def subtree(path: ConditionPath) -> list[BranchOutcome]:
        part: list[BranchOutcome] = []
        visit(path, part)
        return part

    with ThreadPoolExecutor(max_workers=min(threads, 3)) as pool:
        parts = list(pool.map(subtree, children))
    return [leaf for part in parts for leaf in part]


# -- one univariate run under a branch ----------------------------------------

class _Matrix:
    """A quantifier-free matrix compiled against its distinct atom polynomials."""

    def __init__(self, f: fm.Formula):
        self.formula = f
        self.atoms = list(dict.fromkeys(fm.atoms(f)))
        self.polys: list[Polynomial] = []
        index: dict[Polynomial, int] = {}
        self.atom_slot: dict[fm.Atom, int] = {}
        for a in self.atoms:
            p = _atom_poly(a)
            if p not in index:
                index[p] = len(self.polys)
                self.polys.append(p)
            self.atom_slot[a] = index[p]

    def holds(self, signs: Sequence[int]) -> bool:
        slot = self.atom_slot
        return evaluate_with(self.formula, lambda a: signs[slot[a]] in rel_signs(a.rel))


@lru_cache(maxsize=100_000)
def _atom_poly(a: fm.Atom) -> Polynomial:
    return poly_from_term(a.left) - poly_from_term(a.right)


def _run(matrix: _Matrix, var: str, oracle: PathOracle) -> bool:
    try:
        cl = closure(matrix.polys, var, oracle)
        table = table_from_closure(cl, oracle)
    except InconsistentSigns:
        return False
    rows = input_rows(cl, table, matrix.polys, oracle)
    seen: dict[tuple[int, ...], bool] = {}
    for c in range(len(table.kinds)):
        vec = tuple(r[c] for r in rows)
        if vec not in seen:
            seen[vec] = matrix.holds(vec)
            if seen[vec]:
                return True
    return False


def eliminate_matrix(matrix: fm.Formula, var: str, budget: int = DEFAULT_NODE_BUDGET,
                     threads: int = 1) -> tuple[fm.Formula, list[BranchOutcome]]:
    """Quantifier-free equivalent of ``(E var) matrix``: the disjunction of the
    paths of all TRUE leaves, and the leaves themselves."""
    if not fm.is_quantifier_free(matrix):
        raise ValueError("matrix must be quantifier-free")
    compiled = _Matrix(matrix)
    leaves = explore(lambda oracle: _run(compiled, var, oracle), budget, threads)
    result = fm.disj(leaf.path.formula() for leaf in leaves if leaf.verdict)
    return result, leaves


Conjunction = tuple[tuple[Polynomial, frozenset], ...]


def collapse(leaves: Sequence[BranchOutcome]) -> fm.Formula:
    """Disjunction of TRUE paths with sibling subtrees of equal outcome merged.

    If the subtrees below the answers ``P < 0`` and ``P > 0`` yield the same
    formula, they are joined under ``P != 0``; if all three agree the test is
    dropped.  Each step is an exact equivalence.
    """
    dnf = _collapse_node(list(leaves), 0)
    return fm.disj(fm.conj(_make_atom(q, signs) for q, signs in c) for c in dnf)


def _collapse_node(leaves: list[BranchOutcome], depth: int) -> tuple[Conjunction, ...]:
    if len(leaves) == 1 and len(leaves[0].path) == depth:
        return ((),) if leaves[0].verdict else ()
    q = leaves[0].path.tests[depth][0]
    by_sign: dict[int, list[BranchOutcome]] = {-1: [], 0: [], 1: []}
    for leaf in leaves:
        by_sign[leaf.path.tests[depth][1]].append(leaf)
    groups: dict[tuple[Conjunction, ...], set[int]] = {}
    for s in (-1, 0, 1):
        groups.setdefault(_collapse_node(by_sign[s], depth + 1), set()).add(s)
    if len(groups) == 1:
        return next(iter(groups))
    out: list[Conjunction] = []
    for result, signs in groups.items():
        atom = (q, frozenset(signs))
        out.extend((atom,) + c for c in result)
    return tuple(out)


def _dnf(f: fm.Formula, cap: int) -> list[list[fm.Formula]] | None:
    """Disjunctive normal form of an NNF formula, or None beyond ``cap`` disjuncts."""
    if isinstance(f, fm.Or):
        out = []
        for a in f.args:
            d = _dnf(a, cap)
            if d is None:
                return None
            out.extend(d)
            if len(out) > cap:
                return None
        return out
    if isinstance(f, fm.And):
        out = [[]]
        for a in f.args:
            d = _dnf(a, cap)
            if d is None or len(out) * len(d) > cap:
                return None
            out = [x + y for x in out for y in d]
        return out
    return [[f]]


DNF_CAP = 256


def eliminate_variable(matrix: fm.Formula, var: str, budget: int = DEFAULT_NODE_BUDGET,
                       threads: int = 1) -> fm.Formula:
    """Simplified quantifier-free equivalent of ``(E var) matrix``.

    The existential is distributed over the disjuncts of the matrix and
    conjuncts not mentioning ``var`` are moved out of it before the
    sign-branching run, which keeps each run's polynomial list short.
    """
    m = simplify(matrix)
    if var not in fm.all_vars(m):
        return m
    parts = _dnf(m, DNF_CAP)
    if parts is None:
        parts = [[d] for d in _parts(m, False)]
    done: dict[fm.Formula, fm.Formula] = {}
    out = []
    for conjuncts in parts:
        free = [c for c in conjuncts if var not in fm.all_vars(c)]
        bound = fm.conj([c for c in conjuncts if var in fm.all_vars(c)])
        if bound != fm.TRUE:
            if bound not in done:
                _, leaves = eliminate_matrix(bound, var, budget, threads)
                done[bound] = simplify(collapse(leaves))
            free.append(done[bound])
        out.append(fm.conj(free))
    return simplify(fm.disj(out))


def _budget(budget: int | None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("REALQE_BUDGET_NODES")
    return int(env) if env else DEFAULT_NODE_BUDGET


def eliminate_exists(f: fm.Formula, budget: int | None = None, threads: int = 1) -> fm.Formula:
    """Eliminate the existential block of ``(E X...) F`` with ``F`` quantifier-free."""
    if not isinstance(f, fm.Quant) or f.kind != "E":
        raise ValueError("expected an existentially quantified formula")
    if not fm.is_quantifier_free(f.body):
        raise ValueError("the body must be quantifier-free")
    m = f.body
    for v in reversed(f.vars):
        m = eliminate_variable(m, v, _budget(budget), threads)
    return simplify(m)


def eliminate_all(f: fm.Formula, budget: int | None = None, threads: int = 1) -> fm.Formula:
    """Quantifier-free formula equivalent to ``f``, eliminating innermost first;
    a block ``(A X...) F`` is handled as ``~(E X...) ~F``."""
    prefix, matrix = fm.split_prefix(fm.to_prenex(f))
    nodes = _budget(budget)
    blocks: list[tuple[str, list[str]]] = []
    for kind, v in prefix:
        if blocks and blocks[-1][0] == kind:
            blocks[-1][1].append(v)
        else:
            blocks.append((kind, [v]))
    m = simplify(matrix)
    for kind, names in reversed(blocks):
        if kind == "A":
            m = simplify(fm.Not(m))
        for v in reversed(names):
            m = eliminate_variable(m, v, nodes, threads)
        if kind == "A":
            m = simplify(fm.Not(m))
    return m


def decide_sentence(f: fm.Formula, budget: int | None = None, threads: int = 1) -> bool:
    free = fm.free_vars(f)
    if free:
        raise ValueError(f"not a sentence: free variables {list(free)}")
    return fm.eval_qfree(eliminate_all(f, budget, threads), {})


# -- simplification -----------------------------------------------------------

_ALL_SIGNS = frozenset((-1, 0, 1))
_SIGNS_REL = {frozenset(rel_signs(r)): r for r in fm.RELATIONS}


@lru_cache(maxsize=100_000)
def _atom_info(a: fm.Atom) -> tuple[Polynomial, frozenset] | bool:
    """Canonical polynomial and allowed sign set of ``a``, or its truth value
    when it is variable-free."""
    p = _atom_poly(a)
    if p.is_constant():
        return sign(p.constant_value) in rel_signs(a.rel)
    s, q = _canonical(p)
    allowed = frozenset(rel_signs(a.rel))
    if s < 0:
        allowed = frozenset(-x for x in allowed)
    return q, allowed


def _make_atom(q: Polynomial, allowed: frozenset) -> fm.Formula:
    if not allowed:
        return fm.FALSE
    if allowed == _ALL_SIGNS:
        return fm.TRUE
    return fm.Atom(_SIGNS_REL[allowed], poly_to_term(q), fm.ZERO)


def _canonical_atom(a: fm.Atom, negate: bool) -> fm.Formula:
    info = _atom_info(a)
    if isinstance(info, bool):
        return fm.TRUE if info != negate else fm.FALSE
    q, allowed = info
    if negate:
        allowed = _ALL_SIGNS - allowed
    return _make_atom(q, allowed)


def _nnf(f: fm.Formula, negate: bool = False) -> fm.Formula:
    if isinstance(f, fm.Atom):
        return _canonical_atom(f, negate)
    if isinstance(f, fm.Not):
        return _nnf(f.arg, not negate)
    if isinstance(f, (fm.And, fm.Or)):
        args = [_nnf(a, negate) for a in f.args]
        is_and = isinstance(f, fm.And) != negate
        return _junction(is_and, args)
    if isinstance(f, fm.Iff):
        a, b = f.left, f.right
        if negate:
            return _junction(False, [_junction(True, [_nnf(a), _nnf(b, True)]),
                                     _junction(True, [_nnf(a, True), _nnf(b)])])
        return _junction(False, [_junction(True, [_nnf(a), _nnf(b)]),
                                 _junction(True, [_nnf(a, True), _nnf(b, True)])])
    raise ValueError("simplify needs a quantifier-free formula")


def _parts(f: fm.Formula, is_and: bool) -> tuple[fm.Formula, ...]:
    cls = fm.And if is_and else fm.Or
    return f.args if isinstance(f, cls) else (f,)


def _junction(is_and: bool, args: list[fm.Formula]) -> fm.Formula:
    """Flatten, fold constants, merge atoms on a common polynomial, remove
    duplicates and absorbed operands."""
    unit, zero = (fm.TRUE, fm.FALSE) if is_and else (fm.FALSE, fm.TRUE)
    flat: list[fm.Formula] = []
    for a in args:
        flat.extend(_parts(a, is_and))
    merged: dict[object, object] = {}
    for a in flat:
        if a == unit:
            continue
        if a == zero:
            return zero
        info = _atom_info(a) if isinstance(a, fm.Atom) else None
        if isinstance(info, tuple):
            q, allowed = info
            key = ("atom", q)
            if key in merged:
                old = merged[key]
                allowed = old & allowed if is_and else old | allowed
            merged[key] = allowed
        else:
            merged.setdefault(("node", a), None)
    out: list[fm.Formula] = []
    for (tag, x), allowed in merged.items():
        item = _make_atom(x, allowed) if tag == "atom" else x
        if item == zero:
            return zero
        if item != unit:
            out.append(item)
    out = _absorb(is_and, out)
    if not is_and:
        out = _resolve(out)
    return (fm.conj if is_and else fm.disj)(out)


def _absorb(is_and: bool, items: list[fm.Formula]) -> list[fm.Formula]:
    """Drop ``b`` when another operand's inner parts are a subset of ``b``'s
    (``a or (a and c)`` is ``a``)."""
    if len(items) < 2:
        return items
    inner = [frozenset(_parts(x, not is_and)) for x in items]
    keep = []
    for i, s in enumerate(inner):
        absorbed = any(j != i and inner[j] < s for j in range(len(items)))
        if not absorbed:
            keep.append(items[i])
    return keep


def _resolve(disjuncts: list[fm.Formula]) -> list[fm.Formula]:
    """Merge two conjunctions that differ only in the sign set of one atom,
    e.g. ``(P < 0 /\\ C) \\/ (P = 0 /\\ C)`` into ``P <= 0 /\\ C``."""
    items = list(disjuncts)
    while len(items) > 1:
        found = _resolvable_pair(items)
        if found is None:
            break
        j, i, merged = found
        items = items[:j] + [merged] + items[j + 1:i] + items[i + 1:]
    return items


def _resolvable_pair(items: list[fm.Formula]):
    seen: dict[tuple, tuple[int, frozenset, tuple]] = {}
    for i, d in enumerate(items):
        parts = _parts(d, True)
        for k, a in enumerate(parts):
            info = _atom_info(a) if isinstance(a, fm.Atom) else None
            if not isinstance(info, tuple):
                continue
            rest = parts[:k] + parts[k + 1:]
            key = (frozenset(rest), info[0])
            if key in seen:
                j, allowed, rest_j = seen[key]
                merged = _junction(True, [_make_atom(info[0], allowed | info[1]), *rest_j])
                return j, i, merged
            seen[key] = (i, info[1], rest)
    return None


def simplify(f: fm.Formula) -> fm.Formula:
    """Sound local simplification to a fixpoint (so it is idempotent).

    The result is in negation normal form with atoms written ``P rel 0``,
    ``P`` integral, primitive, with a positive leading coefficient.
    """
    if not fm.is_quantifier_free(f):
        raise ValueError("simplify needs a quantifier-free formula")
    while True:
        g = _nnf(f)
        if g == f:
            return g
        f = g
