"""Compilers between existential problems over the reals.

* ``to_feasible``: an existential formula becomes one polynomial equation
  ``p = 0`` by introducing a value variable per arithmetic subterm and a
  0/1 truth variable per Boolean subformula (Tseitin style).
* ``to_strictineq``: ``p = 0`` becomes a system of strict inequalities that
  bounds the search to a huge ball and asks for ``|p|`` to be tiny.
* ``encode_seg``: a graph becomes the sentence asking for a representation as
  an intersection graph of segments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from realqe import formula as fm
from realqe.polynomials import Polynomial, poly_from_term, poly_sum, poly_to_term

P = Polynomial


def _v(name: str) -> Polynomial:
    return Polynomial.var(name)


ONE = Polynomial.const(1)
INLINE_LIMIT = 64


# -- FEASIBLE -----------------------------------------------------------------

@dataclass(frozen=True)
class FeasibleInstance:
    """Asks whether ``poly`` has a real zero.

    ``squared`` lists auxiliary variables that occur only with even exponents;
    :meth:`lift` reports the *square* of their value, which keeps witnesses
    rational.
    """

    variables: tuple[str, ...]
    poly: Polynomial
    original: tuple[str, ...] = ()
    squared: frozenset = frozenset()
    equations: tuple[Polynomial, ...] = ()
    _lifter: object = field(default=None, compare=False, repr=False)

    def to_formula(self) -> fm.Formula:
        body = fm.Atom("=", poly_to_term(self.poly), fm.ZERO)
        return fm.Quant("E", self.variables, body) if self.variables else body

    def lift(self, assignment: Mapping[str, Fraction | int]) -> dict[str, Fraction]:
        """Values of all variables extending ``assignment`` of the original ones.

        When the original formula holds at ``assignment`` the lifted point is a
        zero of ``poly`` (see :meth:`value_at`); for squared variables the
        returned number is the square of the variable.
        """
        return self._lifter(assignment)

    def value_at(self, lifted: Mapping[str, Fraction]) -> Fraction:
        """``poly`` evaluated at a lifted point (squared variables given by squares)."""
        total = Fraction(0)
        for e, c in self.poly.terms.items():
            term = Fraction(c)
            for v, k in zip(self.poly.vars, e):
                if v in self.squared:
                    if k % 2:
                        raise ValueError(f"{v} occurs with odd exponent")
                    term *= Fraction(lifted[v]) ** (k // 2)
                else:
                    term *= Fraction(lifted[v]) ** k
            total += term
        return total


class _Tseitin:
    def __init__(self, taken: Iterable[str], peephole: bool):
        self.taken = set(taken)
        self.peephole = peephole
        self.counter = 0
        self.equations: list[Polynomial] = []
        self.new_vars: list[str] = []
        self.squared: set[str] = set()
        self.term_memo: dict[fm.Term, Polynomial] = {}
        # lifting recipe: callables run in creation order on a value dict
        self.steps: list = []

    def fresh(self, prefix: str, squared: bool = False) -> str:
        while True:
            self.counter += 1
            name = f"{prefix}#{self.counter}"
            if name not in self.taken:
                break
        self.taken.add(name)
        self.new_vars.append(name)
        if squared:
            self.squared.add(name)
        return name

    # arithmetic subterms
    def value(self, t: fm.Term) -> Polynomial:
        c = fm.constant_value(t)
        if c is not None:
            return Polynomial.const(c)
        if isinstance(t, fm.Var):
            return _v(t.name)
        if t in self.term_memo:
            return self.term_memo[t]
        a, b = self.value(t.left), self.value(t.right)
        if t.op == "+":
            rhs = a + b
        elif t.op == "-":
            rhs = a - b
        else:
            rhs = a * b
        name = self.fresh("V")
        self.equations.append(_v(name) - rhs)
        self.steps.append(lambda env, n=name, r=rhs: env.__setitem__(n, r.evaluate(env)))
        out = _v(name)
        self.term_memo[t] = out
        return out

    def atom_value(self, a: fm.Atom, inline: bool) -> Polynomial:
        if inline and self.peephole:
            size = fm.formula_length(a.left) + fm.formula_length(a.right)
            if size <= INLINE_LIMIT:
                # short atoms whose expansion stays within twice the source skip the V variables
                p = poly_from_term(a.left) - poly_from_term(a.right)
                if p.is_integral() and fm.formula_length(poly_to_term(p)) <= 2 * size:
                    return p
        if a.right == fm.ZERO:
            return self.value(a.left)
        if a.left == fm.ZERO:
            return -self.value(a.right)
        return self.value(fm.BinOp("-", a.left, a.right))

    def atom_branches(self, a: fm.Atom, inline: bool = False):
        """Equations that force the atom true / false, with their witnesses.

        Only atoms used once (``inline``) may expand in place; under a truth
        variable the atom's polynomial would be raised to the eighth power.
        """
        e = self.atom_value(a, inline)
        rel = a.rel
        if rel in ("=", "!="):
            s = self.fresh("S", squared=True)
            nonzero = e * e * _v(s) ** 2 - 1
            def wit_nonzero(env, e=e, s=s):
                val = e.evaluate(env)
                env[s] = 1 / (val * val) if val else Fraction(0)
            zero = e
            def wit_zero(env, s=s):
                env.setdefault(s, Fraction(0))
            if rel == "=":
                return (zero, wit_zero), (nonzero, wit_nonzero), (s,)
            return (nonzero, wit_nonzero), (zero, wit_zero), (s,)
        g = e if rel in (">", "<=") else -e
        s = self.fresh("S", squared=True)
        t = self.fresh("T", squared=True)
        positive = g * _v(s) ** 2 - 1
        nonpositive = g + _v(t) ** 2
        def wit_pos(env, g=g, s=s, t=t):
            val = g.evaluate(env)
            env[s] = 1 / val if val > 0 else Fraction(0)
            env.setdefault(t, Fraction(0))
        def wit_nonpos(env, g=g, s=s, t=t):
            val = g.evaluate(env)
            env[t] = -val if val <= 0 else Fraction(0)
            env.setdefault(s, Fraction(0))
        if rel in (">", "<"):
            return (positive, wit_pos), (nonpositive, wit_nonpos), (s, t)
        return (nonpositive, wit_nonpos), (positive, wit_pos), (s, t)

    # Boolean subformulas: return the truth variable
    def truth(self, f: fm.Formula) -> Polynomial:
        if isinstance(f, fm.Atom):
            (on, wit_on), (off, wit_off), _ = self.atom_branches(f)
            w = self.fresh("W")
            W = _v(w)
            self.equations.append((on * on + (W - 1) ** 2) * (off * off + W * W))
            def step(env, f=f, w=w, wit_on=wit_on, wit_off=wit_off):
                holds = _atom_holds(f, env)
                env[w] = Fraction(int(holds))
                (wit_on if holds else wit_off)(env)
            self.steps.append(step)
            return W
        if isinstance(f, fm.Not):
            inner = self.truth(f.arg)
            return self._define(ONE - inner)
        if isinstance(f, fm.And):
            acc = self.truth(f.args[0])
            for a in f.args[1:]:
                acc = self._define(acc * self.truth(a))
            return acc
        if isinstance(f, fm.Or):
            acc = self.truth(f.args[0])
            for a in f.args[1:]:
                b = self.truth(a)
                w = self.fresh("W")
                W = _v(w)
                self.equations.append(
                    ((W - 1) ** 2 + ((acc - 1) * (b - 1)) ** 2) * (W * W + acc * acc + b * b))
                self.steps.append(lambda env, w=w, x=acc, y=b:
                                  env.__setitem__(w, max(x.evaluate(env), y.evaluate(env))))
                acc = W
            return acc
        if isinstance(f, fm.Iff):
            a, b = self.truth(f.left), self.truth(f.right)
            return self._define(ONE - (a - b) ** 2)
        raise ValueError("quantifier inside the matrix")

    def _define(self, rhs: Polynomial) -> Polynomial:
        w = self.fresh("W")
        self.equations.append(_v(w) - rhs)
        self.steps.append(lambda env, n=w, r=rhs: env.__setitem__(n, r.evaluate(env)))
        return _v(w)

    def direct(self, a: fm.Atom) -> None:
        """A top-level atom needs no truth variable: force it directly."""
        (on, wit_on), _, _ = self.atom_branches(a, inline=True)
        self.equations.append(on)
        self.steps.append(wit_on)


def _atom_holds(a: fm.Atom, env: Mapping[str, Fraction]) -> bool:
    return fm.compare(a.rel, fm.eval_term(a.left, env), fm.eval_term(a.right, env))


def to_feasible(f: fm.Formula, peephole: bool = True) -> FeasibleInstance:
    """Single equation, solvable iff the existential formula ``f`` is satisfiable.

    Free variables of ``f`` are treated as existentially quantified.  With
    ``peephole`` the atoms of a top-level conjunction are turned into equations
    directly instead of going through truth variables.
    """
    prefix, matrix = fm.split_prefix(fm.to_prenex(f))
    if any(kind != "E" for kind, _ in prefix):
        raise ValueError("to_feasible needs an existential formula")
    original = tuple(dict.fromkeys(list(fm.free_vars(f)) + [v for _, v in prefix]))
    ts = _Tseitin(fm.all_vars(matrix) | set(original), peephole)
    conjuncts = list(matrix.args) if isinstance(matrix, fm.And) else [matrix]
    if peephole:
        rest = []
        for c in conjuncts:
            if isinstance(c, fm.Atom):
                ts.direct(c)
            else:
                rest.append(c)
        if rest:
            top = ts.truth(fm.conj(rest))
            ts.equations.append(top - 1)
    else:
        top = ts.truth(matrix)
        ts.equations.append(top - 1)
    eqs = [e for e in ts.equations if not e.is_zero()]
    if len(eqs) == 1:
        poly = eqs[0]
    else:
        poly = poly_sum(e * e for e in eqs)
    poly = _integral(poly)
    steps = list(ts.steps)

    def lifter(assignment):
        env = {k: Fraction(v) for k, v in assignment.items()}
        for v in original:
            env.setdefault(v, Fraction(0))
        for step in steps:
            step(env)
        return env

    used = set(poly.vars)
    variables = original + tuple(v for v in ts.new_vars if v in used)
    return FeasibleInstance(variables, poly, original, frozenset(ts.squared & used),
                            tuple(eqs), lifter)


def _integral(p: Polynomial) -> Polynomial:
    if p.is_zero() or p.is_integral():
        return p
    den = math.lcm(*(c.denominator for c in p.terms.values()))
    return p.scale(den)


# -- STRICTINEQ ---------------------------------------------------------------

@dataclass(frozen=True)
class StrictIneqInstance:
    """Asks whether all ``polys`` can be made positive at once."""

    variables: tuple[str, ...]
    polys: tuple[Polynomial, ...]

    def to_formula(self) -> fm.Formula:
        body = fm.conj(fm.Atom(">", poly_to_term(q), fm.ZERO) for q in self.polys)
        return fm.Quant("E", self.variables, body) if self.variables else body

    def holds_at(self, assignment: Mapping[str, Fraction | int]) -> bool:
        return all(q.evaluate(assignment) > 0 for q in self.polys)


def instance_length(inst: FeasibleInstance) -> int:
    return fm.formula_length(inst.to_formula())


def default_chain_lengths(length: int, C: float = 1.0, C1: float = 1.0) -> tuple[int, int]:
    """``k = ceil(C L log2 L)`` and ``l = ceil(C1 L (log2 L)^2)``, each at least 1."""
    lg = math.log2(length) if length > 1 else 1.0
    k = max(1, math.ceil(C * length * lg))
    l = max(1, math.ceil(C1 * length * lg * lg))
    return k, l


def to_strictineq(inst: FeasibleInstance, k: int | None = None, l: int | None = None,
                  C: float = 1.0, C1: float = 1.0) -> StrictIneqInstance:
    """Strict-inequality system for ``inst``.

    The ``Y`` chain squares its way up to a radius bound ``2^(2^k)`` on the
    original variables, the ``Z`` chain up to ``2^(2^l)``, and the last
    inequality asks for ``|p| < 2^(-2^l)``.  Whether these chain lengths are
    large enough for an exact transfer of solvability depends on constants
    that are not known explicitly; ``C`` and ``C1`` scale the defaults.
    """
    if k is None or l is None:
        dk, dl = default_chain_lengths(instance_length(inst), C, C1)
        k = dk if k is None else k
        l = dl if l is None else l
    if k < 1 or l < 1:
        raise ValueError("chain lengths must be at least 1")
    taken = set(inst.variables)

    def names(prefix: str, count: int) -> list[str]:
        out, i = [], 0
        while len(out) < count:
            i += 1
            n = f"{prefix}{i}"
            if n not in taken:
                out.append(n)
        return out

    ys = names("Y#", k)
    zs = names("Z#", l)
    Y = [_v(y) for y in ys]
    Z = [_v(z) for z in zs]
    polys: list[Polynomial] = list(Y)
    polys.append(Polynomial.const(4) - Y[0])
    for i in range(k - 1):
        polys.append(Y[i] * Y[i] - Y[i + 1])
    radius = Y[-1] * Y[-1]
    for x in inst.variables:
        radius = radius - _v(x) * _v(x)
    polys.append(radius)
    polys.append(Z[0] - 4)
    for i in range(l - 1):
        polys.append(Z[i + 1] - Z[i] * Z[i])
    polys.append(ONE - Z[-1] * Z[-1] * inst.poly * inst.poly)
    return StrictIneqInstance(tuple(inst.variables) + tuple(ys) + tuple(zs), tuple(polys))


# -- segment graphs -----------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        norm = set()
        for e in self.edges:
            i, j = tuple(e)
            if i == j:
                raise ValueError(f"loop at vertex {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge {i}-{j} outside 1..{self.n}")
            norm.add(frozenset((i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> Graph:
        return cls(n, frozenset(frozenset(p) for p in pairs))

    def has_edge(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.edges


def parse_graph(text: str) -> Graph:
    """``n m`` on the first line, then ``m`` lines ``i j`` (1-based)."""
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("first line must be 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != m:
        raise ValueError(f"expected {m} edge lines, found {len(rows) - 1}")
    pairs = []
    for r in rows[1:]:
        if len(r) != 2:
            raise ValueError(f"bad edge line: {' '.join(r)}")
        pairs.append((int(r[0]), int(r[1])))
    return Graph.from_pairs(n, pairs)


def _term(text: str) -> fm.Term:
    return fm.parse_term(text)


def seg_vars(i: int) -> tuple[str, str, str, str]:
    return (f"A{i}", f"B{i}", f"C{i}", f"D{i}")


def ints_predicate(i: int, j: int) -> fm.Formula:
    """Segments ``i`` and ``j`` intersect, where segment ``k`` is the part of
    ``y = A_k x + B_k`` over ``C_k <= x <= D_k``.  Only meaningful together
    with ``C_k <= D_k``."""
    if i == j:
        raise ValueError("INTS needs two distinct segments")
    ai, bi, ci, di = seg_vars(i)
    aj, bj, cj, dj = seg_vars(j)
    slope = f"({ai} - {aj})"
    gap = f"{bj} - {bi}"
    same_line = (f"{ai} = {aj} /\\ {bi} = {bj} /\\ ~({di} < {cj} \\/ {dj} < {ci})")

    def window(rel_low: str, rel_high: str) -> str:
        return (f"{ci}*{slope} {rel_low} {gap} /\\ {gap} {rel_low} {di}*{slope}"
                f" /\\ {cj}*{slope} {rel_low} {gap} /\\ {gap} {rel_low} {dj}*{slope}")

    text = (f"({same_line}) \\/ ({ai} > {aj} /\\ {window('<=', '<=')})"
            f" \\/ ({ai} < {aj} /\\ {window('>=', '>=')})")
    return fm.parse(text)


def encode_seg(g: Graph) -> fm.Formula:
    """Existential sentence stating that ``g`` is an intersection graph of segments."""
    parts = [fm.parse(f"C{i} <= D{i}") for i in range(1, g.n + 1)]
    for i in range(1, g.n + 1):
        for j in range(i + 1, g.n + 1):
            ints = ints_predicate(i, j)
            parts.append(ints if g.has_edge(i, j) else fm.Not(ints))
    names = [v for i in range(1, g.n + 1) for v in seg_vars(i)]
    body = fm.conj(parts)
    return fm.Quant("E", names, body) if names else body


def feasible_instance(f: fm.Formula, peephole: bool = True) -> FeasibleInstance:
    """Read ``(E X...)(t1 = t2)`` directly as the equation ``t1 - t2 = 0``;
    any other existential formula goes through :func:`to_feasible`."""
    prefix, matrix = fm.split_prefix(fm.to_prenex(f))
    if isinstance(matrix, fm.Atom) and matrix.rel == "=" and all(k == "E" for k, _ in prefix):

        p = _integral(poly_from_term(matrix.left) - poly_from_term(matrix.right))
        names = tuple(dict.fromkeys(list(fm.free_vars(f)) + [v for _, v in prefix]))
        return FeasibleInstance(names, p, names)
    return to_feasible(f, peephole)
