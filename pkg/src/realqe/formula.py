"""Formulas of the first-order theory of the reals.

The concrete syntax is ASCII::

    (E X Y)(X*X + Y*Y = 1 /\ ~(X < 0))

Quantifier blocks are ``(E vars)`` / ``(A vars)``; connectives are ``~``,
``/\\``, ``\\/`` and ``<=>`` (tightest first); terms use ``+ - *``, variables
and decimal integer literals.  Literals are desugared at parse time into
binary-expansion trees built from the constants 0 and 1, so ``13`` becomes
``((1+1)+1)*(1+1)*(1+1)+1``.  There is no power operator and no division.

Nodes are immutable.  Hashes are computed once at construction, and equality
walks the tree with an explicit stack, so long left-leaning sums produced by
polynomial conversion never hit the recursion limit.
"""
from __future__ import annotations

import re
from fractions import Fraction
from itertools import count
from typing import Iterable, Iterator, Mapping, Union

from realqe.polynomials import MissingVariableError

ARITH_OPS = ("+", "-", "*")
RELATIONS = ("<", "<=", ">", ">=", "=", "!=")

NEGATED_REL = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "=": "!=", "!=": "="}
FLIPPED_REL = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "!=": "!="}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


# -- AST ----------------------------------------------------------------------

class Node:
    __slots__ = ("_h",)

    def children(self) -> tuple:
        return ()

    def _label(self) -> tuple:
        return ()

    def __hash__(self) -> int:
        return self._h

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Node):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is not type(b) or a._h != b._h or a._label() != b._label():
                return False
            ca, cb = a.children(), b.children()
            if len(ca) != len(cb):
                return False
            stack.extend(zip(ca, cb))
        return True

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self) -> str:
        return f"{type(self).__name__}({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)


class Term(Node):
    __slots__ = ()


class Formula(Node):
    __slots__ = ()


class Const(Term):
    __slots__ = ("value",)

    def __init__(self, value: int):
        if value not in (0, 1):
            raise ValueError("only the constants 0 and 1 are primitive; use int_term()")
        self.value = value
        self._h = hash(("c", value))

    def _label(self):
        return (self.value,)


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._h = hash(("v", name))

    def _label(self):
        return (self.name,)


class BinOp(Term):
    __slots__ = ("op", "left", "right")

    def __init__(self, op: str, left: Term, right: Term):
        if op not in ARITH_OPS:
            raise ValueError(f"unknown arithmetic operator {op!r}")
        if not isinstance(left, Term) or not isinstance(right, Term):
            raise TypeError("arithmetic operands must be terms")
        self.op, self.left, self.right = op, left, right
        self._h = hash((op, left._h, right._h))

    def children(self):
        return (self.left, self.right)

    def _label(self):
        return (self.op,)


class Atom(Formula):
    __slots__ = ("rel", "left", "right")

    def __init__(self, rel: str, left: Term, right: Term):
        if rel not in RELATIONS:
            raise ValueError(f"unknown relation {rel!r}")
        if not isinstance(left, Term) or not isinstance(right, Term):
            raise TypeError("relation operands must be terms")
        self.rel, self.left, self.right = rel, left, right
        self._h = hash((rel, left._h, right._h))

    def children(self):
        return (self.left, self.right)

    def _label(self):
        return (self.rel,)


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Formula):
        _need_formula(arg)
        self.arg = arg
        self._h = hash(("~", arg._h))

    def children(self):
        return (self.arg,)


class _NAry(Formula):
    __slots__ = ("args",)
    symbol = ""

    def __init__(self, *args: Formula):
        if len(args) == 1 and isinstance(args[0], (list, tuple)):
            args = tuple(args[0])
        if len(args) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two operands")
        for a in args:
            _need_formula(a)
        self.args = tuple(args)
        self._h = hash((self.symbol, tuple(a._h for a in self.args)))

    def children(self):
        return self.args


class And(_NAry):
    __slots__ = ()
    symbol = "/\\"


class Or(_NAry):
    __slots__ = ()
    symbol = "\\/"


class Iff(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        _need_formula(left)
        _need_formula(right)
        self.left, self.right = left, right
        self._h = hash(("<=>", left._h, right._h))

    def children(self):
        return (self.left, self.right)


class Quant(Formula):
    __slots__ = ("kind", "vars", "body")

    def __init__(self, kind: str, vars: Iterable[str], body: Formula):
        if kind not in ("E", "A"):
            raise ValueError("quantifier kind must be 'E' or 'A'")
        vars = tuple(vars)
        if not vars:
            raise ValueError("a quantifier must bind at least one variable")
        _need_formula(body)
        self.kind, self.vars, self.body = kind, vars, body
        self._h = hash((kind, vars, body._h))

    def children(self):
        return (self.body,)

    def _label(self):
        return (self.kind, self.vars)


def _need_formula(x: object) -> None:
    if not isinstance(x, Formula):
        raise TypeError(f"expected a formula, got {type(x).__name__}")


ZERO = Const(0)
ONE = Const(1)
TRUE = Atom("=", ZERO, ZERO)
FALSE = Atom("=", ZERO, ONE)

AnyNode = Union[Term, Formula]


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(parts)


def int_term(k: int) -> Term:
    """Binary-expansion term for the integer ``k`` (Horner scheme on the bits)."""
    if k < 0:
        return BinOp("-", ZERO, int_term(-k))
    if k < 2:
        return Const(k)
    two = BinOp("+", ONE, ONE)
    bits = bin(k)[3:]
    acc: Term = ONE
    for b in bits:
        acc = two if acc is ONE else BinOp("*", acc, two)
        if b == "1":
            acc = BinOp("+", acc, ONE)
    return acc


def sum_spine(t: Term) -> list[tuple[int, Term]]:
    """Flatten the left spine of ``+``/``-`` into signed operands, iteratively."""
    out = []
    while isinstance(t, BinOp) and t.op in "+-":
        out.append((1 if t.op == "+" else -1, t.right))
        t = t.left
    out.append((1, t))
    out.reverse()
    return out


def constant_value(t: Term) -> int | None:
    """Integer value of a variable-free term, or None if it has variables."""
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Var):
        return None
    if t.op == "*":
        a = constant_value(t.left)
        if a is None:
            return None
        b = constant_value(t.right)
        return None if b is None else a * b
    total = 0
    for s, x in sum_spine(t):
        v = constant_value(x)
        if v is None:
            return None
        total += s * v
    return total


# -- tokenizer and parser -----------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><=>|<=|>=|!=|/\\|\\/|[<>=~()+*-])
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_#']*)
""", re.VERBOSE)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        else:
            nl = m.group().count("\n")
            if nl:
                line += nl
                line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        return ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            raise self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.take()

    def at_quantifier(self) -> bool:
        if self.peek().text != "(" or self.peek(1).text not in ("E", "A") or self.peek(1).kind != "ident":
            return False
        k = 2
        while self.peek(k).kind == "ident":
            k += 1
        return k > 2 and self.peek(k).text == ")"

    def formula(self) -> Formula:
        tok = self.peek()
        node = self.iff()
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r}")
        if not isinstance(node, Formula):
            raise self.error("expected a formula, found a term", tok)
        return node

    def _as_formula(self, node: AnyNode, tok: _Tok) -> Formula:
        if not isinstance(node, Formula):
            raise self.error("expected a formula, found a term", tok)
        return node

    def _as_term(self, node: AnyNode, tok: _Tok) -> Term:
        if not isinstance(node, Term):
            raise self.error("expected a term, found a formula", tok)
        return node

    def iff(self) -> AnyNode:
        tok = self.peek()
        left = self.disjunction()
        while self.peek().text == "<=>":
            self.take()
            rtok = self.peek()
            right = self.disjunction()
            left = Iff(self._as_formula(left, tok), self._as_formula(right, rtok))
        return left

    def _nary(self, symbol: str, sub, cls) -> AnyNode:
        tok = self.peek()
        first = sub()
        if self.peek().text != symbol:
            return first
        parts = [self._as_formula(first, tok)]
        while self.peek().text == symbol:
            self.take()
            t = self.peek()
            parts.append(self._as_formula(sub(), t))
        return cls(parts)

    def disjunction(self) -> AnyNode:
        return self._nary("\\/", self.conjunction, Or)

    def conjunction(self) -> AnyNode:
        return self._nary("/\\", self.unary, And)

    def unary(self) -> AnyNode:
        t = self.peek()
        if t.text == "~":
            self.take()
            arg_tok = self.peek()
            return Not(self._as_formula(self.unary(), arg_tok))
        if self.at_quantifier():
            self.take()
            kind = self.take().text
            names = []
            while self.peek().kind == "ident":
                names.append(self.take().text)
            self.expect(")")
            body_tok = self.peek()
            return Quant(kind, names, self._as_formula(self.iff(), body_tok))
        return self.relation()

    def relation(self) -> AnyNode:
        tok = self.peek()
        left = self.sum()
        if self.peek().text in RELATIONS:
            rel = self.take().text
            rtok = self.peek()
            right = self.sum()
            return Atom(rel, self._as_term(left, tok), self._as_term(right, rtok))
        return left

    def sum(self) -> AnyNode:
        tok = self.peek()
        left = self.product()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rtok = self.peek()
            right = self.product()
            left = BinOp(op, self._as_term(left, tok), self._as_term(right, rtok))
        return left

    def product(self) -> AnyNode:
        tok = self.peek()
        left = self.primary()
        while self.peek().text == "*":
            self.take()
            rtok = self.peek()
            right = self.primary()
            left = BinOp("*", self._as_term(left, tok), self._as_term(right, rtok))
        return left

    def primary(self) -> AnyNode:
        t = self.peek()
        if t.text == "(" and not self.at_quantifier():
            self.take()
            inner = self.iff()
            self.expect(")")
            return inner
        if self.at_quantifier():
            # a quantified formula inside a term position is a sort error
            raise self.error("quantifier not allowed here; parenthesize the quantified formula")
        if t.kind == "int":
            self.take()
            return int_term(int(t.text))
        if t.kind == "ident":
            self.take()
            return Var(t.text)
        raise self.error(f"unexpected {t.text or 'end of input'!r}")


def parse(text: str) -> Formula:
    """Parse a formula; raises :class:`ParseError` with line and column."""
    return _Parser(text).formula()


def parse_term(text: str) -> Term:
    p = _Parser(text)
    tok = p.peek()
    node = p.sum()
    if p.peek().kind != "eof":
        raise p.error(f"unexpected {p.peek().text!r}")
    return p._as_term(node, tok)


# -- printing -----------------------------------------------------------------

def _term_text(t: Term, fold: bool) -> str:
    if fold:
        v = constant_value(t)
        if v is not None:
            return str(v) if v >= 0 else f"0 - {-v}"
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if t.op == "*":
        return f"{_factor_text(t.left, fold, left=True)}*{_factor_text(t.right, fold, left=False)}"
    parts = sum_spine(t)
    out = [_summand_text(parts[0][1], fold, first=True)]
    for s, x in parts[1:]:
        out.append(f" {'+' if s > 0 else '-'} {_summand_text(x, fold, first=False)}")
    return "".join(out)


def _is_sum(t: Term, fold: bool) -> bool:
    if fold:
        v = constant_value(t)
        if v is not None:
            return v < 0
    return isinstance(t, BinOp) and t.op in "+-"


def _summand_text(t: Term, fold: bool, first: bool) -> str:
    s = _term_text(t, fold)
    return f"({s})" if not first and _is_sum(t, fold) else s


def _factor_text(t: Term, fold: bool, left: bool) -> str:
    s = _term_text(t, fold)
    if _is_sum(t, fold):
        return f"({s})"
    folded = fold and constant_value(t) is not None
    if not left and not folded and isinstance(t, BinOp) and t.op == "*":
        return f"({s})"
    return s


_PREC = {Iff: 0, Or: 1, And: 2, Not: 3, Atom: 4}


def _formula_text(f: Formula, fold: bool) -> str:
    if isinstance(f, Atom):
        return f"{_term_text(f.left, fold)} {f.rel} {_term_text(f.right, fold)}"
    if isinstance(f, Not):
        return "~" + _wrap(f.arg, 3, fold, strict=False)
    if isinstance(f, _NAry):
        p = _PREC[type(f)]
        return f" {f.symbol} ".join(_wrap(a, p, fold, strict=True) for a in f.args)
    if isinstance(f, Iff):
        return f"{_wrap(f.left, 0, fold, strict=True)} <=> {_wrap(f.right, 0, fold, strict=True)}"
    if isinstance(f, Quant):
        head = f"({f.kind} {' '.join(f.vars)})"
        if isinstance(f.body, Quant):
            return head + _formula_text(f.body, fold)
        return f"{head}({_formula_text(f.body, fold)})"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula, parent_prec: int, fold: bool, strict: bool) -> str:
    s = _formula_text(f, fold)
    if isinstance(f, Quant):
        return f"({s})"
    p = _PREC[type(f)]
    if p < parent_prec or (strict and p == parent_prec):
        return f"({s})"
    return s


def to_text(f: AnyNode, fold_constants: bool = True) -> str:
    """Render a formula or term.  Variable-free subterms are printed as decimal
    integers unless ``fold_constants`` is False."""
    if isinstance(f, Term):
        return _term_text(f, fold_constants)
    return _formula_text(f, fold_constants)


print_formula = to_text


# -- generic rebuilding -------------------------------------------------------

def map_terms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` applying ``fn`` to every atom, which must return a formula."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return Not(map_terms(f.arg, fn))
    if isinstance(f, _NAry):
        return type(f)([map_terms(a, fn) for a in f.args])
    if isinstance(f, Iff):
        return Iff(map_terms(f.left, fn), map_terms(f.right, fn))
    if isinstance(f, Quant):
        return Quant(f.kind, f.vars, map_terms(f.body, fn))
    raise TypeError(f"not a formula: {f!r}")


def normalize_term(t: Term) -> Term:
    v = constant_value(t)
    if v is not None:
        return int_term(v)
    if isinstance(t, Var):
        return t
    if t.op == "*":
        return BinOp("*", normalize_term(t.left), normalize_term(t.right))
    parts = sum_spine(t)
    acc = normalize_term(parts[0][1])
    for s, x in parts[1:]:
        acc = BinOp("+" if s > 0 else "-", acc, normalize_term(x))
    return acc


def normalize_constants(f: Formula) -> Formula:
    """Replace every maximal variable-free subterm by its binary-expansion tree."""
    return map_terms(f, lambda a: Atom(a.rel, normalize_term(a.left), normalize_term(a.right)))


# -- variables ----------------------------------------------------------------

def term_vars(t: Term, out: dict) -> None:
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.setdefault(x.name, None)
        elif isinstance(x, BinOp):
            stack.append(x.right)
            stack.append(x.left)


def _free(f: Formula, bound: frozenset, out: dict) -> None:
    if isinstance(f, Atom):
        names: dict = {}
        term_vars(f.left, names)
        term_vars(f.right, names)
        for n in names:
            if n not in bound:
                out.setdefault(n, None)
    elif isinstance(f, Quant):
        _free(f.body, bound | set(f.vars), out)
    else:
        for c in f.children():
            _free(c, bound, out)


def free_vars(f: Formula) -> tuple[str, ...]:
    """Free variables in order of first occurrence."""
    out: dict = {}
    _free(f, frozenset(), out)
    return tuple(out)


def all_vars(f: AnyNode) -> set[str]:
    out: dict = {}
    stack = [f]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out[x.name] = None
        elif isinstance(x, Quant):
            out.update(dict.fromkeys(x.vars))
            stack.append(x.body)
        else:
            stack.extend(x.children())
    return set(out)


def atoms(f: Formula) -> list[Atom]:
    out = []
    stack = [f]
    while stack:
        x = stack.pop()
        if isinstance(x, Atom):
            out.append(x)
        else:
            stack.extend(reversed(x.children()))
    return out


def is_quantifier_free(f: Formula) -> bool:
    stack = [f]
    while stack:
        x = stack.pop()
        if isinstance(x, Quant):
            return False
        if not isinstance(x, Atom):
            stack.extend(x.children())
    return True


def rename_term(t: Term, mapping: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping[t.name]) if t.name in mapping else t
    if isinstance(t, Const):
        return t
    return BinOp(t.op, rename_term(t.left, mapping), rename_term(t.right, mapping)) \
        if t.op == "*" else _rebuild_sum(t, lambda x: rename_term(x, mapping))


def _rebuild_sum(t: Term, fn) -> Term:
    parts = sum_spine(t)
    acc = fn(parts[0][1])
    for s, x in parts[1:]:
        acc = BinOp("+" if s > 0 else "-", acc, fn(x))
    return acc


# -- prenex form --------------------------------------------------------------

def _expand_quantified_iff(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Iff):
        a, b = _expand_quantified_iff(f.left), _expand_quantified_iff(f.right)
        if is_quantifier_free(a) and is_quantifier_free(b):
            return Iff(a, b)
        return And(Or(Not(a), b), Or(Not(b), a))
    if isinstance(f, Not):
        return Not(_expand_quantified_iff(f.arg))
    if isinstance(f, _NAry):
        return type(f)([_expand_quantified_iff(a) for a in f.args])
    return Quant(f.kind, f.vars, _expand_quantified_iff(f.body))


class _Fresh:
    def __init__(self, taken: set[str]):
        self.taken = set(taken)
        self.counter = count(1)

    def __call__(self, base: str) -> str:
        stem = base.split("#", 1)[0]
        while True:
            name = f"{stem}#{next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def rename_apart(f: Formula) -> Formula:
    """Alpha-rename so that bound names are pairwise distinct and disjoint
    from the free variables."""
    fresh = _Fresh(all_vars(f))
    claimed = set(free_vars(f))

    def go(g: Formula, env: dict) -> Formula:
        if isinstance(g, Atom):
            if not env:
                return g
            return Atom(g.rel, rename_term(g.left, env), rename_term(g.right, env))
        if isinstance(g, Quant):
            env2 = dict(env)
            names = []
            for v in g.vars:
                if v in claimed:
                    new = fresh(v)
                    env2[v] = new
                else:
                    new = v
                    env2.pop(v, None)
                claimed.add(new)
                names.append(new)
            return Quant(g.kind, names, go(g.body, env2))
        if isinstance(g, Not):
            return Not(go(g.arg, env))
        if isinstance(g, Iff):
            return Iff(go(g.left, env), go(g.right, env))
        return type(g)([go(a, env) for a in g.args])

    return go(f, {})


def _pull(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    if isinstance(f, Atom):
        return [], f
    if isinstance(f, Quant):
        prefix, m = _pull(f.body)
        return [(f.kind, v) for v in f.vars] + prefix, m
    if isinstance(f, Not):
        prefix, m = _pull(f.arg)
        return [("A" if k == "E" else "E", v) for k, v in prefix], Not(m)
    if isinstance(f, Iff):
        # quantifier-free by construction (quantified ones were expanded)
        return [], f
    prefix: list = []
    parts = []
    for a in f.args:
        p, m = _pull(a)
        prefix.extend(p)
        parts.append(m)
    return prefix, type(f)(parts)


def wrap_prefix(prefix: list[tuple[str, str]], matrix: Formula) -> Formula:
    blocks: list[tuple[str, list[str]]] = []
    for kind, v in prefix:
        if blocks and blocks[-1][0] == kind:
            blocks[-1][1].append(v)
        else:
            blocks.append((kind, [v]))
    out = matrix
    for kind, names in reversed(blocks):
        out = Quant(kind, names, out)
    return out


def split_prefix(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    """Split a prenex formula into its quantifier prefix and matrix."""
    prefix = []
    while isinstance(f, Quant):
        prefix.extend((f.kind, v) for v in f.vars)
        f = f.body
    return prefix, f


def to_prenex(f: Formula) -> Formula:
    """Equivalent formula with all quantifiers in front.

    ``<=>`` nodes containing quantifiers are first expanded to
    ``(~A \\/ B) /\\ (~B \\/ A)``; bound variables are renamed apart using
    fresh names of the form ``X#n``.
    """
    if is_quantifier_free(f):
        return f
    g = rename_apart(_expand_quantified_iff(f))
    prefix, matrix = _pull(g)
    return wrap_prefix(prefix, matrix)


def is_prenex(f: Formula) -> bool:
    return is_quantifier_free(split_prefix(f)[1])


# -- semantics ----------------------------------------------------------------

def eval_term(t: Term, assignment: Mapping[str, Fraction | int]) -> Fraction:
    if isinstance(t, Const):
        return Fraction(t.value)
    if isinstance(t, Var):
        if t.name not in assignment:
            raise MissingVariableError(t.name)
        return Fraction(assignment[t.name])
    if t.op == "*":
        return eval_term(t.left, assignment) * eval_term(t.right, assignment)
    total = Fraction(0)
    for s, x in sum_spine(t):
        v = eval_term(x, assignment)
        total = total + v if s > 0 else total - v
    return total


def compare(rel: str, a, b) -> bool:
    if rel == "<":
        return a < b
    if rel == "<=":
        return a <= b
    if rel == ">":
        return a > b
    if rel == ">=":
        return a >= b
    if rel == "=":
        return a == b
    return a != b


def eval_qfree(f: Formula, assignment: Mapping[str, Fraction | int]) -> bool:
    """Exact truth value of a quantifier-free formula under ``assignment``."""
    if isinstance(f, Atom):
        return compare(f.rel, eval_term(f.left, assignment), eval_term(f.right, assignment))
    if isinstance(f, Not):
        return not eval_qfree(f.arg, assignment)
    if isinstance(f, And):
        return all(eval_qfree(a, assignment) for a in f.args)
    if isinstance(f, Or):
        return any(eval_qfree(a, assignment) for a in f.args)
    if isinstance(f, Iff):
        return eval_qfree(f.left, assignment) == eval_qfree(f.right, assignment)
    raise ValueError("eval_qfree requires a quantifier-free formula")


# -- size ---------------------------------------------------------------------

def formula_length(f: AnyNode) -> int:
    """Number of symbols of the printed form with constants spelled out in
    0/1 binary expansion (multi-letter names count as one symbol)."""
    return len(tokenize(to_text(f, fold_constants=False))) - 1


def iter_subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        x = stack.pop()
        yield x
        if not isinstance(x, Atom):
            stack.extend(reversed(x.children()))
