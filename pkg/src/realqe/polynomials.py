"""Exact multivariate polynomials over the rationals.

A :class:`Polynomial` stores a sorted tuple of variable names and a map from
exponent vectors to nonzero :class:`~fractions.Fraction` coefficients.  Only
variables that actually occur are kept, so two equal polynomials always have
identical internal state and hash alike.
"""
from __future__ import annotations

import contextlib
import math
import re
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Mapping, Union

Number = Union[int, Fraction]

MINUS_INFINITY = -math.inf
"""Degree reported for the zero polynomial."""

DEFAULT_MONOMIAL_BUDGET = 10**6

_monomial_budget: ContextVar[int] = ContextVar("monomial_budget", default=DEFAULT_MONOMIAL_BUDGET)


class ExpansionBudgetExceeded(ArithmeticError):
    """Raised when expanding a product would exceed the monomial budget."""

    def __init__(self, count: int, budget: int):
        super().__init__(f"expansion produced more than {budget} monomials (reached {count})")
        self.count = count
        self.budget = budget


class MissingVariableError(KeyError):
    pass


@contextlib.contextmanager
def expansion_budget(limit: int) -> Iterator[None]:
    """Temporarily set the maximal number of monomials any product may have."""
    if limit <= 0:
        raise ValueError("budget must be positive")
    token = _monomial_budget.set(limit)
    try:
        yield
    finally:
        _monomial_budget.reset(token)


def current_budget() -> int:
    return _monomial_budget.get()


class Polynomial:
    __slots__ = ("vars", "terms", "_hash", "_str")

    def __init__(self, vars: tuple[str, ...] = (), terms: Mapping[tuple[int, ...], Number] | None = None):
        vars = tuple(vars)
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exps, c in terms.items():
                if c:
                    if len(exps) != len(vars):
                        raise ValueError("exponent vector arity does not match variables")
                    clean[tuple(exps)] = Fraction(c)
        used = [i for i in range(len(vars)) if any(e[i] for e in clean)]
        order = sorted(used, key=lambda i: vars[i])
        if len(order) != len(vars) or any(vars[a] > vars[b] for a, b in zip(order, order[1:])):
            new_vars = tuple(vars[i] for i in order)
            if len(set(new_vars)) != len(new_vars):
                raise ValueError("duplicate variable names")
            clean = {tuple(e[i] for i in order): c for e, c in clean.items()}
            vars = new_vars
        self.vars = vars
        self.terms = clean
        self._hash = None
        self._str = None

    @classmethod
    def _raw(cls, vars: tuple[str, ...], terms: dict[tuple[int, ...], Fraction]) -> Polynomial:
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        obj._hash = None
        obj._str = None
        return obj

    @classmethod
    def _trusted(cls, vars: tuple[str, ...], terms: dict[tuple[int, ...], Fraction]) -> Polynomial:
        # nonzero Fraction coefficients and sorted variables; only unused
        # variables may still need to be dropped
        used = [i for i in range(len(vars)) if any(e[i] for e in terms)]
        if len(used) == len(vars):
            return cls._raw(vars, terms)
        return cls._raw(tuple(vars[i] for i in used),
                        {tuple(e[i] for i in used): c for e, c in terms.items()})

    # -- constructors ---------------------------------------------------------

    @classmethod
    def const(cls, c: Number) -> Polynomial:
        c = Fraction(c)
        return cls._raw((), {(): c} if c else {})

    @classmethod
    def var(cls, name: str) -> Polynomial:
        return cls._raw((name,), {(1,): Fraction(1)})

    @classmethod
    def zero(cls) -> Polynomial:
        return cls._raw((), {})

    # -- basic queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.vars

    @property
    def constant_value(self) -> Fraction:
        if self.vars:
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.vars

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -----------------------------------------------------------

    def _aligned(self, other: Polynomial) -> tuple[tuple[str, ...], dict, dict]:
        if self.vars == other.vars:
            return self.vars, self.terms, other.terms
        vars = tuple(sorted(set(self.vars) | set(other.vars)))
        return vars, _remap(self, vars), _remap(other, vars)

    def __add__(self, other: Polynomial | Number) -> Polynomial:
        other = _coerce(other)
        vars, a, b = self._aligned(other)
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return _strip(vars, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Polynomial | Number) -> Polynomial:
        return self + (-_coerce(other))

    def __rsub__(self, other: Number) -> Polynomial:
        return _coerce(other) + (-self)

    def __mul__(self, other: Polynomial | Number) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.terms or not other.terms:
            return Polynomial.zero()
        vars, a, b = self._aligned(other)
        budget = _monomial_budget.get()
        out: dict[tuple[int, ...], Fraction] = {}
        if len(a) < len(b):
            a, b = b, a
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e)
                if s is None:
                    out[e] = ca * cb
                    if len(out) > budget:
                        raise ExpansionBudgetExceeded(len(out), budget)
                else:
                    out[e] = s + ca * cb
        return _strip(vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c: Number) -> Polynomial:
        c = Fraction(c)
        if not c:
            return Polynomial.zero()
        return Polynomial._raw(self.vars, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, n: int) -> Polynomial:
        if n < 0:
            raise ValueError("negative exponent")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure with respect to one variable ------------------------------

    def degree(self, v: str | None = None) -> int | float:
        """Degree in ``v`` (total degree if ``v`` is None); ``-inf`` for zero."""
        if not self.terms:
            return MINUS_INFINITY
        if v is None:
            return max(sum(e) for e in self.terms)
        if v not in self.vars:
            return 0
        i = self.vars.index(v)
        return max(e[i] for e in self.terms)

    def coefficients(self, v: str) -> dict[int, Polynomial]:
        """Split into ``{k: c_k}`` with ``self = sum c_k * v**k``."""
        if v not in self.vars:
            return {0: self} if self.terms else {}
        i = self.vars.index(v)
        rest = self.vars[:i] + self.vars[i + 1:]
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        return {k: Polynomial._trusted(rest, t) for k, t in parts.items()}

    def leading_coefficient(self, v: str) -> Polynomial:
        coeffs = self.coefficients(v)
        if not coeffs:
            return Polynomial.zero()
        return coeffs[max(coeffs)]

    @staticmethod
    def from_coefficients(v: str, coeffs: Mapping[int, Polynomial]) -> Polynomial:
        x = Polynomial.var(v)
        out = Polynomial.zero()
        for k, c in coeffs.items():
            if not c.is_zero():
                out = out + c * _monomial_power(x, k)
        return out

    def truncate(self, v: str, degree: int) -> Polynomial:
        """Drop every term whose exponent of ``v`` exceeds ``degree``."""
        if v not in self.vars:
            return self if degree >= 0 else Polynomial.zero()
        i = self.vars.index(v)
        return Polynomial(self.vars, {e: c for e, c in self.terms.items() if e[i] <= degree})

    def derivative(self, v: str) -> Polynomial:
        if v not in self.vars:
            return Polynomial.zero()
        i = self.vars.index(v)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                out[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
        return Polynomial(self.vars, out)

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, assignment: Mapping[str, Number]) -> Fraction:
        values = []
        for v in self.vars:
            if v not in assignment:
                raise MissingVariableError(v)
            values.append(Fraction(assignment[v]))
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(values, e):
                if k:
                    term *= x**k
            total += term
        return total

    def substitute(self, assignment: Mapping[str, Number]) -> Polynomial:
        """Partially evaluate: replace the assigned variables by rationals."""
        keep = [i for i, v in enumerate(self.vars) if v not in assignment]
        if len(keep) == len(self.vars):
            return self
        vals = {i: Fraction(assignment[v]) for i, v in enumerate(self.vars) if v in assignment}
        vars = tuple(self.vars[i] for i in keep)
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            for i, x in vals.items():
                if e[i]:
                    c = c * x ** e[i]
            if c:
                k = tuple(e[i] for i in keep)
                out[k] = out.get(k, 0) + c
        return Polynomial(vars, out)

    def rename(self, mapping: Mapping[str, str]) -> Polynomial:
        vars = tuple(mapping.get(v, v) for v in self.vars)
        return Polynomial(vars, self.terms)

    # -- normalization --------------------------------------------------------

    def primitive(self) -> tuple[Fraction, Polynomial]:
        """Return ``(c, q)`` with ``self == c*q``, ``c > 0``, ``q`` integral with content 1."""
        if not self.terms:
            return Fraction(1), self
        den = reduce(_lcm, (c.denominator for c in self.terms.values()), 1)
        num = reduce(math.gcd, (c.numerator for c in self.terms.values()), 0)
        c = Fraction(num, den)
        if c == 1:
            return c, self
        return c, Polynomial._raw(self.vars, {e: v / c for e, v in self.terms.items()})

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        e = max(self.terms)
        return e, self.terms[e]

    def canonical(self) -> tuple[int, Polynomial]:
        """Return ``(s, q)`` with ``self == s*c*q`` for some ``c > 0``, where ``q``
        is integral, primitive and has a positive lex-leading coefficient."""
        if not self.terms:
            return 0, self
        _, q = self.primitive()
        if q.leading_term()[1] < 0:
            return -1, -q
        return 1, q

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def bit_size(self) -> int:
        """Largest coefficient size in bits (numerator and denominator)."""
        return max((max(abs(c.numerator).bit_length(), c.denominator.bit_length())
                    for c in self.terms.values()), default=0)

    # -- text -----------------------------------------------------------------

    def __str__(self) -> str:
        if self._str is None:
            self._str = self._text()
        return self._str

    def _text(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for k, (e, c) in enumerate(sorted(self.terms.items(), reverse=True)):
            mono = "*".join(v if n == 1 else f"{v}^{n}" for v, n in zip(self.vars, e) if n)
            mag = abs(c)
            if not mono:
                body = _fmt_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_fmt_rational(mag)}*{mono}"
            if k == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _coerce(x: Polynomial | Number) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


def poly_sum(polys: Iterable[Polynomial]) -> Polynomial:
    """Sum of many polynomials, aligning variables once instead of per addition."""
    polys = list(polys)
    vars = tuple(sorted({v for p in polys for v in p.vars}))
    out: dict = {}
    for p in polys:
        for e, c in _remap(p, vars).items():
            out[e] = out.get(e, 0) + c
    return _strip(vars, {e: c for e, c in out.items() if c})


def _remap(p: Polynomial, vars: tuple[str, ...]) -> dict:
    if p.vars == vars:
        return p.terms
    idx = [p.vars.index(v) if v in p.vars else -1 for v in vars]
    return {tuple(e[i] if i >= 0 else 0 for i in idx): c for e, c in p.terms.items()}


def _strip(vars: tuple[str, ...], terms: dict) -> Polynomial:
    # drop variables that no longer occur after cancellation
    if vars and not all(any(e[i] for e in terms) for i in range(len(vars))):
        return Polynomial(vars, terms)
    return Polynomial._raw(vars, terms)


def _monomial_power(x: Polynomial, k: int) -> Polynomial:
    if k == 0:
        return Polynomial.const(1)
    (name,) = x.vars
    return Polynomial._raw((name,), {(k,): Fraction(1)})


# -- module-level operations --------------------------------------------------

def arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    raise ValueError(f"unknown operator {op!r}")


def degree(p: Polynomial, v: str) -> int | float:
    return p.degree(v)


def derivative(p: Polynomial, v: str) -> Polynomial:
    return p.derivative(v)


def evaluate(p: Polynomial, assignment: Mapping[str, Number]) -> Fraction:
    return p.evaluate(assignment)


def pseudoremainder(a: Polynomial, b: Polynomial, v: str, *, even: bool = False) -> Polynomial:
    """Division-free remainder of ``a`` by ``b`` with respect to ``v``.

    Returns ``r`` with ``deg_v r < deg_v b`` and ``lc(b)**n * a == q*b + r``
    where ``n = deg_v a - deg_v b + 1``.  With ``even=True`` the exponent is
    rounded up to the next even number, so ``r`` agrees in sign with ``a`` at
    every common root of ``b`` whatever the sign of ``lc(b)``.
    """
    if b.is_zero():
        raise ZeroDivisionError("pseudoremainder by the zero polynomial")
    d, e = a.degree(v), b.degree(v)
    if d < e:
        raise ValueError(f"degree of dividend ({d}) is below degree of divisor ({e})")
    if set(a.vars) <= {v} and set(b.vars) <= {v}:
        n = d - e + 1
        return _univariate_prem(a, b, v, n + 1 if even and n % 2 else n)
    bc = b.coefficients(v)
    lc = bc[e]
    tail = Polynomial.from_coefficients(v, {k: c for k, c in bc.items() if k != e})
    n = d - e + 1
    if even and n % 2:
        n += 1
    r = a
    steps = 0
    x = Polynomial.var(v)
    while not r.is_zero() and r.degree(v) >= e:
        k = r.degree(v)
        lr = r.leading_coefficient(v)
        # lc*r - lr*x^(k-e)*b, with the leading terms cancelled exactly
        r = lc * r.truncate(v, k - 1) - lr * _monomial_power(x, k - e) * tail
        steps += 1
    if n > steps:
        r = r * lc ** (n - steps)
    return r


def _univariate_prem(a: Polynomial, b: Polynomial, v: str, n: int) -> Polynomial:
    # same recurrence as the general case, on dense coefficient lists
    def dense(p: Polynomial) -> list:
        out = [0] * (int(p.degree(v)) + 1)
        for exps, c in p.terms.items():
            # plain ints are much cheaper than Fractions with denominator 1
            out[exps[0] if exps else 0] = c.numerator if c.denominator == 1 else c
        return out

    r, bl = dense(a), dense(b)
    e = len(bl) - 1
    lc = bl[e]
    steps = 0
    while r and len(r) - 1 >= e:
        lr, shift = r[-1], len(r) - 1 - e
        r = [lc * c for c in r[:-1]]
        for k in range(e):
            r[k + shift] -= lr * bl[k]
        while r and not r[-1]:
            r.pop()
        steps += 1
    if n > steps:
        scale = lc ** (n - steps)
        r = [c * scale for c in r]
    if len(r) <= 1:
        return Polynomial.const(r[0] if r else 0)
    return Polynomial._raw((v,), {(k,): Fraction(c) for k, c in enumerate(r) if c})


def sign(c: Number) -> int:
    return (c > 0) - (c < 0)


def sign_at_infinity(p: Polynomial, direction: int) -> int:
    """Sign of a univariate ``p(x)`` for all sufficiently large ``direction*x``."""
    if p.is_zero():
        return 0
    if p.is_constant():
        return sign(p.constant_value)
    if len(p.vars) != 1:
        raise ValueError(f"{p} is not univariate")
    (v,) = p.vars
    d = p.degree(v)
    s = sign(p.leading_coefficient(v).constant_value)
    return s if direction > 0 or d % 2 == 0 else -s


@dataclass(frozen=True)
class RationalFunction:
    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")

    def evaluate(self, assignment: Mapping[str, Number]) -> Fraction:
        return self.num.evaluate(assignment) / self.den.evaluate(assignment)

    def sign_conditions(self, s: int) -> list[list[tuple[Polynomial, int]]]:
        """Alternatives of numerator/denominator sign pairs realizing sign ``s``.

        Each alternative is a conjunction of ``(polynomial, sign)`` pairs; the
        denominator is always required to be nonzero.
        """
        if self.den.is_constant():
            return [[(self.num, s * sign(self.den.constant_value))]]
        if s == 0:
            return [[(self.num, 0), (self.den, 1)], [(self.num, 0), (self.den, -1)]]
        return [[(self.num, s), (self.den, 1)], [(self.num, -s), (self.den, -1)]]


# -- canonical text form ------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9#']*)|(\^)|(\*)|([+-]))")


def parse_polynomial(text: str) -> Polynomial:
    """Parse the canonical display form, e.g. ``3*X^2*Y - 1/2``."""
    pos = 0
    text = text.strip()
    total = Polynomial.zero()
    sign_ = 1
    term: Polynomial | None = None
    expect_factor = True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        pos = m.end()
        num, name, caret, star, pm = m.groups()
        if pm:
            if term is not None:
                total = total + term.scale(sign_)
                term = None
            elif not (pos - 1 == 0 or text[:pos - 1].strip() == ""):
                raise ValueError("dangling sign")
            sign_ = 1 if pm == "+" else -1
            expect_factor = True
        elif star:
            expect_factor = True
        elif num or name:
            if not expect_factor:
                raise ValueError("missing operator")
            factor = Polynomial.const(Fraction(num)) if num else Polynomial.var(name)
            m2 = re.compile(r"\s*\^\s*(\d+)").match(text, pos)
            if m2:
                factor = factor ** int(m2.group(1))
                pos = m2.end()
            term = factor if term is None else term * factor
            expect_factor = False
        elif caret:
            raise ValueError("misplaced '^'")
    if term is None:
        if text in ("", "0"):
            return Polynomial.zero()
        raise ValueError("trailing operator")
    return total + term.scale(sign_)


# -- conversion from and to formula terms -------------------------------------

def poly_from_term(t) -> Polynomial:
    """Expand an arithmetic term of a formula into standard form.

    Raises :class:`ExpansionBudgetExceeded` when an intermediate product has
    more monomials than the current budget allows.
    """
    from realqe.formula import BinOp, Const, Var, sum_spine

    if isinstance(t, Const):
        return Polynomial.const(t.value)
    if isinstance(t, Var):
        return Polynomial.var(t.name)
    if not isinstance(t, BinOp):
        raise TypeError(f"not an arithmetic term: {t!r}")
    if t.op == "*":
        return poly_from_term(t.left) * poly_from_term(t.right)
    total = Polynomial.zero()
    for s, x in sum_spine(t):
        p = poly_from_term(x)
        total = total + p if s > 0 else total - p
    return total


def integral_form(p: Polynomial) -> Polynomial:
    """Positive rational multiple of ``p`` with integer coefficients."""
    if p.is_integral():
        return p
    den = reduce(_lcm, (c.denominator for c in p.terms.values()), 1)
    return p.scale(den)


def poly_to_term(p: Polynomial):
    """Standard-form term (sum of monomials) for an integral polynomial."""
    if not p.is_integral():
        raise ValueError("formula terms need integer coefficients; use integral_form()")
    return _poly_to_term(p)


@lru_cache(maxsize=50_000)
def _poly_to_term(p: Polynomial):
    from realqe.formula import ZERO, BinOp, Var, int_term

    if p.is_zero():
        return ZERO
    acc = None
    for e, c in sorted(p.terms.items(), reverse=True):
        factors = [Var(v) for v, n in zip(p.vars, e) for _ in range(n)]
        mag = abs(int(c))
        if mag != 1 or not factors:
            factors.insert(0, int_term(mag))
        mono = factors[0]
        for f in factors[1:]:
            mono = BinOp("*", mono, f)
        if acc is None:
            acc = mono if c > 0 else BinOp("-", ZERO, mono)
        else:
            acc = BinOp("+" if c > 0 else "-", acc, mono)
    return acc
