"""Randomized equivalence checking of formulas at rational points."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from realqe import formula as fm
from realqe.polynomials import Polynomial, integral_form, poly_from_term, poly_to_term

DEFAULT_GRID = tuple(Fraction(x) for x in (-2, -1, Fraction(-1, 2), 0, Fraction(1, 2), 1, 2))


@dataclass(frozen=True)
class SampleVerdict:
    equivalent: bool
    assignment: dict | None = None
    left: bool | None = None
    right: bool | None = None
    trials: int = 0

    def __bool__(self) -> bool:
        return self.equivalent


def instantiate(f: fm.Formula, assignment: Mapping[str, Fraction | int]) -> fm.Formula:
    """Substitute rational values for free variables.

    Each touched atom is rewritten as ``P rel 0`` with ``P`` scaled to integer
    coefficients, so the result stays inside the formula language.
    """
    return _inst(f, {k: Fraction(v) for k, v in assignment.items()})


def _inst(f: fm.Formula, values: dict[str, Fraction]) -> fm.Formula:
    if isinstance(f, fm.Atom):
        names: dict[str, None] = {}
        fm.term_vars(f.left, names)
        fm.term_vars(f.right, names)
        if not names.keys() & values.keys():
            return f
        p = poly_from_term(f.left) - poly_from_term(f.right)
        q = integral_form(p.substitute({k: v for k, v in values.items() if k in names}))
        return fm.Atom(f.rel, poly_to_term(q), fm.ZERO)
    if isinstance(f, fm.Not):
        return fm.Not(_inst(f.arg, values))
    if isinstance(f, (fm.And, fm.Or)):
        return type(f)([_inst(a, values) for a in f.args])
    if isinstance(f, fm.Iff):
        return fm.Iff(_inst(f.left, values), _inst(f.right, values))
    if isinstance(f, fm.Quant):
        inner = {k: v for k, v in values.items() if k not in f.vars}
        return fm.Quant(f.kind, f.vars, _inst(f.body, inner))
    raise TypeError(type(f).__name__)


def truth_at(f: fm.Formula, assignment: Mapping[str, Fraction | int]) -> bool:
    """Truth of ``f`` at a point; quantified formulas are decided exactly."""
    if fm.is_quantifier_free(f):
        return fm.eval_qfree(f, assignment)
    from realqe.qe import decide_sentence

    return decide_sentence(instantiate(f, assignment))


def _rational_roots(p: Polynomial, v: str) -> list[Fraction]:
    """Rational roots of a univariate ``p`` of degree at most two (cheap cases only)."""
    d = p.degree(v)
    if d == 1:
        c = p.coefficients(v)
        b = c.get(0, Polynomial.zero()).constant_value
        return [-b / c[1].constant_value]
    if d == 2:
        c = p.coefficients(v)
        a = c[2].constant_value
        b = c.get(1, Polynomial.zero()).constant_value
        cc = c.get(0, Polynomial.zero()).constant_value
        disc = b * b - 4 * a * cc
        if disc < 0:
            return []
        num, den = _exact_sqrt(disc.numerator), _exact_sqrt(disc.denominator)
        if num is None or den is None:
            return []
        r = Fraction(num, den)
        return sorted({(-b - r) / (2 * a), (-b + r) / (2 * a)})
    return []


def _exact_sqrt(n: int) -> int | None:
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


def sample_points(vars: Sequence[str], trials: int, seed: int = 0,
                  grid: Sequence[Fraction] = DEFAULT_GRID,
                  polys: Iterable[Polynomial] = ()) -> Iterable[dict[str, Fraction]]:
    """Deterministic stream of rational assignments.

    Each coordinate comes from the grid, from a random small rational, or,
    when possible, from a rational root of one of ``polys`` restricted to that
    coordinate after the others are fixed.
    """
    rng = random.Random(seed)
    polys = [p for p in polys if not p.is_constant()]
    vars = list(vars)
    for _ in range(trials):
        point: dict[str, Fraction] = {}
        order = vars[:]
        rng.shuffle(order)
        for v in order:
            roll = rng.random()
            value = None
            if roll < 0.25 and polys:
                candidates = []
                for p in polys:
                    rest = set(p.vars) - {v}
                    if v in p.vars and rest <= point.keys():
                        candidates += _rational_roots(p.substitute({k: point[k] for k in rest}), v)
                if candidates:
                    value = rng.choice(candidates)
            if value is None and roll < 0.65:
                value = rng.choice(list(grid))
            if value is None:
                value = Fraction(rng.randint(-20, 20), rng.randint(1, 8))
            point[v] = value
        yield point


def sample_equiv(f: fm.Formula, g: fm.Formula, vars: Sequence[str] | None = None,
                 trials: int = 500, seed: int = 0,
                 grid: Sequence[Fraction] = DEFAULT_GRID) -> SampleVerdict:
    """Compare ``f`` and ``g`` at ``trials`` seeded rational points; the first
    disagreement is returned as a counterexample."""
    if vars is None:
        vars = list(dict.fromkeys(fm.free_vars(f) + fm.free_vars(g)))
    polys = []
    for h in (f, g):
        for a in fm.atoms(h):
            polys.append(poly_from_term(a.left) - poly_from_term(a.right))
    n = 0
    for point in sample_points(vars, trials, seed, grid, polys):
        n += 1
        a, b = truth_at(f, point), truth_at(g, point)
        if a != b:
            return SampleVerdict(False, point, a, b, n)
    return SampleVerdict(True, None, None, None, n)
