from fractions import Fraction

from hypothesis import given, settings

from realqe import formula as fm
from realqe.sampling import DEFAULT_GRID, instantiate, sample_equiv, sample_points, truth_at
from realqe.polynomials import parse_polynomial as P

from strategies import qf_formulas


def test_identical_formulas_agree():
    f = fm.parse("X*Y > 1 \\/ X = 0")
    v = sample_equiv(f, f, trials=100)
    assert v and v.trials == 100 and v.assignment is None


def test_boundary_counterexample():
    v = sample_equiv(fm.parse("X > 0"), fm.parse("X >= 0"), ["X"], trials=200)
    assert not v
    assert v.assignment == {"X": 0}
    assert (v.left, v.right) == (False, True)


def test_root_of_an_atom_is_found():
    # equal except exactly at X = 3/7, which is not on the grid
    v = sample_equiv(fm.parse("7*X - 3 != 0"), fm.parse("0 = 0"), ["X"], trials=300, seed=4)
    assert not v and v.assignment == {"X": Fraction(3, 7)}


def test_quadratic_roots_are_found():
    v = sample_equiv(fm.parse("4*X*X - 9 != 0"), fm.parse("0 = 0"), ["X"], trials=300, seed=2)
    assert not v and v.assignment["X"] in (Fraction(3, 2), Fraction(-3, 2))


def test_points_are_seeded():
    a = list(sample_points(["X", "Y"], 50, seed=9, polys=[P("X - Y")]))
    b = list(sample_points(["X", "Y"], 50, seed=9, polys=[P("X - Y")]))
    c = list(sample_points(["X", "Y"], 50, seed=10, polys=[P("X - Y")]))
    assert a == b and a != c
    assert all(isinstance(x, Fraction) for p in a for x in p.values())


def test_grid_contains_zero_and_units():
    assert {Fraction(0), Fraction(1), Fraction(-1)} <= set(DEFAULT_GRID)


def test_instantiate_respects_binders():
    f = fm.parse("(E X)(X*Y = 1) /\\ X > 0")
    g = instantiate(f, {"X": Fraction(1, 2), "Y": 2})
    assert fm.free_vars(g) == ()
    assert truth_at(f, {"X": Fraction(1, 2), "Y": 2})
    assert not truth_at(f, {"X": Fraction(1, 2), "Y": 0})


def test_instantiated_atoms_have_integer_coefficients():
    g = instantiate(fm.parse("X*Y < 1"), {"X": Fraction(2, 3)})
    assert fm.to_text(g) == "2*Y - 3 < 0"


@settings(max_examples=60, deadline=None)
@given(qf_formulas())
def test_double_negation(f):
    assert sample_equiv(f, fm.Not(fm.Not(f)), ["X", "Y"], trials=20)
