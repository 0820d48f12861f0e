import os
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realqe import formula as fm
from realqe import qe
from realqe.polynomials import parse_polynomial as P
from realqe.sampling import sample_equiv

from strategies import qf_formulas

DISCRIMINANT = fm.parse("(A != 0 /\\ B*B - 4*A*C >= 0) \\/ (A = 0 /\\ B != 0) \\/ (A = 0 /\\ B = 0 /\\ C = 0)")


def eliminated(text, **kw):
    return qe.eliminate_all(fm.parse(text), **kw)


class TestEliminateExists:
    def test_quadratic(self):
        out = qe.eliminate_exists(fm.parse("(E X)(A*X*X + B*X + C = 0)"))
        assert fm.is_quantifier_free(out)
        assert set(fm.free_vars(out)) <= {"A", "B", "C"}
        verdict = sample_equiv(out, DISCRIMINANT, ["A", "B", "C"], trials=300, seed=1)
        assert verdict, verdict.assignment

    def test_quadratic_output_is_frozen(self):
        out = qe.eliminate_exists(fm.parse("(E X)(A*X*X + B*X + C = 0)"))
        assert fm.to_text(out) == (
            "A < 0 /\\ 4*A*A*C - A*B*B >= 0 \\/ A = 0 /\\ B != 0 \\/ A = 0 /\\ B = 0 /\\ C = 0"
            " \\/ A > 0 /\\ 4*A*A*C - A*B*B <= 0")

    def test_unbounded_above(self):
        assert qe.eliminate_exists(fm.parse("(E X)(X > Y)")) == fm.TRUE

    def test_square_root(self):
        out = qe.eliminate_exists(fm.parse("(E X)(X*X = Y)"))
        assert sample_equiv(out, fm.parse("Y >= 0"), ["Y"], trials=200)

    def test_linear_degenerate_coefficients(self):
        out = qe.eliminate_exists(fm.parse("(E X)(A*X + B = 0)"))
        assert sample_equiv(out, fm.parse("A != 0 \\/ B = 0"), ["A", "B"], trials=300)
        assert fm.eval_qfree(out, {"A": 0, "B": 0})
        assert not fm.eval_qfree(out, {"A": 0, "B": 1})

    def test_no_true_leaf_gives_false(self):
        assert qe.eliminate_exists(fm.parse("(E X)(X*X + 1 < 0 /\\ Y > 0)")) == fm.FALSE

    def test_rejects_non_existential(self):
        with pytest.raises(ValueError):
            qe.eliminate_exists(fm.parse("(A X)(X > 0)"))
        with pytest.raises(ValueError):
            qe.eliminate_exists(fm.parse("X > 0"))


class TestEliminateAll:
    def test_universal_square(self):
        assert eliminated("(A Y)(Y*Y >= 0)") == fm.TRUE

    def test_nested(self):
        assert eliminated("(E X)(A Y)((Y - X)*(Y - X) >= 0)") == fm.TRUE

    def test_free_variables_survive(self):
        out = eliminated("(A X)(X*X + Y > 0)")
        assert fm.free_vars(out) == ("Y",)
        assert sample_equiv(out, fm.parse("Y > 0"), ["Y"], trials=200)

    def test_quantifier_free_input(self):
        f = fm.parse("X > 0 /\\ X > 0")
        assert eliminated("X > 0 /\\ X > 0") == qe.simplify(f)

    def test_davenport_heintz_level_one(self):
        from realqe.signtable import count_components

        f = fm.parse("(E Z)(A U V)(~((U = X /\\ V = Z) \\/ (U = Z /\\ 2*V = 1)) \\/ V = 4*U*(1 - U))")
        out = qe.eliminate_all(f)
        assert fm.free_vars(out) == ("X",)
        assert count_components(out) == 4


class TestDecide:
    @pytest.mark.parametrize("text,expected", [
        ("(E X)(X*X = 2)", True),
        ("(A X)(E Y)(Y > X)", True),
        ("(E X Y)(X*X + Y*Y < 0)", False),
        ("(E X)(X*X + 1 = 0)", False),
        ("(A X)(X*X > 0)", False),
        ("(E X)(A Y)(X*Y = 0)", True),
        ("(A X)(E Y)(X*Y = 1)", False),
        ("0 = 0", True),
    ])
    def test_examples(self, text, expected):
        assert qe.decide_sentence(fm.parse(text)) is expected

    def test_rejects_free_variables(self):
        with pytest.raises(ValueError):
            qe.decide_sentence(fm.parse("(E X)(X > Y)"))


class TestBranching:
    def test_path_oracle(self):
        oracle = qe.PathOracle({P("Y"): 1})
        assert oracle.sign(P("-2*Y")) == -1
        assert oracle.sign(P("3")) == 1
        with pytest.raises(qe.NeedSign):
            oracle.sign(P("Y + 1"))

    def test_condition_path_formula(self):
        path = qe.ConditionPath().extend(P("A"), 0).extend(P("B"), -1)
        assert len(path) == 2
        assert fm.to_text(path.formula()) == "A = 0 /\\ B < 0"

    @pytest.mark.parametrize("text", [
        "A*X*X + B*X + C = 0",
        "A*X + B = 0",
        "X*X - Y < 0 /\\ X > 0",
    ])
    def test_leaves_form_a_complete_ternary_tree(self, text):
        _, leaves = qe.eliminate_matrix(fm.parse(text), "X")
        paths = [leaf.path.tests for leaf in leaves]
        assert len(set(paths)) == len(paths)
        for p in paths:
            # no polynomial is tested twice on one branch
            assert len({q for q, _ in p}) == len(p)
        # every inner node has exactly its three children below it
        inner = {p[:k] for p in paths for k in range(len(p))}
        for node in inner:
            below = {p[len(node)] for p in paths if len(p) > len(node) and p[:len(node)] == node}
            (q,) = {q for q, _ in below}
            assert {s for _, s in below} == {-1, 0, 1}
        # prefix-free: no leaf lies on the path to another leaf
        assert not inner & set(paths)

    def test_raw_disjunction_matches_collapsed(self):
        raw, leaves = qe.eliminate_matrix(fm.parse("A*X + B = 0"), "X")
        assert sample_equiv(raw, qe.collapse(leaves), ["A", "B"], trials=200)

    def test_branch_budget(self):
        with pytest.raises(qe.BranchBudgetExceeded):
            qe.eliminate_exists(fm.parse("(E X)(A*X*X + B*X + C = 0)"), budget=5)

    def test_budget_from_environment(self, monkeypatch):
        monkeypatch.setenv("REALQE_BUDGET_NODES", "5")
        with pytest.raises(qe.BranchBudgetExceeded):
            qe.eliminate_exists(fm.parse("(E X)(A*X*X + B*X + C = 0)"))
        monkeypatch.delenv("REALQE_BUDGET_NODES")
        qe.eliminate_exists(fm.parse("(E X)(A*X*X + B*X + C = 0)"))

    def test_threads_do_not_change_the_result(self):
        f = fm.parse("A*X*X + B*X + C = 0")
        seq = qe.eliminate_matrix(f, "X", threads=1)
        par = qe.eliminate_matrix(f, "X", threads=3)
        assert seq[0] == par[0]
        assert [l.path for l in seq[1]] == [l.path for l in par[1]]


class TestSimplify:
    def test_false_disjunct(self):
        phi = fm.parse("X > 0")
        assert qe.simplify(fm.Or(fm.FALSE, phi)) == phi

    def test_duplicate_conjunct(self):
        phi = fm.parse("X*Y > 1")
        assert qe.simplify(fm.And(phi, phi)) == qe.simplify(phi)

    def test_contradictory_path(self):
        f = fm.parse("(X - Y > 0 /\\ Y - X > 0 /\\ Z = 0) \\/ Z > 1")
        assert qe.simplify(f) == qe.simplify(fm.parse("Z > 1"))

    def test_constant_atoms_fold(self):
        assert qe.simplify(fm.parse("1 + 1 = 2 /\\ X > 0")) == qe.simplify(fm.parse("X > 0"))
        assert qe.simplify(fm.parse("1 = 2 /\\ X > 0")) == fm.FALSE

    def test_sign_sets_merge(self):
        assert qe.simplify(fm.parse("X > 0 \\/ X = 0")) == fm.parse("X >= 0")
        assert qe.simplify(fm.parse("X >= 0 /\\ X <= 0")) == fm.parse("X = 0")

    @settings(max_examples=150, deadline=None)
    @given(qf_formulas())
    def test_idempotent(self, f):
        once = qe.simplify(f)
        assert qe.simplify(once) == once

    @settings(max_examples=60, deadline=None)
    @given(qf_formulas())
    def test_equivalent(self, f):
        g = qe.simplify(f)
        verdict = sample_equiv(f, g, ["X", "Y"], trials=40, seed=3)
        assert verdict, verdict.assignment


def _exists_formulas():
    from realqe.polynomials import Polynomial, poly_to_term

    monomials = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]

    def atom(cs, rel):
        p = Polynomial(("X", "Y"), dict(zip(monomials, cs)))
        if p.is_zero():
            p = Polynomial.var("X")
        return fm.Atom(rel, poly_to_term(p), fm.ZERO)

    atoms = st.builds(atom, st.lists(st.integers(-2, 2), min_size=6, max_size=6),
                      st.sampled_from(fm.RELATIONS))
    bodies = st.one_of(atoms,
                       st.builds(lambda a, b: fm.And(a, b), atoms, atoms),
                       st.builds(lambda a, b: fm.Or(a, b), atoms, atoms))
    return bodies.map(lambda b: fm.Quant("E", ("X",), b))


class TestSoundness:
    @settings(max_examples=15, deadline=None)
    @given(_exists_formulas())
    def test_matches_exact_instances(self, f):
        out = qe.eliminate_exists(f)
        assert fm.is_quantifier_free(out)
        assert set(fm.free_vars(out)) <= {"Y"}
        verdict = sample_equiv(f, out, ["Y"], trials=15, seed=7)
        assert verdict, verdict.assignment
