from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from realqe import formula as fm
from realqe import signtable as stb
from realqe.polynomials import Polynomial, parse_polynomial as P

import oracles
from strategies import univariate

P1, P2, P3 = P("4 - X^2"), P("X^3 - 2*X^2 - X + 2"), P("-X^3 + 5*X^2 - 6*X")
EMPTY = stb.SignTable((), (stb.INTERVAL,), ((),))


def oracle_sequence(polys):
    return oracles.sign_sequence([oracles.coeffs_of(p) for p in polys])


def as_sequence(table):
    return list(zip(table.kinds, table.columns))


def incremental(cl):
    """Tables over each closure prefix, built one extend_table call at a time."""
    table = EMPTY
    out = []
    for k in range(len(cl)):
        table = stb.extend_table(table, cl, k)
        out.append(table)
    return out


def normal(p):
    return stb.effective(p, "X", stb.EXACT)[0]


nonzero_univariate = univariate().filter(lambda p: not p.is_zero())


class TestClosure:
    def test_square(self):
        cl = stb.closure([P("X^2")])
        # stored up to positive scaling: 2 -> 1 and 2X -> X
        assert [str(p) for p in cl.polys] == ["1", "X", "X^2"]
        assert cl.derivative[2] == 1 and cl.derivative[1] == 0
        assert cl.remainder[(2, 1)] is None

    def test_constant(self):
        cl = stb.closure([Polynomial.const(-3)])
        assert len(cl) == 1 and cl.degrees == [0]

    def test_worked_set_size_is_frozen(self):
        assert len(stb.closure([P1, P2, P3])) == 24

    @settings(max_examples=25, deadline=None)
    @given(st.lists(univariate(max_deg=3).filter(lambda p: not p.is_zero()), min_size=1, max_size=3))
    def test_closed_sorted_and_duplicate_free(self, polys):
        cl = stb.closure(polys)
        # the pairwise re-check below is quadratic in the closure size
        assume(len(cl) <= 120)
        assert len(set(cl.polys)) == len(cl.polys)
        assert all(not p.is_zero() for p in cl.polys)
        keys = [(d, str(p)) for p, d in zip(cl.polys, cl.degrees)]
        assert keys == sorted(keys)
        for i, p in enumerate(cl.polys):
            if cl.degrees[i] >= 1:
                assert normal(p.derivative("X")) in cl
                for j, q in enumerate(cl.polys):
                    if 1 <= cl.degrees[j] <= cl.degrees[i]:
                        r = stb._prem(p, q, "X")
                        assert r.is_zero() or normal(r) in cl


class TestBuild:
    def test_worked_example(self):
        table = stb.restricted_table([P1, P2, P3])
        assert table.boundaries == 6
        assert len(table.columns) == 13
        assert table.columns[0] == (-1, -1, 1)
        # sample points -3, -1.5, -0.5, 0.5, 1.5, 2.5, 4 hit the intervals in order
        samples = [Fraction(x) for x in ("-3", "-1.5", "-0.5", "0.5", "1.5", "2.5", "4")]
        expected = [tuple((v > 0) - (v < 0) for v in (p.evaluate({"X": x}) for p in (P1, P2, P3)))
                    for x in samples]
        assert list(table.columns[::2]) == expected
        roots = [-2, -1, 0, 1, 2, 3]
        expected_b = [tuple((v > 0) - (v < 0) for v in (p.evaluate({"X": x}) for p in (P1, P2, P3)))
                      for x in roots]
        assert list(table.columns[1::2]) == expected_b

    def test_worked_example_against_oracle(self):
        assert as_sequence(stb.restricted_table([P1, P2, P3])) == oracle_sequence([P1, P2, P3])

    def test_linear(self):
        table = stb.restricted_table([P("X")])
        assert table.kinds == ("I", "B", "I")
        assert table.columns == ((-1,), (0,), (1,))

    def test_no_real_roots(self):
        cl, full = stb.build_sign_table([P("X^2 + 1")])
        assert P("X") in cl
        assert full.boundaries == 1
        table = stb.restricted_table([P("X^2 + 1")])
        assert table.columns == ((1,),)

    def test_full_table_is_well_formed(self):
        cl, table = stb.build_sign_table([P1, P2, P3])
        assert table.check("X") == []
        assert as_sequence(table) == oracle_sequence(cl.polys)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(nonzero_univariate, min_size=1, max_size=3))
    def test_matches_oracle(self, polys):
        assert as_sequence(stb.restricted_table(polys)) == oracle_sequence(polys)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(nonzero_univariate, min_size=1, max_size=2))
    def test_every_prefix_is_well_formed(self, polys):
        cl = stb.closure(polys)
        tables = incremental(cl)
        for t in tables:
            assert t.check("X") == []
        assert tables[-1] == stb.table_from_closure(cl)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(nonzero_univariate, min_size=1, max_size=3))
    def test_zero_entries_count_distinct_roots(self, polys):
        table = stb.restricted_table(polys)
        for i, p in enumerate(polys):
            zeros = table.row(i).count(0)
            sq = oracles.squarefree(oracles.coeffs_of(p))
            assert zeros == len(oracles.isolate(sq))
            assert zeros <= max(int(p.degree("X")), 0)

    def test_machine_format_round_trip(self):
        table = stb.restricted_table([P1, P2, P3])
        kinds, cols = stb.parse_machine_table(table.to_machine())
        assert kinds == table.kinds and cols == table.columns


class TestExtend:
    def test_new_root_between_sign_change(self):
        cl = stb.closure([P1, P2, P3])
        tables = incremental(cl)
        for k in range(1, len(cl)):
            before, after = tables[k - 1], tables[k]
            if cl.degrees[k] == 0:
                continue
            # every old boundary survives, new ones appear only where the new row vanishes
            old = [c for kind, c in zip(before.kinds, before.columns) if kind == "B"]
            new = [c for kind, c in zip(after.kinds, after.columns) if kind == "B"]
            assert [c[:-1] for c in new if 0 in c[:-1] and any(
                cl.degrees[i] > 0 and c[i] == 0 for i in range(k))] == old
            for c in new:
                if c[:-1] not in old:
                    assert c[-1] == 0

    def test_positive_everywhere_adds_no_boundary(self):
        cl = stb.closure([P("X"), P("X^2 + 1")])
        tables = incremental(cl)
        k = cl.index(P("X^2 + 1"))
        assert tables[k].kinds == tables[k - 1].kinds
        assert tables[k].row(k) == (1,) * len(tables[k].kinds)

    def test_touch_point(self):
        cl = stb.closure([P("X - 1"), P("X^2 - 2*X + 1")])
        tables = incremental(cl)
        k = cl.index(P("X^2 - 2*X + 1"))
        t = tables[k]
        assert t.kinds == tables[k - 1].kinds == ("I", "B", "I")
        assert t.row(k) == (1, 0, 1)

    def test_wrong_prefix_is_rejected(self):
        cl = stb.closure([P("X^2 - 2")])
        with pytest.raises(stb.ClosureInvariantError):
            stb.extend_table(EMPTY, cl, 1)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(nonzero_univariate, min_size=1, max_size=3))
    def test_exact_input_is_never_inconsistent(self, polys):
        try:
            stb.build_sign_table(polys)
        except stb.InconsistentSigns:  # pragma: no cover - the assertion is the point
            pytest.fail("exact signs produced an inconsistent extension")


class TestDecide:
    @pytest.mark.parametrize("text,expected", [
        ("(E X)(X*X = 2)", True),
        ("(E X)(X*X + 1 = 0)", False),
        ("(E X)(X > 0 /\\ X*X*X - 2*X*X - X + 2 < 0 /\\ 4 - X*X > 0)", True),
        ("(E X)(X*X < 0)", False),
        ("(E X)(X = X)", True),
    ])
    def test_examples(self, text, expected):
        assert stb.decide_exists_univariate(fm.parse(text)) is expected

    def test_rejects_multiple_quantifiers(self):
        with pytest.raises(ValueError):
            stb.decide_exists_univariate(fm.parse("(E X)(A Y)(X > Y)"))


class TestComponents:
    @pytest.mark.parametrize("text,expected", [
        ("X*X > 1", 2),
        ("X*X >= 0", 1),
        ("4 - X*X > 0 /\\ X*X*X - 2*X*X - X + 2 > 0", 1),
        ("4 - X*X > 0 /\\ X*X*X - 2*X*X - X + 2 < 0", 2),
        ("X*X < 0", 0),
        ("X*X*X - X = 0", 3),
        ("X*X*X - X >= 0", 2),
    ])
    def test_examples(self, text, expected):
        assert stb.count_components(fm.parse(text)) == expected

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(nonzero_univariate, st.sampled_from(fm.RELATIONS)), min_size=1, max_size=3),
           st.sampled_from(["and", "or"]))
    def test_bound(self, atoms, how):
        from realqe.polynomials import poly_to_term, integral_form
        parts = [fm.Atom(rel, poly_to_term(integral_form(p)), fm.ZERO) for p, rel in atoms]
        f = fm.conj(parts) if how == "and" else fm.disj(parts)
        bound = 1 + sum(max(int(p.degree("X")), 0) for p, _ in atoms)
        assert stb.count_components(f, "X") <= bound
