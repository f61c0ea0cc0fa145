from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from affchar.reference import FIGURE1
from affchar.weights import (Level, admissible_labels, c_coset, c_n, c_super, c_virasoro, central_charges,
                             check_label, classify, ell_split, embedding_condition, h_of_j, hbar_rs, hhat_rs,
                             in_orbit, in_S_irr, in_S_quo, j_rs, kac_quadrants, kac_table, label_of_weight,
                             orbit, render_kac_table, valid_label, weight)

coprime_levels = st.tuples(st.integers(1, 9), st.integers(1, 9)).filter(
    lambda pq: __import__("math").gcd(*pq) == 1).map(lambda pq: Level(*pq))
labels = st.tuples(st.integers(-12, 12), st.integers(-12, 12)).filter(lambda rs: valid_label(*rs))


class TestLevel:
    def test_derived(self):
        lev = Level(2, 3)
        assert lev.t == Fraction(2, 3) and lev.k == Fraction(-4, 3)

    @pytest.mark.parametrize("p,pp", [(2, 4), (0, 3), (3, -1)])
    def test_rejects(self, p, pp):
        with pytest.raises(ValueError):
            Level(p, pp)

    def test_labels(self):
        assert valid_label(1, 0) and valid_label(-2, -1) and valid_label(3, 2)
        assert not valid_label(0, 1) and not valid_label(-1, 0) and not valid_label(2, -1)
        with pytest.raises(ValueError):
            check_label(0, 0)


class TestWeightIdentities:
    @given(coprime_levels, labels)
    def test_negation(self, lev, rs):
        r, s = rs
        a, b = weight(lev, r, s), weight(lev, -r, -s)
        assert b.j == -a.j - 1 and b.h == a.h
        assert a.h == h_of_j(lev, a.j)

    @given(coprime_levels, labels, st.integers(-3, 3))
    def test_periodicity(self, lev, rs, ell):
        r, s = rs
        assert j_rs(lev, r, s) == j_rs(lev, r + ell * lev.p, s + ell * lev.pp)

    @given(coprime_levels, st.integers(-8, 8), st.integers(-8, 8))
    def test_virasoro_duality(self, lev, r, s):
        t = lev.t
        assert hbar_rs(1 / t, r, s) == hbar_rs(t, s, r)
        assert c_virasoro(1 / t) == c_virasoro(t)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("t", [Fraction(2, 3), Fraction(3, 2), Fraction(5, 3), Fraction(1, 4), Fraction(7, 5)])
    def test_coset_central_charge(self, n, t):
        assert c_coset(t, n) == c_n(t / (t + n), n)

    def test_coset_specializations(self):
        t = Fraction(3, 5)
        assert c_n(t, 1) == c_virasoro(t)
        assert c_n(t, 2) == c_super(t)

    @given(coprime_levels, st.integers(-8, 8), st.integers(-8, 8))
    def test_hhat_parity(self, lev, r, s):
        t = lev.t
        parity = hhat_rs(t, r, s) - hbar_rs(t, r, s) / 2
        assert parity in (0, Fraction(1, 16))
        assert (parity == 0) == ((r + s) % 2 == 0)

    def test_central_charges(self):
        assert central_charges(Level(2, 3)) == {"c": -6, "cbar": 0, "chat": 1}
        assert central_charges(Level(3, 4))["cbar"] == Fraction(1, 2)


class TestLabelsAndOrbits:
    @given(coprime_levels, labels)
    def test_label_of_weight_is_a_preimage(self, lev, rs):
        j = j_rs(lev, *rs)
        r, s = label_of_weight(lev, j)
        assert j_rs(lev, r, s) == j and 0 <= r < lev.p

    def test_off_lattice(self):
        assert label_of_weight(Level(2, 3), Fraction(1, 5)) is None

    @given(coprime_levels, st.integers(-20, 20), st.integers(-20, 20))
    def test_ell_split(self, lev, r, s):
        r0, s0, ell, ellp = ell_split(lev, r, s)
        assert r == r0 + ell * lev.p and s == s0 + ellp * lev.pp
        assert 0 <= r0 < lev.p and 0 <= s0 < lev.pp

    def test_admissible_labels(self):
        assert admissible_labels(Level(3, 2)) == [(1, 0), (1, 1), (2, 0), (2, 1)]

    def test_orbit(self):
        lev = Level(2, 3)
        o = orbit(lev, 0, 2)
        assert Fraction(2, 3) in o["orbit"] and Fraction(-1) in o["orbit"]
        assert all(in_orbit(lev, 0, x) for x in o["orbit"])
        assert all((x - 0).denominator == 1 for x in o["sub_orbit"])

    def test_embedding(self):
        lev = Level(2, 3)
        # J-_0 |0> spans the singular vector of weight -1 in V_0
        assert embedding_condition(lev, 0, -1)
        assert not embedding_condition(lev, -1, 0)
        with pytest.raises(ValueError):
            embedding_condition(lev, 0, Fraction(1, 3))

    def test_classify(self):
        lev = Level(2, 3)
        assert classify(lev, 2, 0) == {"in_S_irr": True, "in_S_quo": True, "quasi_integrable": True}
        assert classify(lev, 1, 1)["quasi_integrable"] is False
        assert not in_S_quo(lev, 5, 5) and in_S_irr(lev, -4, -3) and not in_S_irr(lev, -4, -4)


# Rows of the published tables, typed in here independently of
# affchar.reference so that a transcription slip in either place shows up.
LITERAL_23_UPPER = {
    0: "0 1/2 1 3/2 2 5/2", 1: "-1/3 1/6 2/3 7/6 5/3 13/6", 2: "-2/3 -1/6 1/3 5/6 4/3 11/6",
    3: "-1 -1/2 0 1/2 1 3/2", 4: "-4/3 -5/6 -1/3 1/6 2/3 7/6", 5: "-5/3 -7/6 -2/3 -1/6 1/3 5/6",
}
LITERAL_23_LOWER = {
    -1: "-19/6 -8/3 -13/6 -5/3 -7/6 -2/3", -2: "-17/6 -7/3 -11/6 -4/3 -5/6 -1/3",
    -3: "-5/2 -2 -3/2 -1 -1/2 0", -4: "-13/6 -5/3 -7/6 -2/3 -1/6 1/3", -5: "-11/6 -4/3 -5/6 -1/3 1/6 2/3",
}
LITERAL_32_UPPER = {
    0: "0 1/2 1 3/2 2 5/2", 1: "-3/4 -1/4 1/4 3/4 5/4 7/4", 2: "-3/2 -1 -1/2 0 1/2 1",
    3: "-9/4 -7/4 -5/4 -3/4 -1/4 1/4", 4: "-3 -5/2 -2 -3/2 -1 -1/2", 5: "-15/4 -13/4 -11/4 -9/4 -7/4 -5/4",
}
LITERAL_32_LOWER = {
    -1: "-11/4 -9/4 -7/4 -5/4 -3/4 -1/4", -2: "-2 -3/2 -1 -1/2 0 1/2", -3: "-5/4 -3/4 -1/4 1/4 3/4 5/4",
    -4: "-1/2 0 1/2 1 3/2 2", -5: "1/4 3/4 5/4 7/4 9/4 11/4",
}


def _parse(rows):
    return {s: [Fraction(x) for x in line.split()] for s, line in rows.items()}


@pytest.mark.parametrize("pq,upper,lower", [((2, 3), LITERAL_23_UPPER, LITERAL_23_LOWER),
                                            ((3, 2), LITERAL_32_UPPER, LITERAL_32_LOWER)])
class TestLiteralKacTables:
    def test_reference_transcription(self, pq, upper, lower):
        assert FIGURE1[pq]["upper"] == _parse(upper)
        assert FIGURE1[pq]["lower"] == _parse(lower)

    def test_generated_tables(self, pq, upper, lower):
        lev = Level(*pq)
        up, lo = kac_quadrants(lev, 6, -5, 5)
        got_up = {s: [e.j for e in up if e.s == s] for s in range(6)}
        got_lo = {s: [e.j for e in lo if e.s == s] for s in range(-1, -6, -1)}
        assert got_up == _parse(upper) and got_lo == _parse(lower)
        marks = {(e.r, e.s) for e in up + lo if e.irreducible}
        assert marks == FIGURE1[pq]["irreducible"]
        assert {(e.r, e.s) for e in up + lo if e.admissible} == FIGURE1[pq]["admissible"]


def test_kac_table_skips_invalid_labels():
    entries = kac_table(Level(2, 3), range(-1, 2), range(-1, 2))
    assert {(e.r, e.s) for e in entries} == {(-1, -1), (1, 0), (1, 1)}


def test_render_marks():
    txt = render_kac_table(Level(2, 3), 2, -1, 1)
    assert "[0]" in txt and "1/2*" in txt
