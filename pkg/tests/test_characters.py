from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from affchar.characters import (SuperChar, admissible_closed, canonical_label, decomposition_closed,
                                integer_level_char, integer_level_from_strings, irr_branch, irr_char,
                                irr_closed, irr_closed_canonical, irr_from_vermas, kac_char,
                                kac_char_from_vermas, kac_closed, kac_decompose, leading_exponent,
                                minimal_model_closed, n2_product_form, staggered_char, staggered_closed,
                                string_function, string_function_from_character, string_lead,
                                superconformal_kac_char, verma_char, virasoro_kac_char)
from affchar.series import QSeries
from affchar.structure import staggered_descriptor
from affchar.theta import eta, varphi
from affchar.weights import Level, admissible_labels, j_rs, valid_label

WINDOW = (-8, 8)
ORDER = 6
LEVELS3 = (Level(2, 3), Level(3, 2), Level(5, 3))


def labels(level, rmul=2, smul=2):
    for r in range(-rmul * level.p, rmul * level.p + 1):
        for s in range(-smul * level.pp, smul * level.pp + 1):
            if valid_label(r, s):
                yield r, s


def top(level, r, s, order=ORDER):
    return leading_exponent(level, j_rs(level, r, s)) + order


class TestVerma:
    @pytest.mark.parametrize("j", [Fraction(-2, 3), Fraction(0), Fraction(5, 7), Fraction(-9, 4)])
    def test_coefficients_are_partition_like(self, j):
        lev = Level(2, 3)
        ch = verma_char(lev, j, 6, (-10, 10))
        for qe, ze, c in ch.terms():
            assert c > 0 and Fraction(c).denominator == 1
        # fixed charge: a power series starting at grade 0 or later
        lead = leading_exponent(lev, j)
        for _, ze, _ in ch.terms():
            assert (ze + j).denominator == 1
        assert ch.coeff(lead, -j) == 1

    def test_first_grades(self):
        lev = Level(2, 3)
        j = Fraction(-2, 3)
        ch = verma_char(lev, j, 2, (-6, 6))
        lead = leading_exponent(lev, j)
        # grade 0: J-_0^n |j>, charge -n <-> z^{-j+n}
        assert [ch.coeff(lead, -j + n) for n in range(4)] == [1, 1, 1, 1]
        # charge Q sits at z^{-j-Q}
        # grade 1, Q = 0: J3_{-1}, J+_{-1} J-_0
        assert ch.coeff(lead + 1, -j) == 2
        # grade 1, Q = 1: J+_{-1}
        assert ch.coeff(lead + 1, -j - 1) == 1
        # grade 1, Q = -1: J-_{-1}, J3_{-1} J-_0, J+_{-1} J-_0^2
        assert ch.coeff(lead + 1, -j + 1) == 3


class TestClosedFormsAgainstVermas:
    @pytest.mark.parametrize("level", LEVELS3, ids=str)
    def test_kac(self, level):
        for r, s in labels(level):
            a = kac_char(level, r, s, ORDER, WINDOW)
            b = kac_char_from_vermas(level, r, s, top(level, r, s), WINDOW)
            assert a.agrees(b), (r, s)

    @pytest.mark.parametrize("level", LEVELS3, ids=str)
    def test_irreducible(self, level):
        for r, s in labels(level):
            a = irr_char(level, r, s, ORDER, WINDOW)
            b = irr_from_vermas(level, r, s, top(level, r, s), WINDOW)
            assert a.agrees(b), (r, s)

    @pytest.mark.parametrize("level", LEVELS3, ids=str)
    def test_canonical_families(self, level):
        seen = set()
        for r, s in labels(level, 3, 3):
            seen.add(irr_branch(level, r, s)[0])
            T = top(level, r, s)
            a = irr_closed(level, r, s).expand(T, WINDOW)
            b = irr_closed_canonical(level, r, s).expand(T, WINDOW)
            assert a.agrees(b), (r, s)
        assert seen == {"upper", "upper_edge", "lower", "lower_edge"}

    @pytest.mark.parametrize("level", LEVELS3, ids=str)
    def test_admissible(self, level):
        for r0, s0 in admissible_labels(level):
            T = top(level, r0, s0)
            assert admissible_closed(level, r0, s0).expand(T, WINDOW).agrees(
                irr_char(level, r0, s0, ORDER, WINDOW))

    def test_admissible_label_check(self):
        with pytest.raises(ValueError):
            admissible_closed(Level(2, 3), 2, 0)


class TestDecomposition:
    @pytest.mark.parametrize("level", (Level(2, 3), Level(3, 2)), ids=str)
    def test_kac_equals_sum_of_irreducibles(self, level):
        for r, s in labels(level, 3, 3):
            T = top(level, r, s)
            assert kac_closed(level, r, s).expand(T, WINDOW).agrees(
                decomposition_closed(level, r, s).expand(T, WINDOW)), (r, s)

    def test_examples(self):
        lev = Level(2, 3)
        assert kac_decompose(lev, 2, 0) == [((2, 0), 1)]
        assert kac_decompose(lev, 3, 2) == [((3, 2), 1), ((5, 2), 1)]
        assert len(kac_decompose(lev, 5, 4)) == 6

    @given(st.integers(-12, 12), st.integers(-12, 12))
    def test_canonical_label_keeps_weight(self, r, s):
        lev = Level(2, 3)
        rc, sc = canonical_label(lev, r, s)
        assert j_rs(lev, rc, sc) == j_rs(lev, r, s)
        assert (rc >= 1 and 0 <= sc < lev.pp) or (rc <= -lev.p and -lev.pp <= sc <= -1)


class TestStaggeredCharacters:
    def test_sum_of_irreducibles(self):
        lev = Level(2, 3)
        for conj, params in [(1, (1, 0, 1)), (2, (1, 1, 2)), (3, (2, 1))]:
            for d in staggered_descriptor(lev, conj, params):
                cf = staggered_closed(lev, d)
                T = cf.lowest() + 4
                acc = None
                for lab, m in d.character_terms:
                    term = irr_closed(lev, *canonical_label(lev, *lab)).expand(T, WINDOW).scale(m)
                    acc = term if acc is None else acc + term
                assert staggered_char(lev, d, T, WINDOW).agrees(acc)


class TestStringFunctions:
    def test_level_one(self):
        c = string_function(1, 0, 0, q_max=40)
        prod = c * eta(c.top + Fraction(1, 24))
        assert prod.agrees(QSeries.one(40))

    @pytest.mark.parametrize("lm", [(0, 0), (2, 2), (2, 0), (0, 2), (1, 1)])
    def test_level_two_products(self, lm):
        l, m = lm
        c = string_function(2, l, m, q_max=20)
        assert c.agrees(n2_product_form(l, m, c.top))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_symmetry_over_domain(self, n):
        for l in range(n + 1):
            for m in range(-2 * n, 2 * n + 1):
                if (l - m) % 2:
                    continue
                c = string_function(n, l, m, q_max=6)
                d = string_function_from_character(n, l, m, c.top)
                assert c.agrees(d), (n, l, m)
                assert c.agrees(string_function(n, n - l, n - m, q_top=c.top))
                assert c.agrees(string_function(n, l, -m, q_top=c.top))
                assert c.agrees(string_function(n, l, m + 2 * n, q_top=c.top))

    def test_lead(self):
        assert string_lead(1, 0, 0) == Fraction(-1, 24)

    @pytest.mark.parametrize("n,rho", [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2)])
    def test_integer_level_from_strings(self, n, rho):
        a = integer_level_char(n, rho, 6, (-5, 5))
        b = integer_level_from_strings(n, rho, a.q_top, (-5, 5))
        assert a.agrees(b)


class TestVirasoroAndSuper:
    def test_virasoro_kac(self):
        ch = virasoro_kac_char(3, 4, 1, 1, 6)
        # q^{-1/48}(1-q)/φ(q)
        want = varphi(8).inverse() * QSeries.from_terms({0: 1, 1: -1}, 8, shift=0)
        assert ch.agrees(want.mul_monomial(Fraction(-1, 48)))

    def test_ising_vacuum(self):
        ch = minimal_model_closed(3, 4, 1, 1).expand_q(Fraction(-1, 48) + 8)
        coeffs = [ch.coeff(Fraction(-1, 48) + i) for i in range(9)]
        assert coeffs == [1, 0, 1, 1, 2, 2, 3, 3, 5]
        # s0 = 0 is the degenerate zero character
        assert minimal_model_closed(3, 4, 1, 0).expand_q(4).is_zero()

    def test_super_sectors(self):
        ns = superconformal_kac_char(3, 5, 1, 1, 4)
        r = superconformal_kac_char(3, 5, 1, 2, 4)
        assert isinstance(ns, SuperChar) and ns.sector == "NS" and r.sector == "R"
        assert r.P(0).agrees(r.P(1))
        assert (ns.P(0).shift - ns.P(1).shift) % 1 == Fraction(1, 2)

    def test_super_kac_needs_positive_labels(self):
        with pytest.raises(ValueError):
            superconformal_kac_char(3, 5, 0, 1)
