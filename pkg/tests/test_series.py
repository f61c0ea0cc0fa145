import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from affchar.series import (BiSeries, NotAUnit, QSeries, WindowError, flip_z, invert_unit, mul,
                            rat_str, specialize_z1)
from affchar.theta import reciprocal_varphi_qz, varphi, varphi_qz

PARTITIONS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176]


def expand_product(factors, q_top):
    """Direct expansion of prod (1 + c q^a z^b) as a dict, dropping q > q_top."""
    acc = {(0, 0): Fraction(1)}
    for c, a, b in factors:
        nxt = dict(acc)
        for (qe, ze), v in acc.items():
            if qe + a <= q_top:
                nxt[(qe + a, ze + b)] = nxt.get((qe + a, ze + b), 0) + c * v
        acc = {k: v for k, v in nxt.items() if v}
    return acc


def poly(factor, q_top):
    c, a, b = factor
    return BiSeries.polynomial([(0, 0, 1), (a, b, c)], q_top)


factor = st.tuples(st.sampled_from([1, -1, 2, Fraction(1, 2)]), st.integers(1, 4), st.integers(-3, 3))


class TestQSeries:
    def test_partition_numbers(self):
        inv = varphi(15).inverse()
        assert list(inv.coeffs) == PARTITIONS

    def test_truncation_is_tracked(self):
        s = QSeries.from_terms({Fraction(1, 3): 2, Fraction(7, 3): 1}, Fraction(10, 3))
        assert s.shift == Fraction(1, 3) and s.top == Fraction(10, 3)
        assert s.coeff(Fraction(7, 3)) == 1
        with pytest.raises(WindowError):
            s.coeff(Fraction(13, 3))

    def test_product_window_is_minimum(self):
        a = QSeries(0, [1, 1, 1, 1])
        b = QSeries(0, [1, -1])
        assert (a * b).q_max == 1

    def test_zero_is_exact(self):
        z = QSeries.zero(5)
        assert z.is_zero() and z.top == 5

    def test_inverse_shifts_leading_power(self):
        inv = QSeries(0, [0, 1, 2]).inverse()
        assert inv.shift == -1 and list(inv.coeffs) == [1, -2]

    def test_zero_is_not_invertible(self):
        with pytest.raises(NotAUnit):
            QSeries.zero(3).inverse()


class TestBiSeriesExactness:
    @given(st.lists(factor, min_size=1, max_size=4), st.integers(2, 8))
    def test_products_match_direct_expansion(self, factors, q_top):
        acc = None
        for f in factors:
            p = poly(f, q_top)
            acc = p if acc is None else mul(acc, p)
        want = expand_product(factors, q_top)
        for qe, ze, c in acc.terms():
            assert want.get((qe, ze), 0) == c
        for (qe, ze), c in want.items():
            assert acc.coeff(qe, ze) == c

    @given(st.lists(factor, min_size=1, max_size=3), st.integers(3, 7))
    def test_inverse_of_unit(self, factors, q_top):
        acc = None
        for f in factors:
            p = poly(f, q_top)
            acc = p if acc is None else mul(acc, p)
        inv = invert_unit(acc, z_hi=6)
        prod = mul(acc, inv)
        assert prod.q_top >= q_top
        lo, hi = max(prod.z_lo, -6), min(prod.z_hi, 6)
        for q in range(q_top + 1):
            for z in range(int(lo), int(hi) + 1):
                assert prod.coeff(q, z) == (1 if (q, z) == (0, 0) else 0)

    @given(factor, factor, factor)
    def test_associative_and_distributive(self, f1, f2, f3):
        a, b, c = (poly(f, 6) for f in (f1, f2, f3))
        assert mul(mul(a, b), c).agrees(mul(a, mul(b, c)))
        assert mul(a, b + c).agrees(mul(a, b) + mul(a, c))

    @given(factor, factor, st.sampled_from([1, -2, Fraction(3, 4)]))
    def test_flip_and_specialize_are_linear(self, f1, f2, lam):
        a, b = poly(f1, 5), poly(f2, 5)
        combo = a + b.scale(lam)
        assert flip_z(combo).agrees(flip_z(a) + flip_z(b).scale(lam))
        assert specialize_z1(combo).agrees(specialize_z1(a) + specialize_z1(b).scale(lam))

    def test_flip_is_an_involution(self):
        s = varphi_qz(6)
        assert flip_z(flip_z(s)).agrees(s)

    def test_open_windows_refuse_extension(self):
        s = BiSeries.from_terms([(0, z, 1) for z in range(-20, 21)], 0, -5, 5)
        assert not s.lo_closed and not s.hi_closed
        with pytest.raises(WindowError):
            s.coeff(0, 6)
        with pytest.raises(WindowError):
            s.restrict(None, -8, 0)

    def test_opposite_open_directions_rejected(self):
        up = BiSeries.from_terms([(0, z, 1) for z in range(0, 40)], 3, 0, 10)
        down = flip_z(up)
        with pytest.raises(WindowError):
            mul(up, down)

    def test_non_unit(self):
        with pytest.raises(NotAUnit):
            invert_unit(BiSeries(0, 0, 4, 0, 0, {}, True, True))
        with pytest.raises(WindowError):
            invert_unit(BiSeries.from_terms([(0, z, 1) for z in range(10)], 2, 0, 4))

    def test_fractional_shifts(self):
        s = BiSeries.monomial(Fraction(1, 8), Fraction(-1, 2), 3, q_max=2)
        assert s.q_shift == Fraction(1, 8) and s.z_shift == Fraction(1, 2)
        assert s.coeff(Fraction(1, 8), Fraction(-1, 2)) == 3
        for qe, ze, _ in mul(s, varphi_qz(4)).terms():
            assert (ze - Fraction(1, 2)).denominator == 1


class TestReciprocal:
    def test_reciprocal_equals_unit_inversion(self):
        rec = reciprocal_varphi_qz(8, (-8, 8))
        inv = invert_unit(varphi_qz(8), z_hi=8)
        top = min(rec.q_top, inv.q_top)
        for q in range(int(top) + 1):
            for z in range(-8, 9):
                try:
                    b = inv.coeff(q, z)
                except WindowError:
                    continue
                assert rec.coeff(q, z) == b

    def test_reciprocal_is_exact_inverse(self):
        prod = mul(varphi_qz(12), reciprocal_varphi_qz(12, (-20, 20)))
        for q in range(13):
            for z in range(-8, 9):
                assert prod.coeff(q, z) == (1 if (q, z) == (0, 0) else 0)


class TestSerialization:
    def test_rat_str(self):
        assert rat_str(Fraction(-3, 4)) == "-3/4"
        assert rat_str(2) == "2/1"

    def test_bi_series_json_round_trip(self):
        s = mul(varphi_qz(5), BiSeries.monomial(Fraction(1, 3), Fraction(1, 2)))
        data = json.loads(json.dumps(s.to_json()))
        assert set(data) == {"q_shift", "z_shift", "q_max", "z_min", "z_max", "rows"}
        back = BiSeries.from_json(data)
        assert list(back.terms()) == list(s.terms())

    def test_q_series_json(self):
        d = QSeries(Fraction(-1, 24), [1, -1, -1]).to_json()
        assert d == {"q_shift": "-1/24", "q_max": 2, "coeffs": [[0, "1/1"], [1, "-1/1"], [2, "-1/1"]]}
