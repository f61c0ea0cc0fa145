from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from affchar.series import BiSeries, QSeries, flip_z, mul
from affchar.theta import (Fn, R_ell, R_ell_defining, ThetaSpec, eta, eta_affine, eta_affine_inverse,
                           eta_cubed_inverse, eta_inverse, fm, fm_alt, kac_peterson_check, sum_fm, theta,
                           theta_specialized, varphi, varphi3_alt, varphi_pow, varphi_qz)

ORDER = 20


def th(n, m, nu=0, flip=False):
    s = theta(ThetaSpec(n, m, nu), ORDER)
    return flip_z(s) if flip else s


def shifted(n, m, nu):
    """Index n' with Θ_{n,m;-ν} = Θ_{n',m;ν}.  The printed shift n - 2(ν+1)m is
    right for ν >= 0; for ν < 0 the definition forces n - 2(ν-1)m."""
    return n - 2 * (nu + 1) * m if nu >= 0 else n - 2 * (nu - 1) * m


def grid():
    for m in range(1, 7):
        for n in range(-2 * m, 2 * m + 1):
            yield n, m


GRID = list(grid())


class TestThetaSymmetries:
    @pytest.mark.parametrize("n,m", GRID)
    def test_periodicity_and_reflection(self, n, m):
        base = th(n, m)
        for i in (-1, 0, 1, 2):
            assert base.agrees(th(2 * i * m + n, m))
            assert base.agrees(th(2 * i * m - n, m, flip=True))

    @pytest.mark.parametrize("n,m", GRID)
    def test_reduced_relations(self, n, m):
        for nu in range(-2, 3):
            lhs = th(n, m, -nu)
            assert lhs.agrees(th(-n, m, nu, flip=True))
            assert lhs.agrees(th(shifted(n, m, nu), m, nu))

    @pytest.mark.parametrize("nu", [-1, -2])
    def test_printed_shift_fails_for_negative_nu(self, nu):
        # kept as a record: the uncorrected index drops the wrong lattice points
        assert not th(1, 2, -nu).agrees(th(1 - 2 * (nu + 1) * 2, 2, nu))

    @pytest.mark.parametrize("n,m", GRID)
    def test_specialized_relations(self, n, m):
        def sp(n_, nu=0):
            return theta_specialized(ThetaSpec(n_, m, nu), ORDER)
        for nu in range(-2, 3):
            assert sp(n, -nu).agrees(sp(-n, nu))
            assert sp(n, -nu).agrees(sp(shifted(n, m, nu), nu))
        for i in (-1, 1):
            assert sp(n).agrees(sp(2 * i * m + n)) and sp(n).agrees(sp(2 * i * m - n))

    def test_specialization_matches_z_equals_one(self):
        for n, m in [(1, 2), (3, 5), (-2, 3)]:
            for nu in (-1, 0, 2):
                a = theta(ThetaSpec(n, m, nu), ORDER).specialize_z1()
                assert a.agrees(theta_specialized(ThetaSpec(n, m, nu), ORDER))

    def test_reduction_removes_terms(self):
        full = theta_specialized(ThetaSpec(1, 2), ORDER)
        red = theta_specialized(ThetaSpec(1, 2, 2), ORDER)
        # l = 1 + 1/4 and l = 2 + 1/4 give q^{25/8} and q^{81/8}
        diff = full - red
        assert {e: c for e, c in diff.terms()} == {Fraction(25, 8): 1, Fraction(81, 8): 1}

    def test_rescaled_argument(self):
        s = theta(ThetaSpec(1, 6, 0, 3), 10)
        plain = theta(ThetaSpec(1, 6), 10)
        assert sorted(s.terms()) == sorted((qe, ze / 3, c) for qe, ze, c in plain.terms())
        with pytest.raises(ValueError):
            theta(ThetaSpec(1, 2, 0, 3), 10)


class TestKacPeterson:
    @pytest.mark.parametrize("n,m,n2,m2", [(1, 1, 0, 1), (1, 2, 1, 1), (0, 2, 3, 3), (2, 3, -1, 1), (1, 1, 1, 2)])
    def test_product_formula(self, n, m, n2, m2):
        assert kac_peterson_check(n, m, n2, m2, 12)["equal"]

    @given(st.integers(-3, 3), st.integers(1, 3), st.integers(-3, 3), st.integers(1, 3))
    def test_swap_symmetry(self, n, m, n2, m2):
        a = kac_peterson_check(n, m, n2, m2, 8)
        b = kac_peterson_check(n2, m2, n, m, 8)
        assert a["equal"] == b["equal"] is True


class TestEulerProducts:
    def test_varphi_matches_product(self):
        prod = QSeries.one(40)
        for i in range(1, 41):
            prod = prod * QSeries.from_terms({0: 1, i: -1}, 40, shift=0)
        assert varphi(40).agrees(prod)

    def test_square_and_cube(self):
        v = varphi(40)
        assert varphi_pow(2, 40).agrees(v * v)
        assert varphi_pow(3, 40).agrees(v * v * v)
        assert varphi3_alt(40).agrees(varphi_pow(3, 40))

    def test_eta_inverses(self):
        top = Fraction(20)
        assert (eta(top) * eta_inverse(top)).agrees(QSeries.one(19))
        e3 = eta(top) * eta(top) * eta(top)
        assert (e3 * eta_cubed_inverse(top)).agrees(QSeries.one(19))

    def test_triple_product_theta_form(self):
        rhs = (th(1, 2) - th(-1, 2)).mul_monomial(Fraction(-1, 8), Fraction(1, 2))
        lhs = varphi_qz(ORDER)
        top = min(lhs.q_top, rhs.q_top)
        assert lhs.restrict(top).agrees(rhs.restrict(top))

    def test_triple_product_reflection(self):
        v = varphi_qz(ORDER)
        assert v.agrees(flip_z(v).mul_monomial(0, 1, -1))
        e = eta_affine(ORDER)
        assert e.agrees(flip_z(e).scale(-1))


class TestReciprocalMachinery:
    def test_sum_of_f_m(self):
        assert sum_fm(30).agrees(QSeries.one(30))

    @pytest.mark.parametrize("m", range(-6, 7))
    def test_f_m_two_routes(self, m):
        assert fm(m, 30).agrees(fm_alt(m, 30))

    @pytest.mark.parametrize("ell", range(1, 7))
    def test_R_ell(self, ell):
        want = varphi_pow(3, 30).scale(-1) if ell == 1 else QSeries.zero(30)
        assert R_ell(ell, 30).agrees(want)
        assert R_ell_defining(ell, 30).agrees(want)

    @pytest.mark.parametrize("ell", range(-4, 7))
    def test_R_ell_reflection(self, ell):
        assert R_ell_defining(ell, 20).agrees(R_ell_defining(1 - ell, 20).scale(-1))

    def test_F_partial_sums(self):
        assert list(Fn(1, 5).coeffs) == [1, -1, 0, 0, 0, 0]
        assert list(Fn(None, 10).coeffs) == [1, -1, 0, 1, 0, 0, -1, 0, 0, 0, 1]

    def test_affine_eta_inverse(self):
        prod = mul(eta_affine(12), eta_affine_inverse(12, (-10, 10)))
        for q in range(12):
            for z in range(-5, 6):
                assert prod.coeff(q, z) == (1 if (q, z) == (0, 0) else 0)
