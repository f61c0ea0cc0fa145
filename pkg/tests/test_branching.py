from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import affchar.branching as B
from affchar.acceptance import random_branching_keys, staggered_descriptors
from affchar.branching import (BranchingKey, HalfSeries, branching_alt, branching_function, h_relations,
                               kappa_of, staggered_branch, superconformal_branch, verify_branching,
                               virasoro_branch_check)
from affchar.series import QSeries
from affchar.weights import Level

from conftest import LEVELS


def parity_sigma(r, s, n, rho, base=1):
    """Smallest sigma >= base with the parity the key demands."""
    sigma = base
    while (sigma - r - n * s - rho + 1) % 2:
        sigma += 1
    return sigma


class TestKeys:
    def test_parity_enforced(self):
        with pytest.raises(ValueError):
            BranchingKey(Level(2, 3), 1, 1, 1, 1, 1)
        BranchingKey(Level(2, 3), 1, 1, 1, 1, 2)

    @pytest.mark.parametrize("args", [(0, 1, 1, 1, 2), (1, 1, 1, 3, 2), (1, -1, 1, 1, 2), (-1, 0, 1, 1, 2),
                                      (1, 1, 1, 1, -2)])
    def test_invalid(self, args):
        r, s, n, rho, sigma = args
        with pytest.raises(ValueError):
            BranchingKey(Level(2, 3), n, r, s, rho, sigma)

    def test_negative_representative(self):
        k = BranchingKey(Level(2, 3), 1, -1, -1, 1, -2)
        assert k.positive == BranchingKey(Level(2, 3), 1, 1, 1, 1, 2)


class TestDualRoute:
    @given(st.sampled_from(LEVELS), st.integers(1, 2), st.integers(1, 4), st.integers(0, 3),
           st.integers(1, 3), st.integers(1, 6))
    def test_string_route_equals_h_route(self, level, n, r, s, rho, sigma):
        rho = min(rho, n + 1)
        sigma = parity_sigma(r, s, n, rho, sigma)
        key = BranchingKey(level, n, r, s, rho, sigma)
        a = branching_function(key, q_max=6)
        b = branching_alt(key, q_top=a.top)
        assert a.agrees(b)

    @pytest.mark.parametrize("key", random_branching_keys(8), ids=lambda k: str(k.to_json()))
    def test_random_keys(self, key):
        a = branching_function(key, q_max=8)
        assert a.agrees(branching_alt(key, q_top=a.top))

    @pytest.mark.parametrize("r,s", [(1, 1), (2, 1), (3, 2)])
    def test_negative_sector(self, r, s):
        lev = Level(2, 3)
        sigma = parity_sigma(r, s, 1, 1)
        neg = BranchingKey(lev, 1, -r, -s, 1, -sigma)
        pos = BranchingKey(lev, 1, r, s, 1, sigma)
        a = branching_alt(neg, q_max=8)
        assert a.agrees(branching_function(pos, q_top=a.top))


class TestHRelations:
    @pytest.mark.parametrize("n,r,s,rho", [(1, 1, 1, 1), (1, 2, 1, 2), (2, 1, 2, 1), (2, 2, 1, 2), (2, 3, 1, 3)])
    def test_sums_and_reflection(self, n, r, s, rho):
        out = h_relations(n, r, s, rho, 2, 6)
        assert all(out.values()), out
        assert ("integer_sum" in out) == (kappa_of(n, r, s, rho) == 0)


class TestBranchingRule:
    @pytest.mark.parametrize("r,s,rho", [(1, 0, 1), (1, 1, 2), (3, 2, 1), (-1, -1, 1), (-3, -2, 2)])
    def test_identity_n1(self, r, s, rho):
        rep = verify_branching(Level(2, 3), 1, r, s, rho, q_max=6)
        assert rep.ok and rep.compared > 0

    @pytest.mark.parametrize("r,s,rho", [(2, 1, 1), (1, 3, 3), (-2, -1, 2)])
    def test_identity_n2(self, r, s, rho):
        assert verify_branching(Level(3, 2), 2, r, s, rho, q_max=5).ok

    def test_detects_perturbed_branching_function(self, monkeypatch):
        real = B.branching_function

        def broken(key, q_max=None, q_top=None):
            b = real(key, q_max, q_top)
            if b.is_zero():
                return b
            e, c = next(iter(b.terms()))
            bump = QSeries.from_terms({e + 1: 1}, b.top, shift=b.shift)
            return b + bump if e + 1 <= b.top else b

        monkeypatch.setattr(B, "branching_function", broken)
        rep = verify_branching(Level(2, 3), 1, 1, 1, 1, q_max=6)
        assert not rep.ok and rep.first_difference is not None

    def test_report_json(self):
        d = verify_branching(Level(2, 3), 1, 1, 1, 1, q_max=4).to_json()
        assert d["ok"] is True and d["q_top"].count("/") == 1


class TestVirasoroCoset:
    @pytest.mark.parametrize("level", LEVELS, ids=str)
    def test_n1_is_virasoro_kac(self, level):
        for r in range(1, 5):
            for s in range(0, 4):
                for rho in (1, 2):
                    sigma = parity_sigma(r, s, 1, rho)
                    for sg in (sigma, sigma + 2):
                        assert virasoro_branch_check(BranchingKey(level, 1, r, s, rho, sg), q_max=6)

    def test_needs_n1(self):
        with pytest.raises(ValueError):
            virasoro_branch_check(BranchingKey(Level(2, 3), 2, 1, 1, 1, 2))


class TestSuperconformal:
    @pytest.mark.parametrize("r,s,rho,sigma", [(1, 0, 1, 1), (2, 1, 1, 2), (1, 1, 2, 2), (3, 2, 3, 1),
                                               (2, 3, 2, 1)])
    def test_sum_rule(self, r, s, rho, sigma):
        out = superconformal_branch(Level(3, 2), r, s, rho, sigma, q_max=6)
        assert out.ok, out.checks

    def test_sector_parity(self):
        with pytest.raises(ValueError):
            superconformal_branch(Level(3, 2), 1, 0, 2, 1, q_max=4)

    def test_half_series_arithmetic(self):
        a = HalfSeries.from_q(QSeries(Fraction(1, 2), [1, 2, 3]))
        assert (a - a).cap(a.top).agrees(HalfSeries.from_q(QSeries.zero(a.top, Fraction(1, 2))))


class TestStaggeredBranching:
    @pytest.mark.parametrize("desc", list(staggered_descriptors(Level(2, 3), 1)), ids=lambda d: d.name)
    def test_level_23(self, desc):
        for rho in (1, 2):
            rep = staggered_branch(Level(2, 3), desc, rho, q_max=4)
            assert rep.ok, rep.to_json()

    def test_rho_range(self):
        desc = next(staggered_descriptors(Level(2, 3), 1))
        with pytest.raises(ValueError):
            staggered_branch(Level(2, 3), desc, 3)
