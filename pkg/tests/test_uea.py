import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from affchar import reference
from affchar.characters import leading_exponent, verma_char
from affchar.uea import (EXAMPLES, OPERATOR_IDENTITIES, Module, StaggeredExample, UEAElement, check_identity,
                         compare_displayed, dagger_gen, displayed_module, find_singular, gen, hw, normal_order,
                         normal_order_random, normalize, parse_word, proportionality, singular_vector,
                         staggered_solve, vec_scale, weight_space_basis, word_str)
from affchar.weights import Level, h_of_j, j_rs

from conftest import LEVELS

K = Fraction(-4, 3)

gens_st = st.tuples(st.sampled_from("3+-"), st.integers(-2, 2)).map(lambda t: gen(*t))


def el(gens, k=K):
    return UEAElement.from_products([(1, list(gens))], k)


class TestNormalOrdering:
    def test_random_resolution_is_confluent(self):
        rng = random.Random(20240601)
        for _ in range(100):
            n = rng.randint(2, 5)
            word = [gen(rng.choice("3+-"), rng.randint(-2, 2)) for _ in range(n)]
            k = rng.choice([K, Fraction(0), Fraction(5, 2)])
            assert normal_order_random(word, k, rng) == normal_order([(1, word)], k), word_str(tuple(word))

    @given(st.lists(gens_st, min_size=1, max_size=4), st.lists(gens_st, min_size=1, max_size=3))
    def test_product_is_associative_with_concatenation(self, a, b):
        assert el(a) * el(b) == el(a + b)

    @given(st.lists(gens_st, min_size=1, max_size=4), st.lists(gens_st, min_size=1, max_size=3))
    def test_dagger_is_an_anti_automorphism(self, a, b):
        x, y = el(a), el(b)
        assert (x * y).dagger() == y.dagger() * x.dagger()
        assert x.dagger().dagger() == x

    def test_dagger_on_generators(self):
        assert dagger_gen(gen("+", 2)) == gen("-", -2)
        assert dagger_gen(gen("3", -1)) == gen("3", 1)

    @pytest.mark.parametrize("k", [K, Fraction(0), Fraction(7, 2)])
    def test_commutation_relations(self, k):
        for m in range(-2, 3):
            for n in range(-2, 3):
                d = 1 if m + n == 0 else 0
                br = el([gen("3", m), gen("3", n)], k) - el([gen("3", n), gen("3", m)], k)
                assert br == UEAElement.from_products([(Fraction(m) * k / 2 * d, [])], k)
                for kind, sign in (("+", 1), ("-", -1)):
                    br = el([gen("3", m), gen(kind, n)], k) - el([gen(kind, n), gen("3", m)], k)
                    assert br == UEAElement.from_products([(sign, [gen(kind, m + n)])], k)
                br = el([gen("+", m), gen("-", n)], k) - el([gen("-", n), gen("+", m)], k)
                want = UEAElement.from_products([(2, [gen("3", m + n)]), (m * k * d, [])], k)
                assert br == want

    def test_parse(self):
        assert parse_word("J-_{0}^2 J+_{-1}") == [gen("-", 0), gen("-", 0), gen("+", -1)]
        x = UEAElement.parse("2 * J3_{-1}; -1/2 * J+_{-1} J-_{0}", K)
        assert x.terms == {(gen("3", -1),): 2, (gen("+", -1), gen("-", 0)): Fraction(-1, 2)}
        with pytest.raises(ValueError):
            parse_word("J3_{1} K")


class TestVermaModule:
    @pytest.mark.parametrize("j", [Fraction(-2, 3), Fraction(5, 7)])
    def test_weight_spaces_match_character(self, j):
        lev = Level(2, 3)
        ch = verma_char(lev, j, 3, (-8, 8))
        lead = leading_exponent(lev, j)
        for N in range(4):
            for Q in range(-3, 4):
                assert len(weight_space_basis(Q, N)) == ch.coeff(lead + N, -j - Q), (Q, N)

    @pytest.mark.parametrize("j", [Fraction(-2, 3), Fraction(5, 7), Fraction(1, 3)])
    def test_sugawara_l0_is_scalar(self, j):
        lev = Level(2, 3)
        mod = Module(lev, j)
        for Q, N in [(0, 0), (-1, 0), (0, 1), (1, 1), (-1, 2), (2, 2)]:
            for w in weight_space_basis(Q, N):
                v = {w: Fraction(1)}
                assert mod.sugawara_l0(v) == vec_scale(v, h_of_j(lev, j) + N)

    def test_singular_vectors_at_minus_r_rs(self, level):
        for r in range(1, 6):
            for s in range(1, 6):
                if r * s > 5:
                    continue
                sol = find_singular(level, j_rs(level, r, s), -r, r * s)
                assert len(sol) == 1, (r, s)

    def test_hw_is_singular_at_zero(self):
        assert find_singular(Level(2, 3), Fraction(5, 7), 0, 0) == [hw()]

    def test_quotient_kills_relation(self):
        lev = Level(2, 3)
        j = Fraction(-2, 3)
        s = singular_vector(lev, j, Fraction(1, 3), how="pbw")
        mod = Module(lev, j, [s])
        assert mod.reduce(s) == {}
        assert mod.dim(1, 1) == Module(lev, j).dim(1, 1) - 1


class TestDisplayed:
    @pytest.mark.parametrize("name", ["verma(-1,2)", "quotient(-1,2)"])
    def test_displayed_vectors_match(self, name):
        out = compare_displayed(name)
        assert out["kernel_dim"] == 1 and out["singular"] and out["match"]

    def test_perturbed_vector_is_not_proportional(self):
        out = compare_displayed("verma(-1,2)")
        mod = displayed_module("verma(-1,2)")
        ker = normalize(find_singular(mod.level, mod.j, -1, 2, module=mod)[0])
        bad = dict(vec_scale(ker, out["ratio"]))
        w = next(iter(bad))
        bad[w] += 1
        assert proportionality(bad, ker) is None
        assert proportionality(vec_scale(ker, 3), ker) == 3

    @pytest.mark.parametrize("k", [K, Fraction(0)])
    @pytest.mark.parametrize("name", sorted(OPERATOR_IDENTITIES))
    def test_operator_identities(self, name, k):
        assert check_identity(name, k)


class TestStaggered:
    def test_example_one(self):
        ref = reference.STAGGERED_EXAMPLES["I"]
        res = staggered_solve(EXAMPLES["I"])
        assert res.consistent and res.mu != 0 and res.l0_check
        assert res.eta == ref["eta"] and res.beta == ref["beta"] and res.beta_unique

    def test_example_two(self):
        ref = reference.STAGGERED_EXAMPLES["II"]
        res = staggered_solve(EXAMPLES["II"])
        assert res.consistent and res.mu != 0 and res.l0_check
        assert res.eta == ref["eta_over_mu"] * res.mu
        assert res.D.get((), 0) == ref["delta_over_mu"] * res.mu
        assert res.beta == ref["beta"] and res.beta_unique

    def test_from_dict_round_trip(self):
        d = {"name": "I", "p": 2, "pp": 3, "j": "-2/3", "quotient": ["1/3"], "j_S": "-5/3", "j_P": "4/3"}
        ex = StaggeredExample.from_dict(d)
        assert (ex.level, ex.j, ex.quotient, ex.j_S, ex.j_P) == \
            (Level(2, 3), Fraction(-2, 3), [Fraction(1, 3)], Fraction(-5, 3), Fraction(4, 3))
        assert staggered_solve(ex).beta == reference.STAGGERED_EXAMPLES["I"]["beta"]

    def test_json(self):
        out = staggered_solve(EXAMPLES["I"]).to_json()
        assert out["beta"] == "-4480/19683" and out["consistent"] is True
