import json
from collections import Counter
from fractions import Fraction

import pytest

from affchar.characters import canonical_label, kac_decompose
from affchar.structure import (PARAM_NAMES, ambient_labels, ambient_loewy, kac_loewy, locate_in_ambient,
                               render_text, staggered_descriptor, staggered_loewy, verma_loewy,
                               wakimoto_display)
from affchar.weights import Level, in_S_quo, j_rs, valid_label

from conftest import LEVELS


def kac_labels(level):
    for r in range(-3 * level.p, 3 * level.p + 1):
        for s in range(-3 * level.pp, 3 * level.pp + 1):
            if valid_label(r, s):
                yield r, s


class TestVerma:
    def test_every_weight_in_one_ambient_module(self, level):
        seen = Counter()
        for rho, s0 in ambient_labels(level):
            d = ambient_loewy(level, rho, s0, depth=12)
            seen.update(n.j for n in d.nodes)
        assert len(ambient_labels(level)) == (level.p + 1) * level.pp
        for r, s in kac_labels(level):
            if abs(r) <= 2 * level.p and abs(s) <= 2 * level.pp:
                assert seen[j_rs(level, r, s)] == 1, (r, s)

    def test_locate_is_consistent(self, level):
        for r, s in kac_labels(level):
            loc = locate_in_ambient(level, r, s)
            assert loc["ambient_rho"] in ambient_labels(level)
            assert j_rs(level, *loc["position_label"]) == j_rs(level, r, s)

    def test_truncated_and_rooted(self):
        lev = Level(2, 3)
        d = verma_loewy(lev, 1, 1, depth=3)
        assert d.truncated and d.nodes[0].j == j_rs(lev, 1, 1)
        assert d.sources() == [0]
        assert all(n.shade is None for n in d.nodes)
        with pytest.raises(ValueError):
            verma_loewy(lev, 1, 1, depth=0)

    def test_braid_and_chain(self):
        lev = Level(2, 3)
        assert verma_loewy(lev, 1, 1).kind == "braid"
        assert verma_loewy(lev, 2, 1).kind == "chain"


class TestKacModules:
    def test_nodes_match_decomposition(self, level):
        for r, s in kac_labels(level):
            d = kac_loewy(level, r, s)
            nodes = Counter(j_rs(level, *n.label) for n in d.nodes)
            factors = Counter()
            for lab, m in kac_decompose(level, r, s):
                factors[j_rs(level, *lab)] += m
            assert nodes == factors, (r, s)

    def test_quotient_shape(self, level):
        for r, s in kac_labels(level):
            if not in_S_quo(level, r, s):
                continue
            d = kac_loewy(level, r, s)
            assert len(d.nodes) <= 2
            if len(d.nodes) == 2:
                assert d.edges == ((0, 1),) and d.nodes[0].j == j_rs(level, r, s)

    def test_head_is_the_highest_weight(self, level):
        for r, s in kac_labels(level):
            d = kac_loewy(level, r, s)
            assert any(n.j == j_rs(level, r, s) for n in d.nodes)

    def test_braid_example(self):
        d = kac_loewy(Level(2, 3), 5, 4)
        assert len(d.nodes) == 6 and d.kind == "kac-braid"
        assert sorted(n.name for n in d.nodes) == ["j", "u_1", "u_2", "v_0", "v_1", "v_2"]

    def test_json_export(self):
        d = kac_loewy(Level(2, 3), 5, 4)
        data = json.loads(d.to_json_str())
        assert set(data) >= {"nodes", "edges", "kind"}
        assert len(data["nodes"]) == 6 and all(len(e) == 2 for e in data["edges"])
        assert "arrows:" in render_text(d)


def formula_terms(level, conj, params, sign):
    """The staggered character sums, written out from the stated formulas."""
    p, pp = level.p, level.pp
    e = 1 if sign == "+" else -1
    if conj == 1:
        a, s0, ell = params
        if sign == "+":
            return [((ell * p - a, s0), 1), ((ell * p + a, s0), 2), (((ell + 2) * p - a, s0), 1)]
        return [((-ell * p + a, s0 - pp), 1), ((-ell * p - a, s0 - pp), 2),
                ((-(ell + 2) * p + a, s0 - pp), 1)]
    if conj == 2:
        r0, b, ell = params
    else:
        b, ell = params
        r0 = p
    first = [] if conj == 3 and ell == 1 else [((e * r0, e * (ell * pp - b)), 1)]
    return first + [((-e * r0, -e * (ell * pp + b)), 2), ((e * r0, e * ((ell + 2) * pp - b)), 1)]


def descriptor_params(level):
    for ell in (1, 2, 3):
        for a in range(1, level.p):
            for s0 in range(level.pp):
                yield 1, (a, s0, ell)
        for r0 in range(1, level.p):
            for b in range(1, level.pp):
                yield 2, (r0, b, ell)
        for b in range(1, level.pp):
            yield 3, (b, ell)


class TestStaggered:
    def test_character_terms(self, level):
        for conj, params in descriptor_params(level):
            plus, minus = staggered_descriptor(level, conj, params)
            for d, sign in ((plus, "+"), (minus, "-")):
                assert sorted(d.character_terms) == sorted(formula_terms(level, conj, params, sign))
                assert d.shape == ("triangular" if conj == 3 and params[-1] == 1 else "quadrangular")

    def test_ses_ends(self):
        plus, minus = staggered_descriptor(Level(2, 3), 1, (1, 0, 1))
        assert plus.left == (1, 0) and plus.right == (3, 0)
        assert minus.left == (-1, -3) and minus.right == (-3, -3)

    @pytest.mark.parametrize("conj,params", [(1, (0, 0, 1)), (1, (1, 3, 1)), (2, (1, 0, 1)), (3, (1, 0)),
                                             (3, (1,)), (4, (1, 1))])
    def test_parameter_checks(self, conj, params):
        with pytest.raises(ValueError):
            staggered_descriptor(Level(2, 3), conj, params)

    def test_param_names(self):
        assert PARAM_NAMES == {1: ("a", "s0", "ell"), 2: ("r0", "b", "ell"), 3: ("b", "ell")}

    def test_loewy_node_counts(self, level):
        for conj, params in descriptor_params(level):
            for d in staggered_descriptor(level, conj, params):
                diag = staggered_loewy(level, d)
                mult = sum(m for _, m in d.character_terms)
                assert len(diag.nodes) == mult
                assert diag.kind == d.shape


def test_wakimoto_display_shows_both_string_types():
    lev = Level(2, 3)
    assert set(wakimoto_display(lev, 2, 1)) == {"I", "II"}
    assert set(wakimoto_display(lev, 1, 1)) == {"braid"}
    assert all(d.truncated for d in wakimoto_display(lev, 4, 0).values())
