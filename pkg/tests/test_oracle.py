"""Brute-force reference recognizer: exhaustive search under explicit bounds."""

from random import Random

import pytest

from ligforge import (
    OracleConfig,
    linearize,
    oracle_language,
    parse_grammar,
    replay,
    search_trees,
)
from ligforge.fuzz import compare_with_oracle, random_lig


def test_ccc_single_tree(copy_lig):
    res = search_trees(copy_lig, ("c", "c", "c"), OracleConfig(20, 10))
    assert len(res.trees) == 1
    assert linearize(res.trees[0]) == (8, 7, 4, 3)
    assert res.member


def test_cc_no_tree(copy_lig):
    res = search_trees(copy_lig, ("c", "c"), OracleConfig(20, 10))
    assert res.trees == () and not res.member


def test_pump_tree_count_grows_with_stack_cap(pump_lig):
    # each extra stack slot admits one more pump cycle; cap is exclusive
    word = ("a",)
    for cap, expect in [(1, 1), (2, 2), (4, 4), (5, 5)]:
        res = search_trees(pump_lig, word, OracleConfig(4 * cap + 4, cap))
        assert len(res.trees) == expect, cap
        assert not res.complete  # cutoff fired: deeper trees exist


def test_pump_node_budget_cuts(pump_lig):
    # k cycles cost 2k + 2 nodes, so a budget of 7 admits k in {0, 1, 2}
    res = search_trees(pump_lig, ("a",), OracleConfig(7, 50))
    assert len(res.trees) == 3
    assert {t.nodes() for t in res.trees} == {2, 4, 6}


def test_trees_replay_to_input(copy_lig, pump_lig):
    for g, word in [
        (copy_lig, ("a", "b", "c", "a", "b")),
        (copy_lig, ("c",)),
        (pump_lig, ("a",)),
    ]:
        res = search_trees(g, word, OracleConfig(14, 6))
        assert res.trees
        for tree in res.trees:
            assert replay(g, tree) == word


def test_linearize_injective(pump_lig):
    res = search_trees(pump_lig, ("a",), OracleConfig(25, 5))
    lins = {linearize(t) for t in res.trees}
    assert len(res.trees) == len(lins) == 5


def test_oracle_language_matches_linearized_trees(pump_lig):
    cfg = OracleConfig(12, 3)
    lang = oracle_language(pump_lig, ("a",), cfg)
    assert lang == {
        (4, 2),
        (4, 3, 2, 1),
        (4, 3, 3, 2, 1, 1),
    }


def test_empty_word():
    g = parse_grammar("%start S\nr1: S() ->\n")
    res = search_trees(g, (), OracleConfig(3, 2))
    assert len(res.trees) == 1
    assert res.trees[0].nodes() == 1
    assert res.complete


def test_complete_flag(copy_lig):
    finite = parse_grammar('%start S\nr1: S() -> "a"\n')
    assert search_trees(finite, ("a",), OracleConfig(5, 3)).complete
    # the copy grammar admits arbitrarily deep attempts, so the
    # node budget always truncates something
    assert not search_trees(copy_lig, ("c", "c", "c"), OracleConfig(8, 9)).complete


def test_rejects_non_normal_grammar():
    g = parse_grammar('%start S\nr1: S() -> "a" "b" "c"\n', relaxed=True)
    with pytest.raises(ValueError):
        search_trees(g, ("a", "b", "c"), OracleConfig(5, 5))


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(0, 5)
    with pytest.raises(ValueError):
        OracleConfig(5, 0)


def test_exact_comparison_needs_headroom(copy_lig):
    with pytest.raises(ValueError):
        compare_with_oracle(copy_lig, 2, OracleConfig(8, 8))


def test_agreement_with_parser_on_fixtures(copy_lig, pump_lig):
    assert compare_with_oracle(copy_lig, 3, OracleConfig(9, 10)) == []
    assert compare_with_oracle(pump_lig, 2, OracleConfig(9, 10)) == []


def test_agreement_with_parser_random():
    rng = Random(331)
    for _ in range(20):
        g = random_lig(rng)
        # max_stack > max_nodes makes the bounded comparison exact
        assert compare_with_oracle(g, 3, OracleConfig(8, 9)) == []
