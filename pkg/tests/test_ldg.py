"""Derivation grammars: construction cases, reduction, the static filter."""

from random import Random

import pytest

from ligforge import (
    EQP,
    SPINE,
    Pair,
    Plain,
    build_ldg,
    closure,
    is_language_empty,
    ldg_signature,
    level1,
    parse_grammar,
    popp,
    recognize,
    reduce_ldg,
    static_filter,
    static_ldg,
)
from ligforge.fuzz import random_lig


def _eqp(a, b):
    return Pair(EQP, a, b)


def _spine(a, b):
    return Pair(SPINE, a, b)


def _popp(g, a, b):
    return Pair(popp(g), a, b)


def expected_copy_signature():
    out = {
        (Plain("S"), (8, _eqp("S", "T")), 2),
        (_eqp("S", "T"), (4,), 3),
        (_eqp("S", "T"), (_spine("S", "T"),), 4),
    }
    for gamma, push_id, pop_id in (("ga", 1, 5), ("gb", 2, 6), ("gc", 3, 7)):
        out.add((_spine("S", "T"), (_popp(gamma, "S", "T"), push_id), 7))
        out.add((_popp(gamma, "S", "T"), (pop_id, _eqp("S", "T")), 9))
    return frozenset(out)


def test_copy_static_ldg(copy_lig):
    d = static_ldg(copy_lig)
    assert ldg_signature(d) == expected_copy_signature()
    assert sorted(p.form for p in d.productions) == [2, 3, 4, 7, 7, 7, 9, 9, 9]
    assert d.start == Plain("S")
    assert reduce_ldg(d).productions == d.productions  # already reduced


def test_pump_static_ldg(pump_lig):
    d = static_ldg(pump_lig)
    assert ldg_signature(d) == frozenset(
        {
            (Plain("A"), (4, _eqp("A", "B")), 2),
            (_eqp("A", "B"), (2,), 3),
            (_eqp("A", "B"), (_spine("A", "B"),), 4),
            (_spine("A", "B"), (_popp("ga", "A", "B"), 1), 7),
            (_popp("ga", "A", "B"), (3, _eqp("A", "B")), 9),
        }
    )


def test_form_1_direct_terminal():
    g = parse_grammar('%start S\nr1: S() -> "a"\n')
    d = reduce_ldg(static_ldg(g))
    assert ldg_signature(d) == frozenset({(Plain("S"), (1,), 1)})


def test_form_5_copy_chain():
    g = parse_grammar('%start S\nr1: S(..) -> T(..)\nr2: T(..) -> V(..)\nr3: V() -> "v"\n')
    d = reduce_ldg(static_ldg(g))
    assert (_eqp("S", "V"), (_eqp("T", "V"), 1), 5) in ldg_signature(d)
    assert sorted(p.form for p in d.productions) == [2, 3, 5]


def test_form_6_spine_then_tail():
    g = parse_grammar(
        "%start S\n%stack g\n"
        "r1: S(..) -> M(..g)\nr2: M(..g) -> T(..)\nr3: T(..) -> V(..)\nr4: V() -> \"v\"\n"
    )
    d = reduce_ldg(static_ldg(g))
    assert (_eqp("S", "V"), (_eqp("T", "V"), _spine("S", "T")), 6) in ldg_signature(d)


def test_form_8_direct_pop():
    g = parse_grammar(
        '%start S\n%stack ga\nr1: S(..) -> A(..ga) "x"\nr2: A(..ga) -> B(..)\nr3: B() -> "b"\n'
    )
    d = reduce_ldg(static_ldg(g))
    assert (_popp("ga", "A", "B"), (2,), 8) in ldg_signature(d)
    assert sorted(p.form for p in d.productions) == [2, 4, 7, 8]


def test_secondary_flank_appears_as_plain_nonterminal():
    g = parse_grammar('%start S\nr1: S(..) -> T(..) U()\nr2: T() -> "t"\nr3: U() -> "u"\n')
    d = reduce_ldg(static_ldg(g))
    assert ldg_signature(d) == frozenset(
        {
            (Plain("S"), (2, _eqp("S", "T")), 2),
            (_eqp("S", "T"), (Plain("U"), 1), 3),
            (Plain("U"), (3,), 1),
        }
    )


def test_stuck_stack_grammar_is_empty():
    g = parse_grammar(
        '%start S\n%stack ga gb\nr1: S(..) -> T(..ga)\nr2: T(..gb) -> "x" T(..)\nr3: T() -> "x"\n'
    )
    assert is_language_empty(g)
    assert reduce_ldg(static_ldg(g)).productions == ()


def test_nonempty_language_reported(copy_lig, pump_lig):
    assert not is_language_empty(copy_lig)
    assert not is_language_empty(pump_lig)


def test_pair_validates_relation_kind():
    from ligforge import EQ1

    with pytest.raises(ValueError):
        Pair(EQ1, "S", "T")


def test_rendering(copy_lig):
    d = static_ldg(copy_lig)
    lines = {d.format_production(p) for p in d.productions}
    assert "[S] -> r8 [S =+ T]" in lines
    assert "[S <> T] -> [S -ga+ T] r1" in lines
    assert "[S -gc+ T] -> r7 [S =+ T]" in lines
    assert str(Plain("S")) == "[S]"
    assert str(_popp("ga", "S", "T")) == "[S -ga+ T]"


def test_static_filter_exact_sets(copy_lig, pump_lig):
    useless = static_filter(copy_lig)
    assert useless == frozenset(
        {("popp", g, "T", "T") for g in ("ga", "gb", "gc")}
    )
    assert static_filter(pump_lig) == frozenset({("popp", "ga", "B", "B")})


def test_filter_leaves_reduced_ldg_unchanged(copy_lig, pump_lig):
    cases = [
        (copy_lig, ("c", "c", "c")),
        (copy_lig, ("a", "c", "a")),
        (copy_lig, ("c", "c")),
        (pump_lig, ("a",)),
    ]
    rng = Random(53)
    for _ in range(20):
        g = random_lig(rng)
        length = rng.randint(0, 3) if g.terminals else 0
        word = tuple(rng.choice(g.terminals) for _ in range(length))
        cases.append((g, word))
    for g, word in cases:
        plain = recognize(g, word)
        filtered = recognize(g, word, static_filter(g))
        assert plain.member == filtered.member
        assert ldg_signature(plain.reduced) == ldg_signature(filtered.reduced)


def test_forest_ldg_for_ccc(copy_lig):
    res = recognize(copy_lig, ("c", "c", "c"))
    red = res.reduced
    assert len(red.productions) == 5
    assert sorted(p.form for p in red.productions) == [2, 3, 4, 7, 9]
    names = {p.id: p.name for p in res.liged.lig.productions}
    rendered = {red.format_production(p) for p in red.productions}
    assert rendered == {
        "[[S]_0^3] -> r8^2 [[S]_0^3 =+ [T]_1^2]",
        "[[S]_0^3 =+ [T]_1^2] -> [[S]_0^3 <> [T]_1^2]",
        "[[S]_0^3 <> [T]_1^2] -> [[S]_0^2 -gc+ [T]_1^2] r3^1",
        "[[S]_0^2 -gc+ [T]_1^2] -> r7^3 [[S]_0^2 =+ [T]_0^2]",
        "[[S]_0^2 =+ [T]_0^2] -> r4^2",
    }
    assert names  # liged productions carry forest names


def test_forest_relations_for_ccc(copy_lig):
    from ligforge.forest import ForestNonterminal as F

    res = recognize(copy_lig, ("c", "c", "c"))
    rels = res.relations
    s = lambda p, q: F("S", p, q)
    t = lambda p, q: F("T", p, q)
    assert set(rels.pairs(SPINE)) == {(s(0, 3), t(1, 2))}
    assert set(rels.pairs(popp("gc"))) == {
        (t(0, 3), t(1, 3)),
        (t(1, 3), t(2, 3)),
        (t(0, 2), t(1, 2)),
        (s(0, 3), t(1, 3)),
        (s(0, 2), t(1, 2)),
    }
    assert set(rels.pairs(EQP)) == {
        (s(0, 3), t(0, 3)),
        (s(0, 2), t(0, 2)),
        (s(0, 1), t(0, 1)),
        (s(0, 3), t(1, 2)),
    }


def test_pipeline_timings_recorded(copy_lig):
    res = recognize(copy_lig, ("c", "c", "c"))
    assert set(res.timings) == {"forest", "attach", "relations", "ldg", "reduce"}
    assert all(v >= 0 for v in res.timings.values())
