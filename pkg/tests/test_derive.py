"""Counting, shortest-first enumeration, tree reconstruction, replay."""

from random import Random

import pytest

from ligforge import (
    InvalidDerivationError,
    count_sentences,
    derivations_of_length,
    enumerate_sentences,
    map_to_source,
    parse_grammar,
    recognize,
    replay,
    sentence_to_tree,
    static_ldg,
)
from ligforge.fuzz import random_lig


def test_count_single_derivation(copy_lig):
    res = recognize(copy_lig, ("c", "c", "c"))
    count = count_sentences(res.reduced)
    assert count.value == 1 and not count.is_infinite
    assert str(count) == "1"


def test_count_infinite(pump_lig):
    res = recognize(pump_lig, ("a",))
    count = count_sentences(res.reduced)
    assert count.is_infinite and count.value is None
    assert str(count) == "infinite"


def test_count_zero_on_nonmember(copy_lig):
    res = recognize(copy_lig, ("c", "c"))
    assert not res.member
    assert count_sentences(res.reduced).value == 0


def test_count_static_grammars(copy_lig, pump_lig):
    # whole-language derivation sets: both fixtures are infinite
    assert count_sentences(static_ldg(copy_lig)).is_infinite
    assert count_sentences(static_ldg(pump_lig)).is_infinite


def test_enumerate_ccc(copy_lig):
    res = recognize(copy_lig, ("c", "c", "c"))
    out = enumerate_sentences(res.reduced)
    assert len(out) == 1
    assert map_to_source(out[0].sentence, res.liged.provenance) == (8, 7, 4, 3)


def test_enumerate_pump_prefix(pump_lig):
    res = recognize(pump_lig, ("a",))
    out = enumerate_sentences(res.reduced, max_count=4)
    mapped = [map_to_source(e.sentence, res.liged.provenance) for e in out]
    assert mapped == [
        (4, 2),
        (4, 3, 2, 1),
        (4, 3, 3, 2, 1, 1),
        (4, 3, 3, 3, 2, 1, 1, 1),
    ]
    lengths = [len(m) for m in mapped]
    assert lengths == sorted(lengths)  # shortest first


def test_enumerate_unbounded_infinite_raises(pump_lig):
    res = recognize(pump_lig, ("a",))
    with pytest.raises(ValueError):
        enumerate_sentences(res.reduced)
    assert enumerate_sentences(res.reduced, max_len=6)  # bounded is fine


def test_enumerate_deterministic(pump_lig):
    res = recognize(pump_lig, ("a",))
    first = [e.sentence for e in enumerate_sentences(res.reduced, max_count=6)]
    second = [e.sentence for e in enumerate_sentences(res.reduced, max_count=6)]
    assert first == second


def test_enumerate_whole_static_language(copy_lig):
    d = static_ldg(copy_lig)
    out = enumerate_sentences(d, max_len=4)
    sentences = [e.sentence for e in out]
    assert sentences[0] == (8, 4)  # the bare center, shortest derivation
    assert len(sentences) == len(set(sentences))
    # ties at one length are ordered by the terminal sequence itself
    by_len: dict = {}
    for s in sentences:
        by_len.setdefault(len(s), []).append(s)
    for group in by_len.values():
        assert group == sorted(group)


def test_derivations_of_length(pump_lig):
    res = recognize(pump_lig, ("a",))
    assert len(derivations_of_length(res.reduced, 2)) == 1
    assert len(derivations_of_length(res.reduced, 3)) == 0
    assert len(derivations_of_length(res.reduced, 4)) == 1


def test_ldg_production_usage_is_linear(copy_lig, pump_lig):
    for lig, word in [
        (copy_lig, ("c", "c", "c")),
        (copy_lig, ("b", "a", "c", "b", "a")),
        (pump_lig, ("a",)),
    ]:
        res = recognize(lig, word)
        for e in enumerate_sentences(res.reduced, max_count=8, max_len=20):
            assert len(e.ldg_productions) <= 2 * len(e.sentence)


def test_tree_round_trip_fixture(copy_lig):
    word = ("b", "a", "c", "b", "a")
    res = recognize(copy_lig, word)
    out = enumerate_sentences(res.reduced)
    assert len(out) == 1
    src = map_to_source(out[0].sentence, res.liged.provenance)
    tree = sentence_to_tree(copy_lig, src)
    assert replay(copy_lig, tree) == word
    # leaf to root: center, pops top-first (gb then ga), copy, pushes
    assert src == (8, 5, 6, 4, 2, 1)


def test_tree_structure(copy_lig):
    tree = sentence_to_tree(copy_lig, (8, 7, 4, 3))
    assert tree.symbol == "S" and tree.stack == ()
    assert tree.production == 3
    child = tree.child
    assert child.symbol == "S" and child.stack == ("gc",)
    assert child.production == 4
    assert tree.nodes() == 4


def test_replay_on_random_grammars():
    rng = Random(59)
    done = 0
    for _ in range(40):
        g = random_lig(rng)
        if not g.terminals:
            continue
        for length in (0, 1, 2):
            for word in _words(g.terminals, length):
                res = recognize(g, word)
                for e in enumerate_sentences(res.reduced, max_count=5, max_len=8):
                    src = map_to_source(e.sentence, res.liged.provenance)
                    tree = sentence_to_tree(g, src)
                    assert replay(g, tree) == word
                    done += 1
    assert done > 50


def _words(terminals, length):
    if length == 0:
        return [()]
    shorter = _words(terminals, length - 1)
    return [w + (t,) for w in shorter for t in terminals]


def test_invalid_derivation_stack_clash(copy_lig):
    # replaying [r8 r8 r4 r3] fails at the first r8: the stack still
    # holds the pushed symbol when the terminal production fires
    with pytest.raises(InvalidDerivationError) as err:
        sentence_to_tree(copy_lig, (8, 8, 4, 3))
    assert "step 2" in str(err.value)
    assert "stack" in str(err.value)


def test_invalid_derivation_wrong_head(copy_lig):
    with pytest.raises(InvalidDerivationError) as err:
        sentence_to_tree(copy_lig, (8, 7, 4, 5))
    assert "step 0" in str(err.value)


def test_invalid_derivation_unknown_id(copy_lig):
    with pytest.raises(InvalidDerivationError):
        sentence_to_tree(copy_lig, (99,))


def test_invalid_derivation_leftover_and_missing(copy_lig):
    with pytest.raises(InvalidDerivationError) as err:
        sentence_to_tree(copy_lig, (8, 7, 4))  # r3 missing: wrong head at the root
    with pytest.raises(InvalidDerivationError) as err2:
        sentence_to_tree(copy_lig, (8, 8, 7, 4, 3))  # one r8 too many
    assert "left over" in str(err2.value) or "step" in str(err2.value)
    assert err.value is not err2.value


def test_pop_mismatch_message():
    g = parse_grammar(
        "%start S\n%stack ga gb\n"
        'r1: S(..) -> S(..ga) "a"\nr2: S(..) -> S(..gb) "b"\n'
        "r3: S(..ga) -> T(..)\nr4: S(..gb) -> T(..)\nr5: T() -> \"t\"\n"
    )
    # pushes gb but then pops ga
    with pytest.raises(InvalidDerivationError) as err:
        sentence_to_tree(g, (5, 3, 2))
    assert "pops" in str(err.value)
