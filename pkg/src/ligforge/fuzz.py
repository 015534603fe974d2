"""Seeded random grammars and pipeline-vs-oracle agreement checks.

Everything here is deterministic given a `random.Random`: the CLI's fuzz
subcommand and the test suite share these helpers so a failing seed can
be replayed exactly.
"""

from __future__ import annotations

import itertools
from random import Random
from typing import Iterator, Optional, Sequence

from .derive import enumerate_sentences, map_to_source, replay, sentence_to_tree
from .grammar import (
    COPY,
    EMPTY,
    Flank,
    LigGrammar,
    LigProduction,
    assemble_grammar,
    pop,
    push,
)
from .ldg import recognize
from .oracle import OracleConfig, linearize, search_trees

_NT_POOL = ("S", "A", "B", "C")
_T_POOL = ("a", "b")
_G_POOL = ("x", "y")


def random_lig(
    rng: Random,
    max_nonterminals: int = 4,
    max_stack_symbols: int = 2,
    max_productions: int = 10,
    max_terminals: int = 2,
) -> LigGrammar:
    """A random normal-form grammar.  No attempt is made to avoid empty
    languages or useless symbols; downstream code must cope with both."""
    nts = _NT_POOL[: rng.randint(1, max_nonterminals)]
    terms = _T_POOL[: rng.randint(1, max_terminals)]
    gammas = _G_POOL[: rng.randint(1, max_stack_symbols)]
    productions = []
    for pid in range(1, rng.randint(1, max_productions) + 1):
        lhs = rng.choice(nts)
        if rng.random() < 0.4:
            word = tuple(rng.choice(terms) for _ in range(rng.randint(0, 2)))
            productions.append(LigProduction(pid, f"r{pid}", lhs, EMPTY, word=word))
            continue
        move = rng.choice(("copy", "push", "pop"))
        lhs_schema = pop(rng.choice(gammas)) if move == "pop" else COPY
        prim_schema = push(rng.choice(gammas)) if move == "push" else COPY
        flanks: dict = {"left": (), "right": ()}
        roll = rng.random()
        if roll >= 0.4:
            f = (
                Flank(rng.choice(terms), True)
                if roll < 0.75
                else Flank(rng.choice(nts), False)
            )
            flanks[rng.choice(("left", "right"))] = (f,)
        productions.append(
            LigProduction(
                pid,
                f"r{pid}",
                lhs,
                lhs_schema,
                left=flanks["left"],
                primary=rng.choice(nts),
                primary_schema=prim_schema,
                right=flanks["right"],
            )
        )
    return assemble_grammar(productions, nts[0], gammas)


def random_relaxed_lig(
    rng: Random,
    max_nonterminals: int = 4,
    max_stack_symbols: int = 2,
    max_productions: int = 8,
) -> LigGrammar:
    """Like `random_lig` but freely violating the normal form: long
    terminal words, several stack symbols per schema, several flanks."""
    nts = _NT_POOL[: rng.randint(1, max_nonterminals)]
    terms = _T_POOL[: rng.randint(1, 2)]
    gammas = _G_POOL[: rng.randint(1, max_stack_symbols)]
    productions = []
    for pid in range(1, rng.randint(1, max_productions) + 1):
        lhs = rng.choice(nts)
        if rng.random() < 0.45:
            word = tuple(rng.choice(terms) for _ in range(rng.randint(0, 5)))
            productions.append(LigProduction(pid, f"r{pid}", lhs, EMPTY, word=word))
            continue
        npop = rng.randint(0, 2)
        npush = rng.randint(0, 2)
        lhs_schema = pop(*(rng.choice(gammas) for _ in range(npop))) if npop else COPY
        prim_schema = (
            push(*(rng.choice(gammas) for _ in range(npush))) if npush else COPY
        )

        def flank():
            if rng.random() < 0.6:
                return Flank(rng.choice(terms), True)
            return Flank(rng.choice(nts), False)

        left = tuple(flank() for _ in range(rng.randint(0, 2)))
        right = tuple(flank() for _ in range(rng.randint(0, 2)))
        productions.append(
            LigProduction(
                pid,
                f"r{pid}",
                lhs,
                lhs_schema,
                left=left,
                primary=rng.choice(nts),
                primary_schema=prim_schema,
                right=right,
            )
        )
    return assemble_grammar(productions, nts[0], gammas)


def all_inputs(terminals: Sequence, max_len: int) -> Iterator[tuple]:
    for n in range(max_len + 1):
        yield from itertools.product(tuple(terminals), repeat=n)


def bounded_membership(
    g: LigGrammar, tokens: Sequence, max_nodes: int, max_stack: int
) -> tuple:
    """(member, certain): a derivation search that copes with relaxed
    grammars (any word length, any schema depth, any number of flanks).
    ``certain`` is False when a cap cut the search before a derivation
    was found, i.e. only a positive answer is reliable then."""
    tokens = tuple(tokens)
    n = len(tokens)
    by_head: dict = {}
    for p in g.productions:
        by_head.setdefault(p.lhs, []).append(p)
    state = {"cut": False}

    def walk_items(items, i, budget) -> Iterator[tuple]:
        if not items:
            yield i, 0
            return
        head, rest = items[0], items[1:]
        if isinstance(head, str):
            if i < n and tokens[i] == head:
                yield from ((j, u) for j, u in walk_items(rest, i + 1, budget))
            return
        sym, stack = head
        for j, used in expand(sym, stack, i, budget):
            for k, used2 in walk_items(rest, j, budget - used):
                yield k, used + used2

    def expand(a, stack, i, budget) -> Iterator[tuple]:
        if budget < 1:
            state["cut"] = True
            return
        for p in by_head.get(a, ()):
            if p.is_terminal:
                if stack:
                    continue
                end = i + len(p.word)
                if end <= n and tokens[i:end] == p.word:
                    yield end, 1
                continue
            child_stack = stack
            npop = len(p.lhs_schema.symbols)
            if npop:
                if child_stack[len(child_stack) - npop :] != p.lhs_schema.symbols:
                    continue
                child_stack = child_stack[: len(child_stack) - npop]
            if p.primary_schema.symbols:
                if len(child_stack) + len(p.primary_schema.symbols) > max_stack:
                    state["cut"] = True
                    continue
                child_stack = child_stack + p.primary_schema.symbols
            items = []
            for f in p.left:
                items.append(f.symbol if f.terminal else (f.symbol, ()))
            items.append((p.primary, child_stack))
            for f in p.right:
                items.append(f.symbol if f.terminal else (f.symbol, ()))
            for j, used in walk_items(items, i, budget - 1):
                yield j, used + 1

    for end, _ in expand(g.start, (), 0, max_nodes):
        if end == n:
            return True, True
    return False, not state["cut"]


def bounded_language(
    g: LigGrammar, max_len: int, max_nodes: int, max_stack: int
) -> tuple:
    """(set of member strings up to max_len, certain)."""
    out = set()
    certain = True
    for w in all_inputs(g.terminals, max_len):
        member, sure = bounded_membership(g, w, max_nodes, max_stack)
        if member:
            out.add(w)
        else:
            certain = certain and sure
    return out, certain


def compare_with_oracle(
    lig: LigGrammar,
    max_len: int,
    cfg: OracleConfig,
    static_patterns: Optional[frozenset] = None,
) -> list:
    """Check the pipeline against the brute-force search on every input
    up to max_len over the grammar's own terminals.  Both sides are
    restricted to derivations of at most cfg.max_nodes productions; with
    cfg.max_stack > cfg.max_nodes that restriction is exact on both
    sides, so the two sets must be equal.  Returns human-readable
    discrepancy descriptions (empty list = agreement)."""
    if cfg.max_stack <= cfg.max_nodes:
        raise ValueError("need max_stack > max_nodes for an exact comparison")
    problems = []
    for tokens in all_inputs(lig.terminals, max_len):
        res = recognize(lig, tokens, static_patterns)
        oracle = search_trees(lig, tokens, cfg)
        oracle_set = {linearize(t) for t in oracle.trees}

        enumerated = enumerate_sentences(res.reduced, max_len=cfg.max_nodes)
        ldg_set = {
            map_to_source(e.sentence, res.liged.provenance) for e in enumerated
        }
        label = " ".join(map(str, tokens)) or "<empty>"
        if ldg_set != oracle_set:
            missing = sorted(oracle_set - ldg_set)
            extra = sorted(ldg_set - oracle_set)
            problems.append(
                f"input {label!r}: derivations differ "
                f"(oracle-only {missing[:3]}, pipeline-only {extra[:3]})"
            )
            continue
        if oracle_set and not res.member:
            problems.append(f"input {label!r}: oracle found a tree, pipeline rejects")
        if not res.member and oracle.member:
            problems.append(f"input {label!r}: membership disagrees")
        for e in enumerated:
            src = map_to_source(e.sentence, res.liged.provenance)
            tree = sentence_to_tree(lig, src)
            if replay(lig, tree) != tokens:
                problems.append(f"input {label!r}: replay of {src} differs")
                break
    return problems
