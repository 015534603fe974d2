"""Brute-force reference recognizer.

Searches derivation trees top down, threading the stack explicitly, so
it shares no machinery with the forest/relation pipeline and can vet it.
The search is exhaustive under two caps: a tree may use at most
``max_nodes`` productions, and a push that would lift the stack to
``max_stack`` symbols or more is cut (sizes stay strictly below the
cap).  When no branch was ever cut by a cap the result is the complete
set of derivation trees and its emptiness decides membership; otherwise
it is only a lower bound.  Pruning on yield length or on a symbol that
derives nothing at all is exact and leaves completeness intact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .derive import ParseTree
from .grammar import POP_KIND, PUSH_KIND, LigGrammar, validate_normal_form


@dataclass(frozen=True)
class OracleConfig:
    max_nodes: int
    max_stack: int

    def __post_init__(self):
        if self.max_nodes < 1 or self.max_stack < 1:
            raise ValueError("oracle bounds must be positive")


@dataclass(frozen=True)
class OracleResult:
    trees: tuple
    complete: bool
    explored: int

    @property
    def member(self) -> bool:
        return bool(self.trees)


def _min_costs(g: LigGrammar, word_cost, own_cost, flank_terminal_cost) -> dict:
    """Least per-nonterminal cost of any complete tree, ignoring stack
    discipline (so a true lower bound); symbols that cannot finish a tree
    even then stay absent."""
    best: dict = {}
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.is_terminal:
                total = word_cost(p)
            else:
                if p.primary not in best:
                    continue
                total = own_cost + best[p.primary]
                skip = False
                for f in p.flanks:
                    if f.terminal:
                        total += flank_terminal_cost
                    elif f.symbol in best:
                        total += best[f.symbol]
                    else:
                        skip = True
                        break
                if skip:
                    continue
            if p.lhs not in best or total < best[p.lhs]:
                best[p.lhs] = total
                changed = True
    return best


def search_trees(lig: LigGrammar, tokens: Sequence, cfg: OracleConfig) -> OracleResult:
    if validate_normal_form(lig):
        raise ValueError("the oracle needs a normal-form grammar; normalize first")
    tokens = tuple(tokens)
    n = len(tokens)
    max_stack = cfg.max_stack
    minyield = _min_costs(lig, lambda p: len(p.word), 0, 1)
    minnodes = _min_costs(lig, lambda p: 1, 1, 0)

    # Per-head rule tables as plain tuples; this loop runs hot.  A
    # structured rule is (pid, pop symbol or None, push symbol or None,
    # primary, flank side, flank is terminal, flank symbol, min yield).
    # Rules whose constituents derive nothing are dropped up front, an
    # exact prune that cannot affect completeness.
    words: dict = {}
    rules: dict = {}
    for p in lig.productions:
        if p.is_terminal:
            words.setdefault(p.lhs, []).append((p.id, p.word))
            continue
        if p.primary not in minyield:
            continue
        lower = minyield[p.primary]
        side, fterm, fsym = 0, False, None
        flank = p.left[0] if p.left else (p.right[0] if p.right else None)
        if flank is not None:
            side = -1 if p.left else 1
            fterm, fsym = flank.terminal, flank.symbol
            if fterm:
                lower += 1
            elif fsym in minyield:
                lower += minyield[fsym]
            else:
                continue
        pop_sym = p.lhs_schema.symbol if p.lhs_schema.kind == POP_KIND else None
        push_sym = (
            p.primary_schema.symbol if p.primary_schema.kind == PUSH_KIND else None
        )
        rules.setdefault(p.lhs, []).append(
            (p.id, pop_sym, push_sym, p.primary, side, fterm, fsym, lower)
        )

    state = {"explored": 0, "cut": False}
    # Results are a pure function of the key: the budget only filters by
    # node count, so identical states reached from different contexts can
    # share their result lists.  Every recursive call shrinks the budget,
    # which also bounds the recursion on cyclic grammars.
    memo: dict = {}

    def search(a, stack, i, budget):
        """All (end, tree, nodes) for trees rooted at ``a`` that match
        tokens[i:end] and use at most ``budget`` productions."""
        need = minnodes.get(a)
        if need is None or i + minyield[a] > n:
            return ()
        if budget < need:
            state["cut"] = True
            return ()
        key = (a, stack, i, budget)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = []
        if not stack:
            for pid, word in words.get(a, ()):
                state["explored"] += 1
                end = i + len(word)
                if end <= n and tokens[i:end] == word:
                    out.append((end, ParseTree(a, (), pid), 1))
        depth = len(stack)
        inner = budget - 1
        for pid, pop_sym, push_sym, primary, side, fterm, fsym, lower in rules.get(
            a, ()
        ):
            state["explored"] += 1
            if i + lower > n:
                continue
            if pop_sym is not None:
                if not stack or stack[-1] != pop_sym:
                    continue
                child_stack = stack[:-1]
                child_depth = depth - 1
            else:
                child_stack = stack
                child_depth = depth
            if push_sym is not None:
                if child_depth + 1 >= max_stack:
                    state["cut"] = True
                    continue
                child_stack = child_stack + (push_sym,)

            if side == 0:
                for end, child, used in search(primary, child_stack, i, inner):
                    out.append((end, ParseTree(a, stack, pid, None, child), used + 1))
            elif fterm:
                if side < 0:
                    if tokens[i] != fsym:  # i < n is implied by the yield bound
                        continue
                    for end, child, used in search(primary, child_stack, i + 1, inner):
                        out.append(
                            (end, ParseTree(a, stack, pid, None, child), used + 1)
                        )
                else:
                    for k, child, used in search(primary, child_stack, i, inner):
                        if k < n and tokens[k] == fsym:
                            out.append(
                                (k + 1, ParseTree(a, stack, pid, None, child), used + 1)
                            )
            elif side < 0:
                for j, sec, su in search(fsym, (), i, inner):
                    for end, child, cu in search(primary, child_stack, j, inner - su):
                        out.append(
                            (end, ParseTree(a, stack, pid, sec, child), 1 + su + cu)
                        )
            else:
                for k, child, cu in search(primary, child_stack, i, inner):
                    for end, sec, su in search(fsym, (), k, inner - cu):
                        out.append(
                            (end, ParseTree(a, stack, pid, sec, child), 1 + cu + su)
                        )
        res = tuple(out)
        memo[key] = res
        return res

    found = tuple(
        tree for end, tree, _ in search(lig.start, (), 0, cfg.max_nodes) if end == n
    )
    return OracleResult(found, not state["cut"], state["explored"])


def linearize(tree: ParseTree) -> tuple:
    """A tree as its derivation sentence: productions in reverse
    application order, matching the derivation grammar's view."""
    pre = []

    def walk(t):
        pre.append(t.production)
        if t.secondary is not None:
            walk(t.secondary)
        if t.child is not None:
            walk(t.child)

    walk(tree)
    return tuple(reversed(pre))


def oracle_language(lig: LigGrammar, tokens: Sequence, cfg: OracleConfig) -> set:
    """The derivations found within bounds, as sentences."""
    return {linearize(t) for t in search_trees(lig, tokens, cfg).trees}
