"""Working with derivations once they are a context-free language.

A sentence of a derivation grammar spells out one complete derivation of
the source grammar, last applied production first.  This module counts
those sentences, enumerates them shortest first, folds them back into
parse trees (checking stack discipline step by step), and replays a tree
into the token string it derives.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InvalidDerivationError
from .grammar import POP_KIND, PUSH_KIND, LigGrammar
from .ldg import Ldg, reduce_ldg


@dataclass(frozen=True)
class DerivationCount:
    """Either a nonnegative int or the infinite marker (value None)."""

    value: Optional[int]

    @classmethod
    def finite(cls, n: int) -> "DerivationCount":
        return cls(n)

    @classmethod
    def infinite(cls) -> "DerivationCount":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self):
        return "infinite" if self.value is None else str(self.value)


def _by_lhs(d: Ldg):
    prods = defaultdict(list)
    for p in d.productions:
        prods[p.lhs].append(p)
    return prods


def count_sentences(d: Ldg) -> DerivationCount:
    """How many complete derivations the grammar has.  Infinite exactly
    when the useful part of the derivation grammar is cyclic (every cycle
    pumps the sentence length, since no nonterminal derives an empty
    sentence)."""
    d = reduce_ldg(d)
    prods = _by_lhs(d)
    nts = d.nonterminals

    pending = {}
    parents = defaultdict(list)
    for a in nts:
        k = 0
        for p in prods.get(a, ()):
            for s in p.rhs:
                if not isinstance(s, int):
                    parents[s].append(a)
                    k += 1
        pending[a] = k

    counts = {}
    ready = deque(a for a in nts if pending[a] == 0)
    while ready:
        a = ready.popleft()
        if a in counts:
            continue
        total = 0
        for p in prods.get(a, ()):
            term = 1
            for s in p.rhs:
                if not isinstance(s, int):
                    term *= counts[s]
            total += term
        counts[a] = total
        for b in parents[a]:
            pending[b] -= 1
            if pending[b] == 0:
                ready.append(b)

    if len(counts) < len(nts):
        return DerivationCount.infinite()
    return DerivationCount.finite(counts.get(d.start, 0))


@dataclass(frozen=True)
class EnumeratedSentence:
    """One derivation: the terminal sequence of the derivation grammar
    (source production ids, last applied first) together with the
    derivation-grammar productions that generated it, in preorder."""

    sentence: tuple
    ldg_productions: tuple


def _length_bounds(prods, pick) -> dict:
    """Per-nonterminal sentence length under ``pick`` (min, or max on an
    acyclic grammar); nonterminals that derive nothing stay absent."""
    best: dict = {}
    changed = True
    while changed:
        changed = False
        for a, plist in prods.items():
            for p in plist:
                total = 0
                ok = True
                for s in p.rhs:
                    if isinstance(s, int):
                        total += 1
                    elif s in best:
                        total += best[s]
                    else:
                        ok = False
                        break
                if not ok:
                    continue
                if a not in best:
                    best[a] = total
                    changed = True
                elif pick(best[a], total) != best[a]:
                    best[a] = total
                    changed = True
    return best


class _Enumerator:
    def __init__(self, d: Ldg):
        self.prods = _by_lhs(d)
        self.minlen = _length_bounds(self.prods, min)
        self.memo: dict = {}
        self.active: set = set()

    def exact(self, a, length: int) -> list:
        """Every derivation from ``a`` with exactly ``length`` terminals,
        as (sentence, preorder production ids) pairs."""
        key = (a, length)
        if key in self.memo:
            return self.memo[key]
        if key in self.active:
            # re-entry without consuming input: only an empty unit cycle
            # could do this, and no nonterminal derives fewer terminals
            # than one, so there is nothing to add on this path
            return []
        if a not in self.minlen or self.minlen[a] > length:
            self.memo[key] = []
            return self.memo[key]
        self.active.add(key)
        out = []
        for p in self.prods.get(a, ()):
            for sent, ids in self._expand(p.rhs, 0, length):
                out.append((sent, (p.id,) + ids))
        self.active.discard(key)
        self.memo[key] = out
        return out

    def _expand(self, rhs, idx, length):
        if idx == len(rhs):
            return [((), ())] if length == 0 else []
        floor_rest = 0
        for s in rhs[idx + 1 :]:
            floor_rest += 1 if isinstance(s, int) else self.minlen.get(s, length + 1)
        item = rhs[idx]
        out = []
        if isinstance(item, int):
            if length >= 1:
                for sent, ids in self._expand(rhs, idx + 1, length - 1):
                    out.append(((item,) + sent, ids))
            return out
        lo = self.minlen.get(item, length + 1)
        for take in range(lo, length - floor_rest + 1):
            subs = self.exact(item, take)
            if not subs:
                continue
            rest = self._expand(rhs, idx + 1, length - take)
            for s2, d2 in rest:
                for s1, d1 in subs:
                    out.append((s1 + s2, d1 + d2))
        return out


def enumerate_sentences(
    d: Ldg,
    max_count: Optional[int] = None,
    max_len: Optional[int] = None,
) -> list:
    """Derivations shortest first; equal lengths are ordered by the
    terminal sequence itself.  At least one of the two bounds is needed
    when there are infinitely many."""
    d = reduce_ldg(d)
    if not d.productions:
        return []
    total = count_sentences(d)
    if total.is_infinite and max_count is None and max_len is None:
        raise ValueError("unbounded enumeration: give max_count or max_len")

    enum = _Enumerator(d)
    if d.start not in enum.minlen:
        return []
    length = enum.minlen[d.start]
    ceiling = max_len
    if not total.is_infinite:
        top = _length_bounds(enum.prods, max).get(d.start)
        ceiling = top if ceiling is None else min(ceiling, top)

    out = []
    while (ceiling is None or length <= ceiling) and (
        max_count is None or len(out) < max_count
    ):
        first_ids = {}
        for sent, ids in enum.exact(d.start, length):
            if sent not in first_ids:
                first_ids[sent] = ids
        for sent in sorted(first_ids):
            out.append(EnumeratedSentence(sent, first_ids[sent]))
            if max_count is not None and len(out) >= max_count:
                break
        length += 1
    return out


def derivations_of_length(d: Ldg, length: int) -> list:
    """All (sentence, preorder ids) pairs at one exact length, without
    deduplication; distinct pairs with equal sentences would reveal an
    ambiguous derivation grammar."""
    d = reduce_ldg(d)
    if not d.productions:
        return []
    return list(_Enumerator(d).exact(d.start, length))


def map_to_source(sentence: Sequence[int], provenance) -> tuple:
    """Rename a derivation over forest production ids to one over the
    source grammar's ids."""
    return tuple(provenance[pid].source_id for pid in sentence)


@dataclass(frozen=True)
class ParseTree:
    """One derivation tree node: the stack is the one the node starts
    with, ``secondary`` is the subtree for a constituent flank (if any),
    ``child`` the subtree for the primary constituent (None at leaves)."""

    symbol: object
    stack: tuple
    production: int
    secondary: Optional["ParseTree"] = None
    child: Optional["ParseTree"] = None

    def nodes(self) -> int:
        n = 1
        if self.secondary is not None:
            n += self.secondary.nodes()
        if self.child is not None:
            n += self.child.nodes()
        return n


def sentence_to_tree(lig: LigGrammar, sentence: Sequence[int]) -> ParseTree:
    """Fold a derivation (last applied first) back into its tree,
    verifying heads and stack discipline; errors point at the failing
    step in application order, counting from 0."""
    steps = list(reversed(tuple(sentence)))
    by_id = {p.id: p for p in lig.productions}
    pos = 0

    def parse(expected, stack) -> ParseTree:
        nonlocal pos
        if pos >= len(steps):
            raise InvalidDerivationError(
                f"derivation ends while {expected} is still open", pos
            )
        here = pos
        p = by_id.get(steps[pos])
        if p is None:
            raise InvalidDerivationError(f"unknown production id {steps[pos]}", here)
        if p.lhs != expected:
            raise InvalidDerivationError(
                f"{p.name} rewrites {p.lhs}, but {expected} is open here", here
            )
        pos += 1
        if p.is_terminal:
            if stack:
                raise InvalidDerivationError(
                    f"{p.name} needs an empty stack, but it holds {list(stack)}", here
                )
            return ParseTree(p.lhs, (), p.id)
        if p.lhs_schema.kind == POP_KIND:
            g = p.lhs_schema.symbol
            if not stack or stack[-1] != g:
                top = stack[-1] if stack else "nothing"
                raise InvalidDerivationError(
                    f"{p.name} pops {g}, but the stack top is {top}", here
                )
            child_stack = stack[:-1]
        else:
            child_stack = stack
        if p.primary_schema.kind == PUSH_KIND:
            child_stack = child_stack + (p.primary_schema.symbol,)

        secondary = None
        for f in p.flanks:
            if not f.terminal:
                secondary = parse(f.symbol, ())
        child = parse(p.primary, child_stack)
        return ParseTree(p.lhs, tuple(stack), p.id, secondary, child)

    tree = parse(lig.start, ())
    if pos != len(steps):
        raise InvalidDerivationError(
            f"{len(steps) - pos} steps left over after the start symbol closed", pos
        )
    return tree


def replay(lig: LigGrammar, tree: ParseTree) -> tuple:
    """The token string a tree derives: left flank, primary yield, right
    flank, terminals in place."""
    p = lig.production(tree.production)
    if p.is_terminal:
        return p.word
    out = []
    for f in p.left:
        out.extend((f.symbol,) if f.terminal else replay(lig, tree.secondary))
    out.extend(replay(lig, tree.child))
    for f in p.right:
        out.extend((f.symbol,) if f.terminal else replay(lig, tree.secondary))
    return tuple(out)
