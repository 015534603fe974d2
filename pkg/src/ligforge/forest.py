"""Shared parse forests: a grammar intersected with one token line.

The forest of grammar G and input w is itself a grammar.  Its
nonterminals are ``[A]_p^q`` (A spanning positions p..q of w) and each
production is a source production instantiated at fixed boundaries, so
the forest packs every parse of w and nothing else.  `build_shared_forest`
works bottom up over a worklist of span items, which copes with empty
words, unit cycles, and same-span loops without special cases; the result
is reduced to its useful part and renumbered deterministically.

`build_liged_forest` re-attaches the stack schemas of the source
productions afterwards, giving a stack-carrying grammar over the forest
nonterminals whose backbone is exactly the shared forest.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import UnknownTokenError
from .grammar import (
    CfGrammar,
    CfProduction,
    EMPTY_KIND,
    Flank,
    LigGrammar,
    LigProduction,
    assemble_grammar,
)


@dataclass(frozen=True)
class ForestNonterminal:
    base: object
    p: int
    q: int

    def __str__(self):
        return f"[{self.base}]_{self.p}^{self.q}"


@dataclass(frozen=True)
class Fsa:
    """The linear automaton for one token sequence: states 0..n, one arc
    per position."""

    tokens: tuple

    @property
    def n(self) -> int:
        return len(self.tokens)

    def step(self, state: int, token) -> int | None:
        if state < len(self.tokens) and self.tokens[state] == token:
            return state + 1
        return None


def build_fsa(tokens: Sequence, alphabet) -> Fsa:
    allowed = set(alphabet)
    for i, t in enumerate(tokens):
        if t not in allowed:
            raise UnknownTokenError(t, i)
    return Fsa(tuple(tokens))


@dataclass(frozen=True)
class Provenance:
    """Where a forest production comes from: the source production id and
    the boundary states around its right-hand side (one more state than
    there are symbols; a lone state for an empty word)."""

    source_id: int
    states: tuple

    @property
    def span(self) -> tuple:
        return self.states[0], self.states[-1]


@dataclass(frozen=True)
class SharedForest:
    grammar: CfGrammar
    provenance: Mapping[int, Provenance]
    tokens: tuple

    @property
    def empty(self) -> bool:
        return not self.grammar.productions


def build_shared_forest(backbone: CfGrammar, fsa: Fsa) -> SharedForest:
    tokens = fsa.tokens
    n = fsa.n
    nt_set = set(backbone.nonterminals)

    unit_by_nt = defaultdict(list)  # B -> prods with rhs (B,)
    first_by_nt = defaultdict(list)  # B -> (prod, other) with rhs (B, other)
    second_by_nt = defaultdict(list)  # B -> (prod, other) with rhs (other, B)
    word_prods = []
    for prod in backbone.productions:
        if len(prod.rhs) > 2:
            raise ValueError(
                f"{prod.name}: forests need a backbone with at most two "
                "right-hand-side symbols; normalize the grammar first"
            )
        nts = [s for s in prod.rhs if s in nt_set]
        if not nts:
            word_prods.append(prod)
            continue
        if len(prod.rhs) == 1:
            unit_by_nt[prod.rhs[0]].append(prod)
        else:
            a, b = prod.rhs
            if a in nt_set:
                first_by_nt[a].append((prod, b))
            if b in nt_set:
                second_by_nt[b].append((prod, a))

    instances: dict = {}  # (source_id, states) -> None, in discovery order
    items = set()
    by_start = defaultdict(list)  # p -> [(A, q)]
    by_end = defaultdict(list)  # q -> [(A, p)]
    queue: deque = deque()

    def add_item(a, p, q):
        if (a, p, q) not in items:
            items.add((a, p, q))
            by_start[p].append((a, q))
            by_end[q].append((a, p))
            queue.append((a, p, q))

    def derive(prod, states):
        key = (prod.id, states)
        if key not in instances:
            instances[key] = prod
            add_item(prod.lhs, states[0], states[-1])

    for prod in word_prods:
        for p in range(n + 1):
            states = [p]
            ok = True
            for t in prod.rhs:
                q = fsa.step(states[-1], t)
                if q is None:
                    ok = False
                    break
                states.append(q)
            if ok:
                derive(prod, tuple(states))

    while queue:
        b, p, q = queue.popleft()
        for prod in unit_by_nt.get(b, ()):
            derive(prod, (p, q))
        for prod, other in first_by_nt.get(b, ()):
            if other in nt_set:
                for a, r in list(by_start[q]):
                    if a == other:
                        derive(prod, (p, q, r))
            else:
                r = fsa.step(q, other)
                if r is not None:
                    derive(prod, (p, q, r))
        for prod, other in second_by_nt.get(b, ()):
            if other in nt_set:
                for a, r in list(by_end[p]):
                    if a == other:
                        derive(prod, (r, p, q))
            else:
                if p >= 1 and fsa.step(p - 1, other) == p:
                    derive(prod, (p - 1, p, q))

    def instantiate(prod, states):
        lhs = ForestNonterminal(prod.lhs, states[0], states[-1])
        rhs = tuple(
            ForestNonterminal(s, states[k], states[k + 1]) if s in nt_set else s
            for k, s in enumerate(prod.rhs)
        )
        return lhs, rhs

    prelim = []
    prelim_prov = {}
    for pid, ((source_id, states), prod) in enumerate(instances.items(), start=1):
        lhs, rhs = instantiate(prod, states)
        prelim.append(CfProduction(pid, f"i{pid}", lhs, rhs))
        prelim_prov[pid] = Provenance(source_id, states)

    start_nt = ForestNonterminal(backbone.start, 0, n)
    reduced = reduce_cfg(
        _collect_cf(prelim, start_nt, lambda s: isinstance(s, ForestNonterminal))
    )

    # renumber survivors: group by head symbol (in backbone order), widest
    # and leftmost spans first, then by source
    nt_rank = {s: i for i, s in enumerate(backbone.nonterminals)}
    survivors = sorted(
        reduced.productions,
        key=lambda cp: (
            nt_rank[cp.lhs.base],
            -cp.lhs.q,
            cp.lhs.p,
            prelim_prov[cp.id].source_id,
            prelim_prov[cp.id].states,
        ),
    )
    src_names = {p.id: p.name for p in backbone.productions}
    counters: dict = defaultdict(int)
    final = []
    provenance = {}
    for pid, cp in enumerate(survivors, start=1):
        prov = prelim_prov[cp.id]
        counters[prov.source_id] += 1
        name = f"{src_names[prov.source_id]}^{counters[prov.source_id]}"
        final.append(CfProduction(pid, name, cp.lhs, cp.rhs))
        provenance[pid] = prov

    grammar = _collect_cf(final, start_nt, lambda s: isinstance(s, ForestNonterminal))
    return SharedForest(grammar, provenance, tokens)


def _collect_cf(productions, start, is_nt) -> CfGrammar:
    nts: list = []
    terms: list = []
    seen_nt = set()
    seen_t = set()

    def see(sym):
        if is_nt(sym):
            if sym not in seen_nt:
                seen_nt.add(sym)
                nts.append(sym)
        elif sym not in seen_t:
            seen_t.add(sym)
            terms.append(sym)

    for p in productions:
        see(p.lhs)
        for s in p.rhs:
            see(s)
    if start not in seen_nt:
        nts.append(start)
    return CfGrammar(tuple(nts), tuple(terms), tuple(productions), start)


def reduce_cfg(g: CfGrammar) -> CfGrammar:
    """Drop productions that cannot take part in a complete derivation:
    first the non-productive ones (bottom up), then the unreachable ones
    (top down).  Ids, names and relative order survive."""
    nt_set = set(g.nonterminals)
    prods = g.productions

    occurs = defaultdict(list)
    need = []
    for i, p in enumerate(prods):
        rhs_nts = [s for s in p.rhs if s in nt_set]
        need.append(len(rhs_nts))
        for s in rhs_nts:
            occurs[s].append(i)
    ready = deque(i for i, k in enumerate(need) if k == 0)
    productive = set()
    while ready:
        a = prods[ready.popleft()].lhs
        if a in productive:
            continue
        productive.add(a)
        for j in occurs[a]:
            need[j] -= 1
            if need[j] == 0:
                ready.append(j)

    alive = [
        p
        for p in prods
        if p.lhs in productive
        and all(s in productive for s in p.rhs if s in nt_set)
    ]
    children = defaultdict(list)
    for p in alive:
        children[p.lhs].extend(s for s in p.rhs if s in nt_set)
    reachable = {g.start}
    stack = [g.start]
    while stack:
        for s in children[stack.pop()]:
            if s not in reachable:
                reachable.add(s)
                stack.append(s)

    kept = tuple(p for p in alive if p.lhs in reachable)
    used_nt = {g.start}
    used_t = set()
    for p in kept:
        used_nt.add(p.lhs)
        for s in p.rhs:
            (used_nt if s in nt_set else used_t).add(s)
    return CfGrammar(
        tuple(s for s in g.nonterminals if s in used_nt),
        tuple(s for s in g.terminals if s in used_t),
        kept,
        g.start,
    )


@dataclass(frozen=True)
class LigedForest:
    lig: LigGrammar
    provenance: Mapping[int, Provenance]
    tokens: tuple


def build_liged_forest(forest: SharedForest, source: LigGrammar) -> LigedForest:
    """Put the stack schemas back onto a shared forest built from
    ``cf_backbone(source)``.  The result's backbone is ``forest.grammar``
    itself (same ids, names, and symbol order)."""
    productions = []
    for cp in forest.grammar.productions:
        src = source.production(forest.provenance[cp.id].source_id)
        if src.is_terminal:
            productions.append(
                LigProduction(cp.id, cp.name, cp.lhs, src.lhs_schema, word=src.word)
            )
            continue
        k = len(src.left)
        left = tuple(
            Flank(cp.rhs[i], f.terminal) for i, f in enumerate(src.left)
        )
        right = tuple(
            Flank(cp.rhs[k + 1 + i], f.terminal) for i, f in enumerate(src.right)
        )
        productions.append(
            LigProduction(
                cp.id,
                cp.name,
                cp.lhs,
                src.lhs_schema,
                left=left,
                primary=cp.rhs[k],
                primary_schema=src.primary_schema,
                right=right,
            )
        )
    lig = assemble_grammar(productions, forest.grammar.start, source.stack_symbols)
    return LigedForest(lig, dict(forest.provenance), forest.tokens)
