"""Derivation grammars: the set of derivations of a stack-carrying
grammar, presented as a context-free language over production ids.

A sentence of the derivation grammar lists the productions of one
complete derivation in reverse application order (last applied first).
Nonterminals are either ``[A]`` (complete derivations from A with an
empty stack) or ``[A r B]`` for a stack-flow relation r, standing for
the spine segments that witness the relation; the productions below
case-split on how a segment starts.  Emptiness, counting, enumeration,
and random sampling of derivations all become plain context-free
questions on this grammar.

`recognize` chains the whole pipeline: token line, forest of the
backbone, stack schemas re-attached, relation closure over forest
nonterminals, derivation grammar, reduction.  The input is accepted
exactly when the reduced derivation grammar keeps at least one
production.
"""

from __future__ import annotations

import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .forest import (
    Fsa,
    LigedForest,
    SharedForest,
    build_fsa,
    build_liged_forest,
    build_shared_forest,
    reduce_cfg,
)
from .grammar import (
    CfGrammar,
    CfProduction,
    LigGrammar,
    POP_KIND,
    PUSH_KIND,
    cf_backbone,
)
from .relations import EQP, SPINE, RelationKind, RelationSet, closure, level1, popp


@dataclass(frozen=True)
class Plain:
    symbol: object

    def __str__(self):
        return f"[{self.symbol}]"


@dataclass(frozen=True)
class Pair:
    rel: RelationKind
    left: object
    right: object

    def __post_init__(self):
        if self.rel.kind not in ("eqp", "spine", "popp"):
            raise ValueError(f"pair nonterminals use derived relations, not {self.rel}")

    def __str__(self):
        return f"[{self.left} {self.rel.label} {self.right}]"


LdgNt = Union[Plain, Pair]


@dataclass(frozen=True)
class LdgProduction:
    """Right-hand sides mix nonterminals with ints; an int is a terminal,
    namely a production id of the source grammar.  ``form`` tags which of
    the nine construction cases emitted the production."""

    id: int
    lhs: LdgNt
    rhs: tuple
    form: int


@dataclass(frozen=True)
class Ldg:
    start: LdgNt
    nonterminals: tuple
    terminals: tuple
    productions: tuple
    source: LigGrammar

    def production(self, pid: int) -> LdgProduction:
        for p in self.productions:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def format_production(self, p: LdgProduction) -> str:
        names = {q.id: q.name for q in self.source.productions}
        items = [names[s] if isinstance(s, int) else str(s) for s in p.rhs]
        rhs = " ".join(items) if items else "<empty>"
        return f"{p.lhs} -> {rhs}"

    def render(self) -> str:
        return "\n".join(
            f"{self.format_production(p)}   (case {p.form})" for p in self.productions
        )


def build_ldg(lig: LigGrammar, rels: RelationSet) -> Ldg:
    """Emit the derivation grammar top down from ``[start]``, discovering
    pair nonterminals as they appear on right-hand sides.  Emission order
    is deterministic: worklist FIFO, cases in order, source productions by
    id, relation successors in universe order."""
    term_by_head = defaultdict(list)
    copy_by_head = defaultdict(list)
    push_by_head = defaultdict(list)
    pop_by_head = defaultdict(list)
    pop_by_primary = defaultdict(list)
    terminal_prods = []
    for p in lig.productions:
        if p.is_terminal:
            term_by_head[p.lhs].append(p)
            terminal_prods.append(p)
        elif p.lhs_schema.kind == POP_KIND:
            pop_by_head[p.lhs].append(p)
            pop_by_primary[p.primary].append(p)
        elif p.primary_schema.kind == PUSH_KIND:
            push_by_head[p.lhs].append(p)
        else:
            copy_by_head[p.lhs].append(p)

    def flank_part(p) -> tuple:
        for f in p.flanks:
            if not f.terminal:
                return (Plain(f.symbol),)
        return ()

    start = Plain(lig.start)
    seen = {start}
    order = [start]
    queue = deque([start])
    productions = []

    def emit(lhs, rhs, form):
        productions.append(LdgProduction(len(productions) + 1, lhs, rhs, form))
        for s in rhs:
            if not isinstance(s, int) and s not in seen:
                seen.add(s)
                order.append(s)
                queue.append(s)

    while queue:
        nt = queue.popleft()
        if isinstance(nt, Plain):
            a = nt.symbol
            for r in term_by_head.get(a, ()):
                emit(nt, (r.id,), 1)
            for r in terminal_prods:
                if rels.holds(EQP, a, r.lhs):
                    emit(nt, (r.id, Pair(EQP, a, r.lhs)), 2)
            continue
        rel, a, c = nt.rel, nt.left, nt.right
        if rel.kind == "eqp":
            for r in copy_by_head.get(a, ()):
                if r.primary == c:
                    emit(nt, flank_part(r) + (r.id,), 3)
            if rels.holds(SPINE, a, c):
                emit(nt, (Pair(SPINE, a, c),), 4)
            for r in copy_by_head.get(a, ()):
                if rels.holds(EQP, r.primary, c):
                    emit(nt, (Pair(EQP, r.primary, c),) + flank_part(r) + (r.id,), 5)
            for b in rels.successors(SPINE, a):
                if rels.holds(EQP, b, c):
                    emit(nt, (Pair(EQP, b, c), Pair(SPINE, a, b)), 6)
        elif rel.kind == "spine":
            for r in push_by_head.get(a, ()):
                gamma = r.primary_schema.symbol
                if rels.holds(popp(gamma), r.primary, c):
                    emit(
                        nt,
                        (Pair(popp(gamma), r.primary, c),) + flank_part(r) + (r.id,),
                        7,
                    )
        else:  # popp
            gamma = rel.gamma
            for r in pop_by_head.get(a, ()):
                if r.lhs_schema.symbol == gamma and r.primary == c:
                    emit(nt, flank_part(r) + (r.id,), 8)
            for r in pop_by_primary.get(c, ()):
                if r.lhs_schema.symbol == gamma and rels.holds(EQP, a, r.lhs):
                    emit(nt, flank_part(r) + (r.id, Pair(EQP, a, r.lhs)), 9)

    term_ids = []
    seen_ids = set()
    for p in productions:
        for s in p.rhs:
            if isinstance(s, int) and s not in seen_ids:
                seen_ids.add(s)
                term_ids.append(s)
    return Ldg(start, tuple(order), tuple(term_ids), tuple(productions), lig)


def reduce_ldg(d: Ldg) -> Ldg:
    """Keep only productions that take part in a complete derivation (the
    context-free reduction of the derivation grammar); ids survive."""
    view = CfGrammar(
        d.nonterminals,
        d.terminals,
        tuple(CfProduction(p.id, str(p.id), p.lhs, p.rhs) for p in d.productions),
        d.start,
    )
    red = reduce_cfg(view)
    keep = {p.id for p in red.productions}
    return Ldg(
        d.start,
        red.nonterminals,
        red.terminals,
        tuple(p for p in d.productions if p.id in keep),
        d.source,
    )


def static_ldg(lig: LigGrammar) -> Ldg:
    """The derivation grammar of the grammar itself (no input): its
    sentences are all complete derivations, so the grammar's language is
    empty iff this reduces to nothing."""
    return build_ldg(lig, closure(level1(lig)))


def is_language_empty(lig: LigGrammar) -> bool:
    return not reduce_ldg(static_ldg(lig)).productions


def ldg_signature(d: Ldg) -> frozenset:
    """Structural fingerprint, insensitive to emission order and ids."""
    return frozenset((p.lhs, p.rhs, p.form) for p in d.productions)


Pattern = tuple  # (relation kind name, stack symbol or None, head, tail)


def static_filter(lig: LigGrammar) -> frozenset:
    """Relation pairs that cannot occur in any useful derivation-grammar
    nonterminal, as patterns over the source nonterminals.  Insertions of
    matching pairs may be skipped when closing relations over forest
    nonterminals; the reduced result is unchanged."""
    rels = closure(level1(lig))
    reduced = reduce_ldg(build_ldg(lig, rels))
    useful = set()
    for nt in reduced.nonterminals:
        if isinstance(nt, Pair):
            useful.add((nt.rel.kind, nt.rel.gamma, nt.left, nt.right))
    useless = []
    for kind in rels.kinds():
        if kind.kind in ("eqp", "spine", "popp"):
            for a, b in rels.pairs(kind):
                pat = (kind.kind, kind.gamma, a, b)
                if pat not in useful:
                    useless.append(pat)
    return frozenset(useless)


@dataclass
class PipelineResult:
    source: LigGrammar
    tokens: tuple
    fsa: Fsa
    backbone: CfGrammar
    forest: SharedForest
    liged: LigedForest
    relations: RelationSet
    ldg: Ldg
    reduced: Ldg
    member: bool
    timings: dict = field(default_factory=dict)


def recognize(
    lig: LigGrammar,
    tokens: Sequence,
    static_patterns: Optional[frozenset] = None,
) -> PipelineResult:
    """Run the whole recognition pipeline on one token sequence.

    ``static_patterns`` (from `static_filter`) prunes the relation closure
    over forest nonterminals; pass None to skip pruning.
    """
    timings = {}

    def clock(key, fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        timings[key] = (time.perf_counter() - t0) * 1000.0
        return out

    fsa = build_fsa(tokens, lig.terminals)
    backbone = cf_backbone(lig)
    forest = clock("forest", build_shared_forest, backbone, fsa)
    liged = clock("attach", build_liged_forest, forest, lig)

    skip = None
    if static_patterns is not None:

        def skip(kind, a, b):
            return (kind.kind, kind.gamma, a.base, b.base) in static_patterns

    rels = clock("relations", lambda: closure(level1(liged.lig), skip))
    full = clock("ldg", build_ldg, liged.lig, rels)
    reduced = clock("reduce", reduce_ldg, full)
    return PipelineResult(
        source=lig,
        tokens=tuple(tokens),
        fsa=fsa,
        backbone=backbone,
        forest=forest,
        liged=liged,
        relations=rels,
        ldg=full,
        reduced=reduced,
        member=bool(reduced.productions),
        timings=timings,
    )
