"""Stack-flow relations between nonterminals.

Every structured production in normal form moves the stack from its head
to its primary child in one of three ways, giving the level-1 relations
``EQ1`` (copied), ``PUSH1(g)``, and ``POP1(g)``.  Chaining those moves
along derivation spines yields three derived relations:

  * ``EQP``     the stack is handed over unchanged, possibly through
                balanced push/pop excursions,
  * ``SPINE``   exactly one matched push immediately closed by the
                corresponding net pop,
  * ``POPP(g)`` the net effect is popping one ``g``.

They are the least relations satisfying

    EQP      =  EQ1 | SPINE | EQ1.EQP | SPINE.EQP
    SPINE    =  union over g of PUSH1(g).POPP(g)
    POPP(g)  =  POP1(g) | EQP.POP1(g)

with ``(A,B) in R.R'`` meaning some C has ``(A,C) in R`` and
``(C,B) in R'``.  `closure` computes the fixpoint with a worklist that
touches each derived pair once; rows are bitmasks over the nonterminal
universe, so composition steps are word-parallel.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

from .grammar import POP_KIND, PUSH_KIND, LigGrammar


@dataclass(frozen=True)
class RelationKind:
    kind: str
    gamma: object = None

    def __post_init__(self):
        indexed = self.kind in ("push1", "pop1", "popp")
        if indexed and self.gamma is None:
            raise ValueError(f"{self.kind} is indexed by a stack symbol")
        if not indexed and self.gamma is not None:
            raise ValueError(f"{self.kind} takes no stack symbol")
        if self.kind not in ("eq1", "eqp", "spine", "push1", "pop1", "popp"):
            raise ValueError(f"unknown relation kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "eq1":
            return "="
        if self.kind == "eqp":
            return "=+"
        if self.kind == "spine":
            return "<>"
        if self.kind == "push1":
            return f"+{self.gamma}"
        if self.kind == "pop1":
            return f"-{self.gamma}"
        return f"-{self.gamma}+"

    def __str__(self):
        return self.label


EQ1 = RelationKind("eq1")
EQP = RelationKind("eqp")
SPINE = RelationKind("spine")


def push1(gamma) -> RelationKind:
    return RelationKind("push1", gamma)


def pop1(gamma) -> RelationKind:
    return RelationKind("pop1", gamma)


def popp(gamma) -> RelationKind:
    return RelationKind("popp", gamma)


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class RelationSet:
    """A family of binary relations over one symbol universe.  Relation
    rows are ints: bit j of ``rows(kind)[i]`` says the pair
    ``(universe[i], universe[j])`` is in the relation."""

    def __init__(self, universe: Iterable):
        self.universe = tuple(universe)
        self._index = {s: i for i, s in enumerate(self.universe)}
        self._rows: dict = {}

    def index(self, symbol) -> int:
        return self._index[symbol]

    def rows(self, kind: RelationKind) -> list:
        if kind not in self._rows:
            self._rows[kind] = [0] * len(self.universe)
        return self._rows[kind]

    def add(self, kind: RelationKind, a, b) -> bool:
        return self.add_indices(kind, self._index[a], self._index[b])

    def add_indices(self, kind: RelationKind, i: int, j: int) -> bool:
        """Returns False when the pair was already present."""
        row = self.rows(kind)
        bit = 1 << j
        if row[i] & bit:
            return False
        row[i] |= bit
        return True

    def holds(self, kind: RelationKind, a, b) -> bool:
        rows = self._rows.get(kind)
        if rows is None:
            return False
        return bool(rows[self._index[a]] >> self._index[b] & 1)

    def successors(self, kind: RelationKind, a) -> Iterator:
        rows = self._rows.get(kind)
        if rows is not None:
            for j in _iter_bits(rows[self._index[a]]):
                yield self.universe[j]

    def kinds(self) -> tuple:
        return tuple(k for k, rows in self._rows.items() if any(rows))

    def pairs(self, kind: RelationKind) -> Iterator[tuple]:
        rows = self._rows.get(kind)
        if rows is None:
            return
        for i, mask in enumerate(rows):
            for j in _iter_bits(mask):
                yield self.universe[i], self.universe[j]

    def count(self, kind: RelationKind) -> int:
        rows = self._rows.get(kind)
        return sum(m.bit_count() for m in rows) if rows else 0


def level1(g: LigGrammar) -> RelationSet:
    """Read the one-step relations straight off the productions.  Needs a
    normal-form grammar: at most one stack symbol moves per production."""
    rels = RelationSet(g.nonterminals)
    for p in g.productions:
        if p.is_terminal:
            continue
        if p.lhs_schema.kind == POP_KIND:
            if p.primary_schema.kind == PUSH_KIND:
                raise ValueError(
                    f"{p.name}: pops and pushes at once; normalize the grammar first"
                )
            rels.add(pop1(p.lhs_schema.symbol), p.lhs, p.primary)
        elif p.primary_schema.kind == PUSH_KIND:
            rels.add(push1(p.primary_schema.symbol), p.lhs, p.primary)
        else:
            rels.add(EQ1, p.lhs, p.primary)
    return rels


@dataclass
class ClosureStats:
    universe: int = 0
    inserted: int = 0
    proposed: int = 0


SkipFn = Callable[[RelationKind, object, object], bool]


def closure(base: RelationSet, skip: Optional[SkipFn] = None) -> RelationSet:
    """Least fixpoint of the relation equations over the level-1 facts in
    ``base``.  The result carries the level-1 rows too, plus a ``stats``
    attribute counting worklist activity.

    ``skip(kind, a, b)`` may veto individual insertions; the result is then
    a pruned sub-fixpoint, not a fixpoint (used by the static filter, which
    only vetoes pairs that cannot occur in any useful derivation).
    """
    uni = base.universe
    n = len(uni)
    out = RelationSet(uni)
    stats = ClosureStats(universe=n)

    eq1_rows = [m for m in base.rows(EQ1)]
    out.rows(EQ1)[:] = eq1_rows
    eq1_cols = [0] * n
    for i, mask in enumerate(eq1_rows):
        for j in _iter_bits(mask):
            eq1_cols[j] |= 1 << i

    pop1_rows: dict = {}
    push1_cols: dict = {}
    for kind in base.kinds():
        if kind.kind == "pop1":
            rows = list(base.rows(kind))
            pop1_rows[kind.gamma] = rows
            out.rows(kind)[:] = rows
        elif kind.kind == "push1":
            rows = base.rows(kind)
            out.rows(kind)[:] = list(rows)
            cols = [0] * n
            for i, mask in enumerate(rows):
                for j in _iter_bits(mask):
                    cols[j] |= 1 << i
            push1_cols[kind.gamma] = cols

    spine_cols = [0] * n
    queue: deque = deque()

    def propose(kind: RelationKind, i: int, j: int):
        stats.proposed += 1
        if skip is not None and skip(kind, uni[i], uni[j]):
            return
        if out.add_indices(kind, i, j):
            if kind.kind == "spine":
                spine_cols[j] |= 1 << i
            stats.inserted += 1
            queue.append((kind, i, j))

    for i, mask in enumerate(eq1_rows):
        for j in _iter_bits(mask):
            propose(EQP, i, j)
    for gamma in pop1_rows:
        kind = popp(gamma)
        for i, mask in enumerate(pop1_rows[gamma]):
            for j in _iter_bits(mask):
                propose(kind, i, j)

    eqp_rows = out.rows(EQP)
    while queue:
        kind, i, j = queue.popleft()
        if kind.kind == "eqp":
            # extend to the right over a static pop: EQP.POP1(g) <= POPP(g)
            for gamma, rows in pop1_rows.items():
                target = popp(gamma)
                for k in _iter_bits(rows[j]):
                    propose(target, i, k)
            # prepend a static copy link: EQ1.EQP <= EQP
            for x in _iter_bits(eq1_cols[i]):
                propose(EQP, x, j)
            # prepend an already-derived excursion: SPINE.EQP <= EQP
            for x in _iter_bits(spine_cols[i]):
                propose(EQP, x, j)
        elif kind.kind == "spine":
            propose(EQP, i, j)
            # append already-derived handovers: SPINE.EQP <= EQP
            for k in _iter_bits(eqp_rows[j]):
                propose(EQP, i, k)
        else:  # popp(g)
            cols = push1_cols.get(kind.gamma)
            if cols:
                # close a push over the net pop: PUSH1(g).POPP(g) <= SPINE
                for x in _iter_bits(cols[i]):
                    propose(SPINE, x, j)

    out.stats = stats
    return out


def _compose(r1: list, r2: list) -> list:
    out = []
    for mask in r1:
        acc = 0
        for c in _iter_bits(mask):
            acc |= r2[c]
        out.append(acc)
    return out


def _union(*rows_seq) -> list:
    out = [0] * len(rows_seq[0])
    for rows in rows_seq:
        for i, m in enumerate(rows):
            out[i] |= m
    return out


def check_fixpoint(rels: RelationSet) -> bool:
    """Recompute each derived relation from the equations and compare.
    True iff ``rels`` (as produced by an unpruned `closure`) is exactly
    the least fixpoint it claims to be."""
    n = len(rels.universe)
    if n == 0:
        return True
    eq1 = rels.rows(EQ1)
    eqp = rels.rows(EQP)
    spine = rels.rows(SPINE)
    gammas = sorted(
        {k.gamma for k in rels.kinds() if k.kind in ("push1", "pop1", "popp")},
        key=str,
    )

    spine_expect = [0] * n
    for g in gammas:
        spine_expect = _union(
            spine_expect, _compose(rels.rows(push1(g)), rels.rows(popp(g)))
        )
    if spine_expect != spine:
        return False
    for g in gammas:
        p1 = rels.rows(pop1(g))
        if _union(p1, _compose(eqp, p1)) != rels.rows(popp(g)):
            return False
    return _union(eq1, spine, _compose(eq1, eqp), _compose(spine, eqp)) == eqp
