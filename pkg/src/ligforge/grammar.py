"""Linear indexed grammar (LIG) data model, text format, and normal form.

A LIG is a CFG whose nonterminals carry a stack of symbols.  Every
production here is in a restricted shape with exactly one *primary*
constituent on the right-hand side (the child that inherits the stack)
plus at most a small amount of extra material:

  * terminal productions   ``A() -> w``            (empty stack required)
  * structured productions ``A(..a) -> G1 B(..a') G2``

where ``(..)`` copies the stack, ``(..g)`` pushes ``g`` on the right /
pops ``g`` on the left, and the flanks ``G1 G2`` are terminals or
*secondary* constituents ``C()`` that start with a fresh empty stack.
Normal form limits terminal words to two symbols, stack schemas to one
symbol in total, and flanks to one in total; `normalize` rewrites any
relaxed grammar into this shape while preserving its string language.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

from .errors import GrammarSyntaxError, NormalFormError

FORMAT = """\
Grammar files are UTF-8 and line oriented; '#' starts a comment.

  %start S                   required: the start nonterminal
  %stack ga gb gc            declares stack symbols

  r1: S(..)   -> S(..ga) "a"   push ga on the primary child
  r5: T(..ga) -> "a" T(..)     pop ga from the head
  r4: S(..)   -> T(..)         copy the stack unchanged
  r8: T()     -> "c"           terminal production, empty stack only
  rx: A(..)   -> B(..) C()     C() is a secondary constituent

Nonterminals start uppercase; terminals are quoted or lowercase
identifiers; the 'name:' prefix is optional (productions are otherwise
named r1..rn in order).  A terminal production with an empty
right-hand side derives the empty word.
"""


# --- stack schemas -----------------------------------------------------------

COPY_KIND = "copy"
PUSH_KIND = "push"
POP_KIND = "pop"
EMPTY_KIND = "empty"


@dataclass(frozen=True)
class StackSchema:
    """What a constituent does to the inherited stack.

    ``copy`` and ``empty`` carry no symbols; ``push``/``pop`` carry the
    symbols involved (exactly one in normal form, possibly more in a
    relaxed grammar, written bottom to top).
    """

    kind: str
    symbols: tuple = ()

    def __post_init__(self):
        if self.kind in (COPY_KIND, EMPTY_KIND) and self.symbols:
            raise ValueError(f"{self.kind} schema carries no symbols")
        if self.kind in (PUSH_KIND, POP_KIND) and not self.symbols:
            raise ValueError(f"{self.kind} schema needs at least one symbol")
        if self.kind not in (COPY_KIND, PUSH_KIND, POP_KIND, EMPTY_KIND):
            raise ValueError(f"unknown schema kind {self.kind!r}")

    @property
    def symbol(self):
        if len(self.symbols) != 1:
            raise ValueError(f"schema {self} does not carry exactly one symbol")
        return self.symbols[0]

    def __str__(self):
        if self.kind == EMPTY_KIND:
            return "()"
        if self.symbols:
            return "(.." + " ".join(str(s) for s in self.symbols) + ")"
        return "(..)"


COPY = StackSchema(COPY_KIND)
EMPTY = StackSchema(EMPTY_KIND)


def push(*symbols) -> StackSchema:
    return StackSchema(PUSH_KIND, tuple(symbols))


def pop(*symbols) -> StackSchema:
    return StackSchema(POP_KIND, tuple(symbols))


# --- productions and grammars ------------------------------------------------


@dataclass(frozen=True)
class Flank:
    """One right-hand-side item beside the primary constituent: a terminal
    token or a secondary nonterminal (which always starts with ``()``)."""

    symbol: Any
    terminal: bool

    def __str__(self):
        return _render_terminal(self.symbol) if self.terminal else f"{self.symbol}()"


@dataclass(frozen=True)
class LigProduction:
    """One production.  ``word`` is set for terminal productions, the
    primary/flank fields for structured ones."""

    id: int
    name: str
    lhs: Any
    lhs_schema: StackSchema
    word: Optional[tuple] = None
    left: tuple = ()
    primary: Any = None
    primary_schema: Optional[StackSchema] = None
    right: tuple = ()

    def __post_init__(self):
        if self.word is not None:
            if self.lhs_schema.kind != EMPTY_KIND:
                raise ValueError("terminal productions require an empty-stack head")
            if self.primary is not None or self.left or self.right:
                raise ValueError("terminal productions have no constituents")
        else:
            if self.primary is None:
                raise ValueError("structured productions need a primary constituent")
            if self.lhs_schema.kind not in (COPY_KIND, POP_KIND):
                raise ValueError("structured head schema must be (..) or (..g)")
            if self.primary_schema is None or self.primary_schema.kind not in (
                COPY_KIND,
                PUSH_KIND,
            ):
                raise ValueError("primary schema must be (..) or (..g)")

    @property
    def is_terminal(self) -> bool:
        return self.word is not None

    @property
    def flanks(self) -> tuple:
        return self.left + self.right

    def rhs_symbols(self) -> tuple:
        """Right-hand side as a flat symbol sequence (the CFG backbone view)."""
        if self.is_terminal:
            return self.word
        out = [f.symbol for f in self.left]
        out.append(self.primary)
        out.extend(f.symbol for f in self.right)
        return tuple(out)

    def __str__(self):
        head = f"{self.lhs}{self.lhs_schema}"
        if self.is_terminal:
            rhs = " ".join(_render_terminal(t) for t in self.word)
        else:
            parts = [str(f) for f in self.left]
            parts.append(f"{self.primary}{self.primary_schema}")
            parts.extend(str(f) for f in self.right)
            rhs = " ".join(parts)
        return f"{self.name}: {head} -> {rhs}".rstrip()


@dataclass(frozen=True)
class LigGrammar:
    nonterminals: tuple
    terminals: tuple
    stack_symbols: tuple
    productions: tuple
    start: Any

    def production(self, pid: int) -> LigProduction:
        p = self.productions[pid - 1]
        if p.id != pid:
            raise KeyError(f"no production with id {pid}")
        return p

    def names(self) -> Mapping[int, str]:
        return {p.id: p.name for p in self.productions}


@dataclass(frozen=True)
class CfProduction:
    id: int
    name: str
    lhs: Any
    rhs: tuple

    def __str__(self):
        rhs = " ".join(str(s) for s in self.rhs)
        return f"{self.name}: {self.lhs} -> {rhs}".rstrip()


@dataclass(frozen=True)
class CfGrammar:
    """A plain CFG; used for the stack-erased backbone and shared forests."""

    nonterminals: tuple
    terminals: tuple
    productions: tuple
    start: Any


def assemble_grammar(productions: Iterable[LigProduction], start, stack_symbols) -> LigGrammar:
    """Collect symbol tables in order of first appearance.

    The text parser, the normalizer, and the random generators all build
    grammars through this helper so that render/parse round trips compare
    equal structurally.
    """
    prods = tuple(productions)
    nts: list = []
    terms: list = []
    seen_nt: set = set()
    seen_t: set = set()

    def see_nt(s):
        if s not in seen_nt:
            seen_nt.add(s)
            nts.append(s)

    def see_t(s):
        if s not in seen_t:
            seen_t.add(s)
            terms.append(s)

    for p in prods:
        see_nt(p.lhs)
        if p.is_terminal:
            for t in p.word:
                see_t(t)
        else:
            for f in p.left:
                see_t(f.symbol) if f.terminal else see_nt(f.symbol)
            see_nt(p.primary)
            for f in p.right:
                see_t(f.symbol) if f.terminal else see_nt(f.symbol)
    see_nt(start)
    return LigGrammar(tuple(nts), tuple(terms), tuple(stack_symbols), prods, start)


# --- text format --------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<comment>\#.*)
      | (?P<arrow>->)
      | (?P<dots>\.\.)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<colon>:)
      | (?P<quoted>"[^"\n]*")
      | (?P<ident>[A-Za-z_][A-Za-z0-9_#]*)
    """,
    re.VERBOSE,
)

_BARE_TERMINAL_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def _tokenize_line(line: str, lineno: int):
    toks = []
    pos = 0
    while pos < len(line):
        if line[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise GrammarSyntaxError(
                f"unexpected character {line[pos]!r}", lineno, pos + 1
            )
        kind = m.lastgroup
        if kind == "comment":
            break
        toks.append((kind, m.group(), pos + 1))
        pos = m.end()
    return toks


class _Cursor:
    def __init__(self, toks, lineno):
        self.toks = toks
        self.lineno = lineno
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None, None)

    def next(self, expect=None, what=None):
        if self.i >= len(self.toks):
            raise GrammarSyntaxError(
                f"unexpected end of line, expected {what or expect}",
                self.lineno,
                (self.toks[-1][2] + len(self.toks[-1][1])) if self.toks else 1,
            )
        kind, text, col = self.toks[self.i]
        if expect is not None and kind != expect:
            raise GrammarSyntaxError(
                f"expected {what or expect}, found {text!r}", self.lineno, col
            )
        self.i += 1
        return kind, text, col

    @property
    def done(self):
        return self.i >= len(self.toks)


def _is_nonterminal_name(s: str) -> bool:
    return s[0].isupper()


def _parse_schema(cur: _Cursor):
    """Returns (has_dots, symbols, col) for '()', '(..)' or '(..g1 g2)'."""
    _, _, col = cur.next("lparen", "'('")
    if cur.peek()[0] == "rparen":
        cur.next()
        return False, (), col
    cur.next("dots", "'..' or ')'")
    syms = []
    while cur.peek()[0] == "ident":
        syms.append(cur.next()[1])
    cur.next("rparen", "')'")
    return True, tuple(syms), col


def _schema_positions(cur, lineno):
    # production body:  [name ':']  NT schema '->' item*
    name = None
    if cur.peek()[0] == "ident" and cur.peek(1)[0] == "colon":
        name = cur.next()[1]
        cur.next()
    kind, lhs, col = cur.next("ident", "a nonterminal")
    if not _is_nonterminal_name(lhs):
        raise GrammarSyntaxError(
            f"left-hand side {lhs!r} must be a nonterminal (uppercase)", lineno, col
        )
    has_dots, syms, _ = _parse_schema(cur)
    cur.next("arrow", "'->'")
    items = []  # ("t", text, col) | ("c", name, has_dots, syms, col)
    while not cur.done:
        kind, text, col = cur.next()
        if kind == "quoted":
            body = text[1:-1]
            if not body:
                raise GrammarSyntaxError("empty terminal string", lineno, col)
            items.append(("t", body, col))
        elif kind == "ident":
            if cur.peek()[0] == "lparen":
                if not _is_nonterminal_name(text):
                    raise GrammarSyntaxError(
                        f"constituent {text!r} must be a nonterminal (uppercase)",
                        lineno,
                        col,
                    )
                cdots, csyms, _ = _parse_schema(cur)
                items.append(("c", text, cdots, csyms, col))
            else:
                if _is_nonterminal_name(text):
                    raise GrammarSyntaxError(
                        f"nonterminal {text!r} needs a stack schema: "
                        f"write {text}(..) or {text}()",
                        lineno,
                        col,
                    )
                items.append(("t", text, col))
        else:
            raise GrammarSyntaxError(f"unexpected {text!r}", lineno, col)
    return name, lhs, (has_dots, syms), items


def parse_grammar(text: str, *, relaxed: bool = False) -> LigGrammar:
    """Parse the text format.  Strict by default: normal-form violations
    raise `NormalFormError`; with ``relaxed=True`` the grammar is returned
    as written and `normalize` should be applied before further use."""
    start = None
    start_line = None
    stack_syms: list = []
    raw = []  # (lineno, name, lhs, lhs_schema_info, items)

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("%"):
            m = re.match(r"%([A-Za-z]+)\s*(.*)$", stripped)
            word = m.group(1) if m else ""
            rest = m.group(2) if m else ""
            toks = _tokenize_line(rest, lineno)
            if word == "start":
                if len(toks) != 1 or toks[0][0] != "ident":
                    raise GrammarSyntaxError("%start needs one nonterminal", lineno, 1)
                if start is not None:
                    raise GrammarSyntaxError("duplicate %start", lineno, 1)
                start = toks[0][1]
                start_line = lineno
                if not _is_nonterminal_name(start):
                    raise GrammarSyntaxError(
                        f"start symbol {start!r} must be a nonterminal", lineno, toks[0][2]
                    )
            elif word == "stack":
                for kind, sym, col in toks:
                    if kind != "ident":
                        raise GrammarSyntaxError(
                            f"bad stack symbol {sym!r}", lineno, col
                        )
                    if sym not in stack_syms:
                        stack_syms.append(sym)
            else:
                raise GrammarSyntaxError(f"unknown directive %{word}", lineno, 1)
            continue
        cur = _Cursor(_tokenize_line(line, lineno), lineno)
        if cur.done:
            continue
        raw.append((lineno,) + _schema_positions(cur, lineno))

    if start is None:
        raise GrammarSyntaxError("no %start directive", None, None)

    declared = set(stack_syms)
    productions = []
    names_seen = {}
    for idx, (lineno, name, lhs, (ldots, lsyms, ), items) in enumerate(
        (r[0], r[1], r[2], (r[3][0], r[3][1]), r[4]) for r in raw
    ):
        pid = idx + 1
        pname = name if name is not None else f"r{pid}"
        if pname in names_seen:
            raise GrammarSyntaxError(
                f"duplicate production name {pname!r} (also line {names_seen[pname]})",
                lineno,
                1,
            )
        names_seen[pname] = lineno

        for s in lsyms:
            if s not in declared:
                raise GrammarSyntaxError(
                    f"undeclared stack symbol {s!r} (add it to %stack)", lineno, 1
                )
        constituents = [it for it in items if it[0] == "c"]
        primaries = [it for it in constituents if it[2]]

        if not ldots:  # A() -> ... must be a terminal word
            if lsyms:
                raise GrammarSyntaxError("'()' head carries no symbols", lineno, 1)
            if constituents:
                where = constituents[0][-1]
                if primaries:
                    raise GrammarSyntaxError(
                        "a '()' head derives terminals only; structured "
                        "productions need a '(..)' or '(..g)' head",
                        lineno,
                        where,
                    )
                raise GrammarSyntaxError(
                    "no primary constituent: exactly one right-hand-side "
                    "nonterminal must carry '(..'",
                    lineno,
                    where,
                )
            word = tuple(it[1] for it in items)
            productions.append(
                LigProduction(pid, pname, lhs, EMPTY, word=word)
            )
            continue

        lhs_schema = pop(*lsyms) if lsyms else COPY
        if len(primaries) == 0:
            raise GrammarSyntaxError(
                "no primary constituent: exactly one right-hand-side "
                "nonterminal must carry '(..'",
                lineno,
                1,
            )
        if len(primaries) > 1:
            raise GrammarSyntaxError(
                "multiple primary constituents: only one right-hand-side "
                "nonterminal may carry '(..'",
                lineno,
                primaries[1][-1],
            )
        prim = primaries[0]
        for s in prim[3]:
            if s not in declared:
                raise GrammarSyntaxError(
                    f"undeclared stack symbol {s!r} (add it to %stack)", lineno, 1
                )
        prim_schema = push(*prim[3]) if prim[3] else COPY
        pidx = items.index(prim)
        flanks = {True: [], False: []}
        for k, it in enumerate(items):
            if it is prim:
                continue
            if it[0] == "t":
                flanks[k < pidx].append(Flank(it[1], True))
            else:
                # a constituent with '()' schema: secondary
                if it[3]:
                    raise GrammarSyntaxError(
                        "secondary constituents carry an empty stack: "
                        f"write {it[1]}()",
                        lineno,
                        it[-1],
                    )
                flanks[k < pidx].append(Flank(it[1], False))
        productions.append(
            LigProduction(
                pid,
                pname,
                lhs,
                lhs_schema,
                left=tuple(flanks[True]),
                primary=prim[1],
                primary_schema=prim_schema,
                right=tuple(flanks[False]),
            )
        )

    g = assemble_grammar(productions, start, tuple(stack_syms))
    if not relaxed:
        bad = validate_normal_form(g)
        if bad:
            raise NormalFormError(bad)
    return g


def _render_terminal(t) -> str:
    s = str(t)
    return s if _BARE_TERMINAL_RE.match(s) else f'"{s}"'


def render_grammar(g: LigGrammar) -> str:
    """Pretty-print a grammar in the text format; inverse of `parse_grammar`
    up to whitespace.  Only meaningful for grammars over plain string symbols."""
    lines = [f"%start {g.start}"]
    if g.stack_symbols:
        lines.append("%stack " + " ".join(str(s) for s in g.stack_symbols))
    lines.extend(str(p) for p in g.productions)
    return "\n".join(lines) + "\n"


# --- normal form ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    production: str
    rule: str
    message: str

    def __str__(self):
        return f"{self.production}: {self.message} [{self.rule}]"


def validate_normal_form(g: LigGrammar) -> list:
    """Check every production against the normal-form shape; the returned
    list is empty iff the grammar is normal."""
    out = []
    for p in g.productions:
        if p.is_terminal:
            if len(p.word) > 2:
                out.append(
                    Violation(
                        p.name,
                        "word-length",
                        f"terminal word has {len(p.word)} symbols (at most 2)",
                    )
                )
            continue
        depth = len(p.lhs_schema.symbols) + len(p.primary_schema.symbols)
        if depth > 1:
            out.append(
                Violation(
                    p.name,
                    "schema-depth",
                    f"stack schemas move {depth} symbols (at most 1)",
                )
            )
        nflanks = len(p.left) + len(p.right)
        if nflanks > 1:
            out.append(
                Violation(
                    p.name,
                    "flank-count",
                    f"{nflanks} flanking items beside the primary (at most 1)",
                )
            )
    return out


class _FreshNames:
    def __init__(self, taken_nts, taken_names):
        self.taken_nts = set(taken_nts)
        self.taken_names = set(taken_names)
        self.counter = 0

    def nonterminal(self, base) -> str:
        while True:
            self.counter += 1
            cand = f"{base}#{self.counter}"
            if cand not in self.taken_nts:
                self.taken_nts.add(cand)
                return cand

    def prod_name(self, base) -> str:
        k = 1
        while f"{base}#{k}" in self.taken_names:
            k += 1
        name = f"{base}#{k}"
        self.taken_names.add(name)
        return name


def normalize(g: LigGrammar):
    """Rewrite a relaxed grammar into normal form.

    Returns ``(grammar, hom)`` where ``hom`` maps every new production id
    to the id of the source production it stands in for, or None for the
    fresh helper productions.  Only the *string* language is preserved;
    derivations pass through fresh nonterminals named ``<head>#k``.
    An already-normal grammar comes back unchanged with the identity map.
    """
    if not validate_normal_form(g):
        return g, {p.id: p.id for p in g.productions}

    fresh = _FreshNames(g.nonterminals, (p.name for p in g.productions))
    plan = []  # (source_id | None, name, builder args)

    def emit(source_id, name, **kw):
        plan.append((source_id, name, kw))

    for p in g.productions:
        if p.is_terminal:
            if len(p.word) <= 2:
                emit(p.id, p.name, lhs=p.lhs, lhs_schema=EMPTY, word=p.word)
                continue
            # long word: peel one terminal per copy link, empty-stack bottom
            head, schema, src, nm = p.lhs, COPY, p.id, p.name
            word = list(p.word)
            while len(word) > 2:
                nxt = fresh.nonterminal(p.lhs)
                emit(
                    src,
                    nm,
                    lhs=head,
                    lhs_schema=schema,
                    left=(Flank(word[0], True),),
                    primary=nxt,
                    primary_schema=COPY,
                )
                head, word = nxt, word[1:]
                src, nm = None, fresh.prod_name(p.name)
                schema = COPY
            emit(src, nm, lhs=head, lhs_schema=EMPTY, word=tuple(word))
            continue

        pops = list(p.lhs_schema.symbols)  # bottom..top
        pushes = list(p.primary_schema.symbols)
        head, src, nm = p.lhs, p.id, p.name

        def step(source, name, **kw):
            emit(source, name, **kw)

        # (b) peel pops, top symbol first
        while pops and len(pops) + len(pushes) > 1:
            nxt = fresh.nonterminal(head)
            step(
                src,
                nm,
                lhs=head,
                lhs_schema=pop(pops[-1]),
                primary=nxt,
                primary_schema=COPY,
            )
            pops.pop()
            head, src, nm = nxt, None, fresh.prod_name(p.name)
        # (c) peel pushes, bottom symbol first
        while len(pushes) > 1:
            nxt = fresh.nonterminal(head)
            step(
                src,
                nm,
                lhs=head,
                lhs_schema=COPY,
                primary=nxt,
                primary_schema=push(pushes[0]),
            )
            pushes.pop(0)
            head, src, nm = nxt, None, fresh.prod_name(p.name)

        lhs_schema = pop(*pops) if pops else COPY
        prim_schema = push(*pushes) if pushes else COPY

        # (d) peel flanks outside-in, one per fresh copy link; the stack
        # move stays on the outermost production of the chain
        left, right = list(p.left), list(p.right)
        while len(left) + len(right) > 1:
            nxt = fresh.nonterminal(head)
            if left:
                fl, left = left[0], left[1:]
                step(
                    src,
                    nm,
                    lhs=head,
                    lhs_schema=lhs_schema,
                    left=(fl,),
                    primary=nxt,
                    primary_schema=prim_schema,
                )
            else:
                fl, right = right[-1], right[:-1]
                step(
                    src,
                    nm,
                    lhs=head,
                    lhs_schema=lhs_schema,
                    primary=nxt,
                    primary_schema=prim_schema,
                    right=(fl,),
                )
            lhs_schema, prim_schema = COPY, COPY
            head, src, nm = nxt, None, fresh.prod_name(p.name)
        step(
            src,
            nm,
            lhs=head,
            lhs_schema=lhs_schema,
            left=tuple(left),
            primary=p.primary,
            primary_schema=prim_schema,
            right=tuple(right),
        )

    productions = []
    hom = {}
    for i, (source_id, name, kw) in enumerate(plan):
        pid = i + 1
        productions.append(LigProduction(pid, name, **kw))
        hom[pid] = source_id
    out = assemble_grammar(productions, g.start, g.stack_symbols)
    leftover = validate_normal_form(out)
    assert not leftover, f"normalize left violations: {leftover}"
    return out, hom


def cf_backbone(g: LigGrammar) -> CfGrammar:
    """Erase all stack schemas; production i of the result is production i
    of the input read as a plain CFG rule."""
    prods = tuple(
        CfProduction(p.id, p.name, p.lhs, p.rhs_symbols()) for p in g.productions
    )
    return CfGrammar(g.nonterminals, g.terminals, prods, g.start)
