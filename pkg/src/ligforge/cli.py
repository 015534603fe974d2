"""The ligforge command line.

Subcommands: check, parse, relations, forest, ldg, oracle, bench, fuzz.
Exit status is 0 for a positive verdict (member, nonempty), 1 for a
negative one, 2 for any error.  Set LIGFORGE_COLOR=0 to disable styling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from random import Random

from .derive import (
    count_sentences,
    enumerate_sentences,
    map_to_source,
    sentence_to_tree,
)
from .errors import LigforgeError
from .forest import build_fsa, build_shared_forest
from .fuzz import compare_with_oracle, random_lig
from .grammar import cf_backbone, normalize, parse_grammar, render_grammar
from .ldg import build_ldg, recognize, reduce_ldg, static_filter, static_ldg
from .oracle import OracleConfig, linearize, search_trees
from .relations import closure, level1
from .report import RunReport, bench_rows, render_figure, write_csv

_KIND_ORDER = {"eq1": 0, "push1": 1, "pop1": 2, "eqp": 3, "spine": 4, "popp": 5}


def _style(text: str, code: str) -> str:
    if os.environ.get("LIGFORGE_COLOR") == "0" or not sys.stdout.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _good(text: str) -> str:
    return _style(text, "32")


def _bad(text: str) -> str:
    return _style(text, "31")


def _load(path: str, relaxed: bool):
    """Returns (grammar, display names by production id; None marks fresh
    helper productions that should stay out of derivation listings)."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    g = parse_grammar(text, relaxed=relaxed)
    if relaxed:
        g, hom = normalize(g)
        names = {}
        for p in g.productions:
            src = hom[p.id]
            names[p.id] = p.name if src is not None else None
        return g, names
    return g, {p.id: p.name for p in g.productions}


def _tokens(arg: str, chars: bool) -> tuple:
    return tuple(arg) if chars else tuple(arg.split())


def _derivation_text(ids, names) -> str:
    shown = [names[i] for i in ids if names.get(i) is not None]
    return " ".join(shown) if shown else "(all helper productions)"


def _sorted_kinds(rels):
    return sorted(rels.kinds(), key=lambda k: (_KIND_ORDER[k.kind], str(k.gamma)))


def _relations_json(rels) -> list:
    out = []
    for kind in _sorted_kinds(rels):
        entry = {"kind": kind.kind, "pairs": sorted(
            [str(a), str(b)] for a, b in rels.pairs(kind)
        )}
        if kind.gamma is not None:
            entry["gamma"] = str(kind.gamma)
        out.append(entry)
    return out


def _print_relations(rels) -> None:
    for kind in _sorted_kinds(rels):
        pairs = sorted(
            f"({a}, {b})" for a, b in ((str(a), str(b)) for a, b in rels.pairs(kind))
        )
        print(f"  {kind.label:>6}  {' '.join(pairs)}")


def _ldg_json(d) -> dict:
    names = {p.id: p.name for p in d.source.productions}
    prods = []
    for p in d.productions:
        rhs = []
        for s in p.rhs:
            if isinstance(s, int):
                rhs.append({"production": s, "name": names[s]})
            else:
                rhs.append({"nonterminal": str(s)})
        prods.append({"lhs": str(p.lhs), "rhs": rhs, "form": p.form})
    return {
        "start": str(d.start),
        "terminals": list(d.terminals),
        "productions": prods,
    }


def _render_tree_lines(lig, tree, names, indent="", role="") -> list:
    p = lig.production(tree.production)
    stack = " ".join(str(s) for s in tree.stack)
    name = names.get(tree.production) or f"#{tree.production}"
    head = f"{indent}{role}{tree.symbol}({stack}) via {name}"
    if p.is_terminal:
        word = " ".join(str(t) for t in p.word) if p.word else "(empty)"
        return [f"{head} = {word}"]
    lines = [head]
    if tree.secondary is not None:
        lines.extend(
            _render_tree_lines(lig, tree.secondary, names, indent + "  ", "flank ")
        )
    lines.extend(_render_tree_lines(lig, tree.child, names, indent + "  "))
    return lines


def _tree_dot(lig, trees, names) -> str:
    lines = ["digraph derivations {", "  node [fontname=monospace];"]
    counter = [0]

    def emit(t, cluster):
        my = f"n{cluster}_{counter[0]}"
        counter[0] += 1
        stack = " ".join(str(s) for s in t.stack)
        name = names.get(t.production) or f"#{t.production}"
        p = lig.production(t.production)
        label = f"{t.symbol}({stack})\\n{name}"
        if p.is_terminal:
            word = " ".join(str(x) for x in p.word) if p.word else "(empty)"
            label += f" = {word}"
        lines.append(f'  {my} [label="{label}"];')
        if t.secondary is not None:
            sec = emit(t.secondary, cluster)
            lines.append(f"  {my} -> {sec} [style=dashed];")
        if t.child is not None:
            child = emit(t.child, cluster)
            lines.append(f"  {my} -> {child};")
        return my

    for k, t in enumerate(trees):
        emit(t, k)
    lines.append("}")
    return "\n".join(lines)


def _forest_dot(forest) -> str:
    lines = ["digraph forest {", "  node [fontname=monospace];"]
    nts = set(forest.grammar.nonterminals)
    seen = set()

    def nt_node(sym):
        key = f'"{sym}"'
        if key not in seen:
            seen.add(key)
            lines.append(f"  {key} [shape=ellipse];")
        return key

    for cp in forest.grammar.productions:
        box = f"p{cp.id}"
        lines.append(f'  {box} [shape=box, label="{cp.name}"];')
        lines.append(f"  {nt_node(cp.lhs)} -> {box};")
        for k, s in enumerate(cp.rhs):
            if s in nts:
                lines.append(f"  {box} -> {nt_node(s)} [label={k}];")
            else:
                leaf = f"{box}t{k}"
                lines.append(f'  {leaf} [shape=plaintext, label="{s}"];')
                lines.append(f"  {box} -> {leaf} [label={k}];")
    lines.append("}")
    return "\n".join(lines)


# --- subcommands ---------------------------------------------------------------


def cmd_check(args) -> int:
    g, _ = _load(args.grammar, args.relaxed)
    rels = closure(level1(g))
    reduced = reduce_ldg(build_ldg(g, rels))
    empty = not reduced.productions
    if args.json:
        payload = {
            "grammar": {
                "nonterminals": len(g.nonterminals),
                "terminals": len(g.terminals),
                "stack_symbols": len(g.stack_symbols),
                "productions": len(g.productions),
            },
            "relations": _relations_json(rels),
            "static_ldg": _ldg_json(reduced),
            "empty": empty,
        }
        print(json.dumps(payload, indent=2))
        return 1 if empty else 0
    print(
        f"grammar {args.grammar}: {len(g.nonterminals)} nonterminals, "
        f"{len(g.terminals)} terminals, {len(g.stack_symbols)} stack symbols, "
        f"{len(g.productions)} productions"
    )
    print("relations:")
    _print_relations(rels)
    print(f"derivation grammar (static, reduced): {len(reduced.productions)} productions")
    for p in reduced.productions:
        print(f"  {reduced.format_production(p)}   (case {p.form})")
    verdict = _bad("empty") if empty else _good("nonempty")
    print(f"language: {verdict}")
    return 1 if empty else 0


def cmd_relations(args) -> int:
    g, _ = _load(args.grammar, args.relaxed)
    rels = closure(level1(g))
    if args.json:
        print(json.dumps(_relations_json(rels), indent=2))
    else:
        _print_relations(rels)
    return 0


def cmd_forest(args) -> int:
    g, _ = _load(args.grammar, args.relaxed)
    tokens = _tokens(args.input, args.chars)
    fsa = build_fsa(tokens, g.terminals)
    forest = build_shared_forest(cf_backbone(g), fsa)
    if args.format == "json":
        prods = []
        for cp in forest.grammar.productions:
            prov = forest.provenance[cp.id]
            prods.append(
                {
                    "name": cp.name,
                    "lhs": str(cp.lhs),
                    "rhs": [str(s) for s in cp.rhs],
                    "source": prov.source_id,
                    "states": list(prov.states),
                }
            )
        payload = {
            "tokens": [str(t) for t in tokens],
            "start": str(forest.grammar.start),
            "nonterminals": len(forest.grammar.nonterminals),
            "productions": prods,
            "empty": forest.empty,
        }
        print(json.dumps(payload, indent=2))
    elif args.format == "dot":
        print(_forest_dot(forest))
    else:
        shown = " ".join(str(t) for t in tokens) or "(empty)"
        print(
            f"forest for {shown}: {len(forest.grammar.nonterminals)} nonterminals, "
            f"{len(forest.grammar.productions)} productions, start {forest.grammar.start}"
        )
        names = {p.id: p.name for p in cf_backbone(g).productions}
        for cp in forest.grammar.productions:
            prov = forest.provenance[cp.id]
            rhs = " ".join(str(s) for s in cp.rhs) or "(empty)"
            src = names[prov.source_id]
            states = ",".join(str(s) for s in prov.states)
            print(f"  {cp.name}: {cp.lhs} -> {rhs}   ({src} @ {states})")
    return 1 if forest.empty else 0


def cmd_ldg(args) -> int:
    g, _ = _load(args.grammar, args.relaxed)
    if args.input is None:
        full = static_ldg(g)
        reduced = reduce_ldg(full)
        label = "static"
    else:
        tokens = _tokens(args.input, args.chars)
        patterns = None if args.no_static_filter else static_filter(g)
        res = recognize(g, tokens, patterns)
        full, reduced = res.ldg, res.reduced
        label = "forest"
    if args.json:
        print(json.dumps(_ldg_json(reduced), indent=2))
        return 1 if not reduced.productions else 0
    print(
        f"{label} derivation grammar: {len(full.productions)} productions, "
        f"{len(reduced.productions)} after reduction"
    )
    for p in reduced.productions:
        print(f"  {reduced.format_production(p)}   (case {p.form})")
    return 1 if not reduced.productions else 0


def cmd_parse(args) -> int:
    g, names = _load(args.grammar, args.relaxed)
    tokens = _tokens(args.input, args.chars)
    patterns = None if args.no_static_filter else static_filter(g)
    res = recognize(g, tokens, patterns)
    count = count_sentences(res.reduced)
    report = RunReport.from_pipeline(res, count)

    enumerated = []
    if args.enumerate:
        enumerated = enumerate_sentences(
            res.reduced, max_count=args.enumerate, max_len=args.max_len
        )

    if args.json:
        payload = report.to_json_dict()
        payload["tokens"] = [str(t) for t in tokens]
        payload["derivations"] = [
            [names[i] or f"#{i}" for i in map_to_source(e.sentence, res.liged.provenance)]
            for e in enumerated
        ]
        print(json.dumps(payload, indent=2))
        return 0 if res.member else 1

    shown = " ".join(str(t) for t in tokens) or "(empty)"
    print(f"input: {shown} ({len(tokens)} tokens)")
    print(_good("member") if res.member else _bad("not a member"))
    if args.count or args.enumerate:
        print(f"derivations: {count}")
    if args.enumerate:
        for e in enumerated:
            src = map_to_source(e.sentence, res.liged.provenance)
            print(f"  {_derivation_text(src, names)}")
            if args.trees:
                tree = sentence_to_tree(g, src)
                for line in _render_tree_lines(g, tree, names, indent="    "):
                    print(line)
    if args.dot:
        trees = [
            sentence_to_tree(g, map_to_source(e.sentence, res.liged.provenance))
            for e in enumerated
        ]
        print(_tree_dot(g, trees, names))
    return 0 if res.member else 1


def cmd_oracle(args) -> int:
    g, names = _load(args.grammar, args.relaxed)
    tokens = _tokens(args.input, args.chars)
    cfg = OracleConfig(args.max_nodes, args.max_stack)
    result = search_trees(g, tokens, cfg)
    derivations = sorted(linearize(t) for t in result.trees)
    if args.json:
        payload = {
            "tokens": [str(t) for t in tokens],
            "trees": len(result.trees),
            "derivations": [
                [names[i] or f"#{i}" for i in drv] for drv in derivations
            ],
            "complete": result.complete,
            "explored": result.explored,
        }
        print(json.dumps(payload, indent=2))
        return 0 if result.member else 1
    print(f"trees found: {len(result.trees)}")
    for drv in derivations:
        print(f"  {_derivation_text(drv, names)}")
    print(f"complete within bounds: {'yes' if result.complete else 'no'}")
    return 0 if result.member else 1


def _parse_ns(text: str) -> list:
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise LigforgeError(f"bad range {text!r}; use start:stop[:step]")
        if step < 1:
            raise LigforgeError("range step must be positive")
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.split(",") if x.strip() != ""]


def cmd_bench(args) -> int:
    g, _ = _load(args.grammar, args.relaxed)
    template = _tokens(args.template, args.chars)
    ns = _parse_ns(args.ns)
    rows = bench_rows(g, template, ns, use_filter=not args.no_static_filter)
    write_csv(rows, sys.stdout)
    if args.plot:
        render_figure(rows, args.plot)
        print(f"figure written to {args.plot}", file=sys.stderr)
    return 0


def cmd_fuzz(args) -> int:
    rng = Random(args.seed)
    max_stack = args.max_stack if args.max_stack else args.max_nodes + 1
    cfg = OracleConfig(args.max_nodes, max_stack)
    failures = 0
    for idx in range(args.grammars):
        g = random_lig(rng)
        problems = compare_with_oracle(g, args.max_len, cfg)
        if problems:
            failures += 1
            print(f"grammar {idx} disagrees with the oracle:")
            print(render_grammar(g))
            for issue in problems:
                print(f"  {issue}")
    if failures:
        print(_bad(f"{failures}/{args.grammars} grammars disagree (seed {args.seed})"))
        return 2
    print(
        _good(
            f"{args.grammars} grammars agree with the oracle "
            f"(seed {args.seed}, inputs up to length {args.max_len})"
        )
    )
    return 0


# --- wiring ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=0, help="seed for anything randomized"
    )
    common.add_argument(
        "--relaxed",
        action="store_true",
        help="accept non-normal-form grammars and normalize them",
    )

    parser = argparse.ArgumentParser(
        prog="ligforge",
        description="Recognition and derivation tools for stack-carrying grammars.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a grammar, report emptiness")
    p.add_argument("grammar")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("parse", parents=[common], help="recognize an input, enumerate derivations")
    p.add_argument("grammar")
    p.add_argument("input", help="whitespace-separated tokens (see --chars)")
    p.add_argument("--chars", action="store_true", help="treat the input as one token per character")
    p.add_argument("--enumerate", type=int, metavar="K", help="list the first K derivations")
    p.add_argument("--max-len", type=int, help="cap enumerated derivation length")
    p.add_argument("--count", action="store_true", help="print the derivation count")
    p.add_argument("--trees", action="store_true", help="print reconstructed trees")
    p.add_argument("--no-static-filter", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", action="store_true", help="emit enumerated trees as graphviz")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("relations", parents=[common], help="print the stack-flow relations")
    p.add_argument("grammar")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_relations)

    p = sub.add_parser("forest", parents=[common], help="build the shared forest for an input")
    p.add_argument("grammar")
    p.add_argument("input")
    p.add_argument("--chars", action="store_true")
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    p.set_defaults(fn=cmd_forest)

    p = sub.add_parser("ldg", parents=[common], help="print the derivation grammar")
    p.add_argument("grammar")
    p.add_argument("input", nargs="?", help="when given, use the input's forest")
    p.add_argument("--chars", action="store_true")
    p.add_argument("--no-static-filter", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_ldg)

    p = sub.add_parser("oracle", parents=[common], help="brute-force tree search (reference)")
    p.add_argument("grammar")
    p.add_argument("input")
    p.add_argument("--chars", action="store_true")
    p.add_argument("--max-nodes", type=int, required=True, help="tree size cap")
    p.add_argument("--max-stack", type=int, required=True, help="stack depth cap (exclusive)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("bench", parents=[common], help="scale one grammar over input sizes")
    p.add_argument("grammar")
    p.add_argument("template", help="tokens repeated n times per row")
    p.add_argument("--chars", action="store_true")
    p.add_argument("--ns", default="1:12", help="sizes: start:stop[:step] or comma list")
    p.add_argument("--plot", metavar="PATH", help="also render a figure (png/svg/pdf)")
    p.add_argument("--no-static-filter", action="store_true")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("fuzz", parents=[common], help="random grammars against the oracle")
    p.add_argument("--grammars", type=int, default=25)
    p.add_argument("--max-len", type=int, default=3, help="input length cap")
    p.add_argument("--max-nodes", type=int, default=9, help="derivation length cap")
    p.add_argument("--max-stack", type=int, default=0, help="0 means max-nodes + 1")
    p.set_defaults(fn=cmd_fuzz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except LigforgeError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
