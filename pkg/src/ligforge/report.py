"""Run statistics, benchmark tables, and plots.

`RunReport` summarizes one recognition run in plain data (counts only),
so it serializes to JSON and can be recomputed from a fresh pipeline for
comparison.  `bench_rows` scales one grammar over a family of inputs and
feeds either the CSV writer or the matplotlib figure; matplotlib is
imported only when a figure is actually rendered.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .derive import DerivationCount, count_sentences
from .ldg import PipelineResult, recognize, static_filter


@dataclass
class RunReport:
    grammar: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)
    forest: dict = field(default_factory=dict)
    ldg: dict = field(default_factory=dict)
    member: bool = False
    count: Optional[int] = None
    count_is_infinite: bool = False
    timings_ms: dict = field(default_factory=dict)

    @classmethod
    def from_pipeline(
        cls, result: PipelineResult, count: Optional[DerivationCount] = None
    ) -> "RunReport":
        if count is None:
            count = count_sentences(result.reduced)
        lig = result.liged.lig
        rel_sizes = {
            str(kind): result.relations.count(kind)
            for kind in sorted(result.relations.kinds(), key=str)
        }
        forms: dict = {}
        for p in result.reduced.productions:
            forms[str(p.form)] = forms.get(str(p.form), 0) + 1
        src = result.source
        return cls(
            grammar={
                "nonterminals": len(src.nonterminals),
                "terminals": len(src.terminals),
                "stack_symbols": len(src.stack_symbols),
                "productions": len(src.productions),
            },
            relations=rel_sizes,
            forest={
                "nonterminals": len(result.forest.grammar.nonterminals),
                "productions": len(result.forest.grammar.productions),
            },
            ldg={
                "productions": len(result.reduced.productions),
                "forms": forms,
            },
            member=result.member,
            count=count.value,
            count_is_infinite=count.is_infinite,
            timings_ms=dict(result.timings),
        )

    def to_json_dict(self) -> dict:
        return asdict(self)

    def same_stats(self, other: "RunReport") -> bool:
        """Equality on everything except wall-clock noise."""
        a, b = self.to_json_dict(), other.to_json_dict()
        a.pop("timings_ms")
        b.pop("timings_ms")
        return a == b


BENCH_FIELDS = (
    "n",
    "tokens",
    "member",
    "forest_nonterminals",
    "forest_productions",
    "ldg_productions",
    "form_1",
    "form_2",
    "form_3",
    "form_4",
    "form_5",
    "form_6",
    "form_7",
    "form_8",
    "form_9",
    "ms_forest",
    "ms_attach",
    "ms_relations",
    "ms_ldg",
    "ms_reduce",
)


def bench_rows(
    lig,
    template: Sequence,
    ns: Sequence[int],
    use_filter: bool = True,
) -> list:
    """One recognition per n, on the template tokens repeated n times."""
    patterns = static_filter(lig) if use_filter else None
    rows = []
    for n in ns:
        tokens = tuple(template) * n
        res = recognize(lig, tokens, patterns)
        forms = {k: 0 for k in range(1, 10)}
        for p in res.reduced.productions:
            forms[p.form] += 1
        row = {
            "n": n,
            "tokens": len(tokens),
            "member": int(res.member),
            "forest_nonterminals": len(res.forest.grammar.nonterminals),
            "forest_productions": len(res.forest.grammar.productions),
            "ldg_productions": len(res.reduced.productions),
        }
        for k in range(1, 10):
            row[f"form_{k}"] = forms[k]
        for stage in ("forest", "attach", "relations", "ldg", "reduce"):
            row[f"ms_{stage}"] = round(res.timings.get(stage, 0.0), 3)
        rows.append(row)
    return rows


def write_csv(rows: Sequence[dict], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=BENCH_FIELDS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def fit_degree6(rows: Sequence[dict]) -> float:
    """The smallest c with ldg_productions <= c*n^6 on the given rows."""
    c = 0.0
    for row in rows:
        if row["n"] > 0:
            c = max(c, row["ldg_productions"] / row["n"] ** 6)
    return c


def render_figure(rows: Sequence[dict], path: str) -> None:
    """Two panels: structure sizes against input scale (with the fitted
    degree-6 envelope) and the per-case production counts."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [r["n"] for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))

    ax1.plot(ns, [r["forest_productions"] for r in rows], "o-", label="forest productions")
    ax1.plot(ns, [r["ldg_productions"] for r in rows], "s-", label="derivation grammar")
    c = fit_degree6(rows)
    if c > 0:
        ax1.plot(
            ns,
            [c * n**6 for n in ns],
            "--",
            color="gray",
            label=f"{c:.2e} * n^6",
        )
    ax1.set_xlabel("n")
    ax1.set_ylabel("productions")
    ax1.set_yscale("log")
    ax1.set_title("structure sizes")
    ax1.legend(fontsize=8)

    bottoms = [0.0] * len(rows)
    for k in range(1, 10):
        vals = [r[f"form_{k}"] for r in rows]
        if not any(vals):
            continue
        ax2.bar(ns, vals, bottom=bottoms, label=f"case {k}")
        bottoms = [b + v for b, v in zip(bottoms, vals)]
    ax2.set_xlabel("n")
    ax2.set_ylabel("productions by case")
    ax2.set_title("derivation grammar composition")
    ax2.legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
