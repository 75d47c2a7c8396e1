"""Top-down parsing by recursive span splitting, driven by a decision oracle.

Each span of two or more EDUs is split at an oracle-chosen point, labeled
immediately, and the halves are processed left before right. The split
answer is a 0-based relative index (the span's EDUs are renumbered from 0
in the prompt), so the same fine-tuned model works anywhere in a document.

The traversal uses an explicit work stack: right-heavy trees over long
documents nest as deep as the document is long.
"""

from __future__ import annotations

import re
from typing import Sequence

from .core import (
    NUCLEARITY_PATTERNS,
    Edu,
    LabelInventory,
    Leaf,
    Node,
    RstTree,
    span_text,
)
from .engine import EmptyDocument, ParsePolicy, ParseResult, TraceEntry
from .oracle import Oracle, OracleQuery, resolve_label
from .prompts import (
    NUCLEARITY,
    RELATION,
    SPLIT,
    render_nuclearity_prompt,
    render_relation_prompt,
    render_split_prompt,
    split_labels,
)

_INTEGER_RE = re.compile(r"[+-]?\d+")


def relative_index_bounds(span: tuple[int, int]) -> tuple[int, int]:
    """Inclusive bounds of valid split answers for a document span.

    A span (i, j) renumbers its EDUs from 0; the left half may end at any
    relative index from 0 to j-i-1 (one before the last EDU).
    """
    first, last = span
    if last <= first:
        raise ValueError(f"span {span} has nothing to split")
    return (0, last - first - 1)


def parse_top_down(
    edus: Sequence[Edu],
    oracle: Oracle,
    inventory: LabelInventory,
    policy: ParsePolicy = ParsePolicy(),
) -> ParseResult:
    """Parse a document by splitting spans from the top.

    Split answers outside 0..len-2 or unparseable ones are corrected to 0
    and flagged; the trace note tells the two apart. Two-EDU spans have a
    single legal split, taken without a query under the default policy.
    """
    if not edus:
        raise EmptyDocument("cannot parse a document with no EDUs")
    n = len(edus)
    trace: list[TraceEntry] = []
    step = 0

    if n == 1:
        return ParseResult(tree=Leaf(edus[0]), trace=())

    # work items: ("span", i, j) decides and expands a span;
    # ("make", nuc, rel) joins the two finished subtrees below it.
    work: list[tuple] = [("span", 1, n)]
    out: list[RstTree] = []

    while work:
        item = work.pop()
        if item[0] == "make":
            _, nuclearity, relation = item
            right = out.pop()
            left = out.pop()
            out.append(Node(left, right, nuclearity, relation))
            continue

        _, first, last = item
        if first == last:
            out.append(Leaf(edus[first - 1]))
            continue

        state = f"span=({first},{last})"
        length = last - first + 1
        labels = split_labels(length)

        if length == 2 and policy.skip_forced:
            k = 0
            trace.append(
                TraceEntry(
                    step=step, kind=SPLIT, state=state,
                    prompt=None, raw=None, resolved="0", forced=True,
                )
            )
        else:
            texts = [edu.text for edu in edus[first - 1 : last]]
            prompt = render_split_prompt(texts, policy.truncate_chars)
            raw = oracle.complete(OracleQuery(SPLIT, prompt, labels))
            resolved = resolve_label(raw, labels)
            corrected, note = False, ""
            if resolved is None:
                first_line = raw.split("\n", 1)[0].strip()
                note = (
                    "out-of-range"
                    if _INTEGER_RE.fullmatch(first_line)
                    else "unparseable"
                )
                resolved, corrected = "0", True
            trace.append(
                TraceEntry(
                    step=step, kind=SPLIT, state=state,
                    prompt=prompt, raw=raw, resolved=resolved,
                    corrected=corrected, note=note,
                )
            )
            k = int(resolved)
        step += 1

        mid = first + k
        left_text = span_text(edus, (first, mid))
        right_text = span_text(edus, (mid + 1, last))

        nuc_prompt = render_nuclearity_prompt(
            left_text, right_text, policy.truncate_chars
        )
        raw = oracle.complete(
            OracleQuery(NUCLEARITY, nuc_prompt, NUCLEARITY_PATTERNS)
        )
        nuclearity = resolve_label(raw, NUCLEARITY_PATTERNS)
        corrected = nuclearity is None
        if nuclearity is None:
            nuclearity = inventory.default_nuclearity
        trace.append(
            TraceEntry(
                step=step, kind=NUCLEARITY, state=state,
                prompt=nuc_prompt, raw=raw, resolved=nuclearity,
                corrected=corrected, note="unparseable" if corrected else "",
            )
        )
        step += 1

        rel_prompt = render_relation_prompt(
            left_text, right_text, nuclearity, inventory, policy.truncate_chars
        )
        raw = oracle.complete(
            OracleQuery(RELATION, rel_prompt, inventory.relations)
        )
        relation = resolve_label(raw, inventory.relations)
        corrected = relation is None
        if relation is None:
            relation = inventory.default_relation
        trace.append(
            TraceEntry(
                step=step, kind=RELATION, state=state,
                prompt=rel_prompt, raw=raw, resolved=relation,
                corrected=corrected, note="unparseable" if corrected else "",
            )
        )
        step += 1

        # left is pushed last so its decisions come right after the parent's
        work.append(("make", nuclearity, relation))
        work.append(("span", mid + 1, last))
        work.append(("span", first, mid))

    assert len(out) == 1
    return ParseResult(tree=out[0], trace=tuple(trace))
