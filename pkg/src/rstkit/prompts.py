"""Prompt templates for the four decision types.

Rendering is byte-stable: fixed cue lines, single newline separators, no
trailing newline after the final cue. Fine-tuned and prompted models are
sensitive to drift here, so the exact bytes are pinned by golden tests.
"""

from __future__ import annotations

from typing import Sequence

from .core import NUCLEARITY_PATTERNS, LabelInventory

# Prompt kinds; also the "kind" field of training records and trace entries.
ACTION = "action"
NUCLEARITY = "nuclearity"
RELATION = "relation"
SPLIT = "split"
PROMPT_KINDS = (ACTION, NUCLEARITY, RELATION, SPLIT)

PromptKind = str

ACTION_LABELS = ("shift", "reduce")

# Rendered for a stack or queue position that holds nothing.
EMPTY_SLOT = "None"

_ELLIPSIS = " ... "


def truncate_text(text: str, budget: int | None) -> str:
    """Center-elide text over the budget, keeping both edges.

    Decision prompts care most about span boundaries, so the middle is what
    goes. Deterministic; None disables.
    """
    if budget is None or len(text) <= budget:
        return text
    if budget <= len(_ELLIPSIS):
        return text[:budget]
    keep = budget - len(_ELLIPSIS)
    head = (keep + 1) // 2
    tail = keep - head
    return text[:head] + _ELLIPSIS + (text[-tail:] if tail else "")


def _slot(text: str | None, budget: int | None) -> str:
    if text is None or text == "":
        return EMPTY_SLOT
    return truncate_text(text, budget)


def render_action_prompt(
    stack2: str | None,
    stack1: str | None,
    queue1: str | None,
    truncate: int | None = None,
) -> str:
    """Shift/reduce decision over the top two stack spans and queue front."""
    return (
        f"Stack2: {_slot(stack2, truncate)}\n"
        f"Stack1: {_slot(stack1, truncate)}\n"
        f"Queue1: {_slot(queue1, truncate)}\n"
        "Action (shift or reduce):"
    )


def render_nuclearity_prompt(
    span2: str, span1: str, truncate: int | None = None
) -> str:
    """Nuclearity decision; span2 is the left span, span1 the right."""
    options = ", ".join(NUCLEARITY_PATTERNS)
    return (
        f"Span2: {_slot(span2, truncate)}\n"
        f"Span1: {_slot(span1, truncate)}\n"
        f"Nucleus label ({options}):"
    )


def render_relation_prompt(
    span2: str,
    span1: str,
    nuclearity: str,
    inventory: LabelInventory,
    truncate: int | None = None,
) -> str:
    """Relation decision, conditioned on the already-predicted nuclearity.

    The options list follows inventory order exactly.
    """
    if nuclearity not in NUCLEARITY_PATTERNS:
        raise ValueError(f"unknown nuclearity pattern {nuclearity!r}")
    options = ", ".join(inventory.relations)
    return (
        f"Span2: {_slot(span2, truncate)}\n"
        f"Span1: {_slot(span1, truncate)}\n"
        f"Nucleus label: {nuclearity}\n"
        f"Relation label ({options}):"
    )


def render_split_prompt(
    edu_texts: Sequence[str], truncate: int | None = None
) -> str:
    """Split-point decision over a span's EDUs.

    EDUs are renumbered so the prompt always starts at 0 regardless of where
    the span sits in the document; the inclusive bound is length - 2, the
    last index a left half may end on.
    """
    if len(edu_texts) < 2:
        raise ValueError("split prompts need at least two EDUs")
    lines = ["Input:"]
    for offset, text in enumerate(edu_texts):
        lines.append(f"{offset}: {_slot(text, truncate)}")
    lines.append(f"Split point (0 - {len(edu_texts) - 2}):")
    return "\n".join(lines)


def split_labels(span_len: int) -> tuple[str, ...]:
    """Valid split answers for a span of ``span_len`` EDUs: "0".."len-2"."""
    if span_len < 2:
        raise ValueError("spans of fewer than two EDUs cannot split")
    return tuple(str(k) for k in range(span_len - 1))
