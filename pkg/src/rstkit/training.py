"""Gold derivation walks: training pairs and replay scripts.

A walk simulates an engine over a gold tree and emits exactly the queries
the engine would make under the same policy, paired with the gold answers.
The same walk therefore serves two purposes: its (prompt, completion) pairs
are the fine-tuning data, and its (kind, completion) pairs are the script
that drives a replay parse back to the original tree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .bottomup import ParserState, apply_action
from .core import (
    LabelInventory,
    Reduce,
    derive_shift_reduce_sequence,
    derive_split_sequence,
    span_text,
    tree_text,
)
from .corpus import Document
from .engine import ParsePolicy
from .oracle import ReplayOracle
from .prompts import (
    ACTION,
    NUCLEARITY,
    RELATION,
    SPLIT,
    PromptKind,
    render_action_prompt,
    render_nuclearity_prompt,
    render_relation_prompt,
    render_split_prompt,
)

BOTTOM_UP = "bottom-up"
TOP_DOWN = "top-down"
STRATEGIES = (BOTTOM_UP, TOP_DOWN)

# Reference fine-tuning configuration for the exported pairs, recorded in
# the export's metadata sidecar so a training run is reproducible from the
# artifact alone.
FINE_TUNING_DEFAULTS = {
    "epochs": 5,
    "batch_size": 16,
    "optimizer": "adam",
    "learning_rate": 2e-4,
    "lr_schedule": "linear-warmup-then-cosine",
    "warmup_ratio": 0.03,
    "gradient_clipping": 1.0,
    "lora_r": 64,
    "lora_alpha": 16,
    "lora_dropout": 0.1,
    "lora_targets": "all-linear",
    "quantization": "4bit-nf4-double",
}


@dataclass(frozen=True)
class TrainingExample:
    """One supervised pair; ``step`` matches the engine's trace numbering."""

    kind: PromptKind
    prompt: str
    completion: str
    doc_id: str
    step: int


def bottom_up_walk(
    doc: Document,
    inventory: LabelInventory,
    policy: ParsePolicy = ParsePolicy(),
) -> Iterator[TrainingExample]:
    """Oracle-visible decisions of a gold bottom-up parse, in engine order.

    Forced actions consume a step number but yield nothing, mirroring the
    engine's trace; reduce labels use the gold nuclearity as the "predicted"
    value inside the relation prompt (teacher forcing).
    """
    if doc.tree is None:
        raise ValueError(f"document {doc.doc_id} has no gold tree")
    state = ParserState.initial(doc.edus)
    step = 0
    for action in derive_shift_reduce_sequence(doc.tree):
        legal = state.legal_actions()
        stack2 = tree_text(state.stack[-2]) if len(state.stack) >= 2 else None
        stack1 = tree_text(state.stack[-1]) if state.stack else None
        queue1 = state.queue[0].text if state.queue else None
        if not (len(legal) == 1 and policy.skip_forced):
            yield TrainingExample(
                kind=ACTION,
                prompt=render_action_prompt(
                    stack2, stack1, queue1, policy.truncate_chars
                ),
                completion=str(action),
                doc_id=doc.doc_id,
                step=step,
            )
        step += 1
        if isinstance(action, Reduce):
            assert stack2 is not None and stack1 is not None
            yield TrainingExample(
                kind=NUCLEARITY,
                prompt=render_nuclearity_prompt(
                    stack2, stack1, policy.truncate_chars
                ),
                completion=action.nuclearity,
                doc_id=doc.doc_id,
                step=step,
            )
            step += 1
            yield TrainingExample(
                kind=RELATION,
                prompt=render_relation_prompt(
                    stack2, stack1, action.nuclearity, inventory,
                    policy.truncate_chars,
                ),
                completion=action.relation,
                doc_id=doc.doc_id,
                step=step,
            )
            step += 1
        state = apply_action(state, action)


def top_down_walk(
    doc: Document,
    inventory: LabelInventory,
    policy: ParsePolicy = ParsePolicy(),
) -> Iterator[TrainingExample]:
    """Oracle-visible decisions of a gold top-down parse, in engine order."""
    if doc.tree is None:
        raise ValueError(f"document {doc.doc_id} has no gold tree")
    step = 0
    for split in derive_split_sequence(doc.tree):
        first, last = split.span
        length = last - first + 1
        if not (length == 2 and policy.skip_forced):
            texts = [edu.text for edu in doc.edus[first - 1 : last]]
            yield TrainingExample(
                kind=SPLIT,
                prompt=render_split_prompt(texts, policy.truncate_chars),
                completion=str(split.k),
                doc_id=doc.doc_id,
                step=step,
            )
        step += 1
        mid = first + split.k
        left_text = span_text(doc.edus, (first, mid))
        right_text = span_text(doc.edus, (mid + 1, last))
        yield TrainingExample(
            kind=NUCLEARITY,
            prompt=render_nuclearity_prompt(
                left_text, right_text, policy.truncate_chars
            ),
            completion=split.nuclearity,
            doc_id=doc.doc_id,
            step=step,
        )
        step += 1
        yield TrainingExample(
            kind=RELATION,
            prompt=render_relation_prompt(
                left_text, right_text, split.nuclearity, inventory,
                policy.truncate_chars,
            ),
            completion=split.relation,
            doc_id=doc.doc_id,
            step=step,
        )
        step += 1


def gold_walk(
    doc: Document,
    inventory: LabelInventory,
    strategy: str,
    policy: ParsePolicy = ParsePolicy(),
) -> Iterator[TrainingExample]:
    if strategy == BOTTOM_UP:
        return bottom_up_walk(doc, inventory, policy)
    if strategy == TOP_DOWN:
        return top_down_walk(doc, inventory, policy)
    raise ValueError(f"unknown strategy {strategy!r}")


def replay_oracle(
    doc: Document,
    inventory: LabelInventory,
    strategy: str,
    policy: ParsePolicy = ParsePolicy(),
) -> ReplayOracle:
    """Oracle that answers a parse of ``doc`` with its own gold decisions."""
    return ReplayOracle(
        (example.kind, example.completion)
        for example in gold_walk(doc, inventory, strategy, policy)
    )


def export_training_pairs(
    documents: Iterable[Document],
    inventory: LabelInventory,
    strategy: str,
    policy: ParsePolicy = ParsePolicy(),
) -> Iterator[TrainingExample]:
    """All supervised pairs for a corpus, document by document."""
    for doc in documents:
        yield from gold_walk(doc, inventory, strategy, policy)


def example_to_json(example: TrainingExample) -> str:
    return json.dumps(
        {
            "kind": example.kind,
            "prompt": example.prompt,
            "completion": example.completion,
            "document_id": example.doc_id,
            "step": example.step,
        },
        ensure_ascii=False,
    )


def export_metadata(
    inventory: LabelInventory,
    strategy: str,
    policy: ParsePolicy,
    counts: dict[str, int],
) -> dict:
    """Sidecar describing an export well enough to train from it."""
    return {
        "strategy": strategy,
        "inventory": {
            "id": inventory.id,
            "relations": list(inventory.relations),
            "default_relation": inventory.default_relation,
            "default_nuclearity": inventory.default_nuclearity,
        },
        "policy": {
            "skip_forced": policy.skip_forced,
            "truncate_chars": policy.truncate_chars,
        },
        "examples_per_kind": dict(counts),
        "fine_tuning": dict(FINE_TUNING_DEFAULTS),
    }
