"""Bottom-up shift-reduce parsing driven by a decision oracle.

The transition system is the classic one: a stack of subtrees and a queue
of unread EDUs. Shift wraps the queue front as a leaf; reduce joins the top
two stack items into one node, left side being the item shifted earlier.
Parsing an n-EDU document always takes exactly 2n-1 actions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    NUCLEARITY_PATTERNS,
    Action,
    Edu,
    LabelInventory,
    Leaf,
    Node,
    Reduce,
    RstTree,
    Shift,
    tree_text,
)
from .engine import (
    EmptyDocument,
    IllegalAction,
    ParsePolicy,
    ParseResult,
    TraceEntry,
)
from .oracle import Oracle, OracleQuery, resolve_label
from .prompts import (
    ACTION,
    ACTION_LABELS,
    NUCLEARITY,
    RELATION,
    render_action_prompt,
    render_nuclearity_prompt,
    render_relation_prompt,
)

SHIFT = "shift"
REDUCE = "reduce"


@dataclass(frozen=True)
class ParserState:
    """Immutable snapshot of the transition system."""

    stack: tuple[RstTree, ...]
    queue: tuple[Edu, ...]

    @classmethod
    def initial(cls, edus: Sequence[Edu]) -> "ParserState":
        return cls(stack=(), queue=tuple(edus))

    @property
    def is_terminal(self) -> bool:
        return not self.queue and len(self.stack) == 1

    def legal_actions(self) -> tuple[str, ...]:
        legal = []
        if self.queue:
            legal.append(SHIFT)
        if len(self.stack) >= 2:
            legal.append(REDUCE)
        return tuple(legal)

    def summary(self) -> str:
        return f"stack={len(self.stack)} queue={len(self.queue)}"


def apply_action(state: ParserState, action: Action) -> ParserState:
    """One transition; raises IllegalAction rather than corrupt the state."""
    if isinstance(action, Shift):
        if not state.queue:
            raise IllegalAction("shift with an empty queue")
        leaf = Leaf(state.queue[0])
        return ParserState(state.stack + (leaf,), state.queue[1:])
    if isinstance(action, Reduce):
        if len(state.stack) < 2:
            raise IllegalAction("reduce with fewer than two stack items")
        left, right = state.stack[-2], state.stack[-1]
        node = Node(left, right, action.nuclearity, action.relation)
        return ParserState(state.stack[:-2] + (node,), state.queue)
    raise IllegalAction(f"unknown action {action!r}")


def _texts(state: ParserState) -> tuple[str | None, str | None, str | None]:
    stack2 = tree_text(state.stack[-2]) if len(state.stack) >= 2 else None
    stack1 = tree_text(state.stack[-1]) if state.stack else None
    queue1 = state.queue[0].text if state.queue else None
    return stack2, stack1, queue1


def parse_bottom_up(
    edus: Sequence[Edu],
    oracle: Oracle,
    inventory: LabelInventory,
    policy: ParsePolicy = ParsePolicy(),
) -> ParseResult:
    """Parse a document, consulting the oracle for every open decision.

    Unusable answers never abort the parse: they are replaced by defaults
    (shift, or the single legal action; the inventory's default nuclearity
    and relation) and flagged in the trace. Identical oracle answers yield
    an identical tree and trace.
    """
    if not edus:
        raise EmptyDocument("cannot parse a document with no EDUs")
    state = ParserState.initial(edus)
    trace: list[TraceEntry] = []
    step = 0

    while not state.is_terminal:
        legal = state.legal_actions()
        stack2, stack1, queue1 = _texts(state)

        if len(legal) == 1 and policy.skip_forced:
            name = legal[0]
            trace.append(
                TraceEntry(
                    step=step, kind=ACTION, state=state.summary(),
                    prompt=None, raw=None, resolved=name, forced=True,
                )
            )
        else:
            prompt = render_action_prompt(
                stack2, stack1, queue1, policy.truncate_chars
            )
            raw = oracle.complete(OracleQuery(ACTION, prompt, ACTION_LABELS))
            resolved = resolve_label(raw, ACTION_LABELS)
            corrected, note = False, ""
            if resolved is None:
                resolved = SHIFT if SHIFT in legal else legal[0]
                corrected, note = True, "unparseable"
            elif resolved not in legal:
                resolved = legal[0]
                corrected, note = True, "illegal"
            trace.append(
                TraceEntry(
                    step=step, kind=ACTION, state=state.summary(),
                    prompt=prompt, raw=raw, resolved=resolved,
                    corrected=corrected, note=note,
                )
            )
            name = resolved
        step += 1

        if name == SHIFT:
            state = apply_action(state, Shift())
            continue

        # reduce: nuclearity first, then the relation conditioned on it
        assert stack2 is not None and stack1 is not None
        nuc_prompt = render_nuclearity_prompt(
            stack2, stack1, policy.truncate_chars
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
                step=step, kind=NUCLEARITY, state=state.summary(),
                prompt=nuc_prompt, raw=raw, resolved=nuclearity,
                corrected=corrected, note="unparseable" if corrected else "",
            )
        )
        step += 1

        rel_prompt = render_relation_prompt(
            stack2, stack1, nuclearity, inventory, policy.truncate_chars
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
                step=step, kind=RELATION, state=state.summary(),
                prompt=rel_prompt, raw=raw, resolved=relation,
                corrected=corrected, note="unparseable" if corrected else "",
            )
        )
        step += 1

        state = apply_action(state, Reduce(nuclearity, relation))

    return ParseResult(tree=state.stack[0], trace=tuple(trace))
