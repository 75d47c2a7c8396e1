"""Shared plumbing for the two parsing engines: policy, trace, result."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable

from .core import RstTree


class EmptyDocument(ValueError):
    """Parsing needs at least one EDU."""


class IllegalAction(ValueError):
    """An action was applied in a state where it is not legal."""


@dataclass(frozen=True)
class ParsePolicy:
    """Knobs shared by both engines.

    ``skip_forced`` takes single-option decisions without consulting the
    oracle (disable to emulate querying on every step). ``truncate_chars``
    center-elides long span texts in prompts; None leaves them whole.
    """

    skip_forced: bool = True
    truncate_chars: int | None = None


@dataclass(frozen=True)
class TraceEntry:
    """One decision as the engine saw it.

    ``prompt`` and ``raw`` are None on forced moves, which never reach the
    oracle. ``corrected`` marks answers that had to be replaced with a
    default; ``note`` says why ("unparseable", "out-of-range", "illegal").
    """

    step: int
    kind: str
    state: str
    prompt: str | None
    raw: str | None
    resolved: str
    corrected: bool = False
    forced: bool = False
    note: str = ""


@dataclass(frozen=True)
class ParseResult:
    tree: RstTree
    trace: tuple[TraceEntry, ...]

    @property
    def query_count(self) -> int:
        return sum(1 for entry in self.trace if not entry.forced)

    @property
    def corrected_count(self) -> int:
        return sum(1 for entry in self.trace if entry.corrected)

    def queries(self, kind: str) -> int:
        return sum(
            1 for entry in self.trace if entry.kind == kind and not entry.forced
        )


def prompt_id(kind: str, prompt: str | None) -> str | None:
    """Stable short identifier for a rendered prompt, for trace records."""
    if prompt is None:
        return None
    digest = hashlib.sha1(prompt.encode("utf-8")).hexdigest()[:10]
    return f"{kind}:{digest}"


def trace_to_jsonl(trace: Iterable[TraceEntry]) -> str:
    """Line-delimited trace records; the prompt itself is reduced to an id."""
    lines = []
    for entry in trace:
        lines.append(
            json.dumps(
                {
                    "step": entry.step,
                    "kind": entry.kind,
                    "state": entry.state,
                    "prompt_id": prompt_id(entry.kind, entry.prompt),
                    "raw": entry.raw,
                    "resolved": entry.resolved,
                    "corrected": entry.corrected,
                    "forced": entry.forced,
                    "note": entry.note,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")
