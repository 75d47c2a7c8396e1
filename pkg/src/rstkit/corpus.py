"""Treebank and config file I/O.

Covers the parenthesized .dis constituent format, relation-name maps and
label inventories (editable text fixtures under rstkit/data), a canonical
one-line bracket format for predicted trees, and split manifests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .core import (
    NN,
    NS,
    NUCLEUS,
    ROOT,
    SATELLITE,
    SN,
    SPAN_REL,
    Edu,
    LabelInventory,
    Leaf,
    MalformedTree,
    NaryNode,
    Node,
    RstTree,
    binarize,
)

PATTERN_SHORT = {NN: "NN", NS: "NS", SN: "SN"}
SHORT_PATTERN = {v: k for k, v in PATTERN_SHORT.items()}


class DisSyntaxError(ValueError):
    """Malformed treebank or bracket input, with a character position."""

    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)
        self.pos = pos


class UnknownRelation(KeyError):
    """A relation name has no entry in the active relation map."""


class ConfigError(ValueError):
    """Bad config fixture: inventory, relation map, or split manifest."""


class OverlappingSplits(ConfigError):
    """A document id is claimed by more than one split."""


class MissingDocument(FileNotFoundError):
    """A split manifest names a document the corpus directory lacks."""


@dataclass(frozen=True)
class Document:
    """A document ready for parsing or scoring.

    ``tree`` is the gold binary tree when the source was annotated, else
    None. EDU indices run 1..len(edus) in order.
    """

    doc_id: str
    edus: tuple[Edu, ...]
    tree: RstTree | None = None


# ---------------------------------------------------------------------------
# Tokenizer shared by the .dis reader and the bracket format

_ATOM_RE = re.compile(r"[^\s()]+")
# Two WSJ training files carry stray tool output after closing parens.
_TT_ERR_RE = re.compile(r"\)//TT_ERR")

# token kinds: "open", "close", "atom", "text"
Token = tuple[str, str, int]


def _tokenize(text: str) -> list[Token]:
    """Tokens as (kind, value, offset).

    Text fields are delimited by _! ... _! and may contain parentheses and
    newlines, so they are scanned whole before the paren/atom rules apply.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("_!", i):
            end = text.find("_!", i + 2)
            if end < 0:
                raise DisSyntaxError("unterminated _!text field", i)
            tokens.append(("text", text[i + 2 : end], i))
            i = end + 2
            continue
        if ch == "(":
            tokens.append(("open", "(", i))
            i += 1
            continue
        if ch == ")":
            tokens.append(("close", ")", i))
            i += 1
            continue
        match = _ATOM_RE.match(text, i)
        assert match is not None
        tokens.append(("atom", match.group(), i))
        i = match.end()
    return tokens


class _Tokens:
    """Cursor over a token list with position-carrying errors."""

    def __init__(self, tokens: list[Token], length: int):
        self.tokens = tokens
        self.length = length
        self.pos = 0

    @property
    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> Token:
        if self.done:
            raise DisSyntaxError("unexpected end of input", self.length)
        return self.tokens[self.pos]

    def take(self, kind: str | None = None) -> Token:
        token = self.peek()
        if kind is not None and token[0] != kind:
            raise DisSyntaxError(f"expected {kind}, got {token[1]!r}", token[2])
        self.pos += 1
        return token

    def take_atom(self) -> str:
        return self.take("atom")[1]

    def take_int(self) -> int:
        kind, value, pos = self.take()
        if kind != "atom" or not re.fullmatch(r"\d+", value):
            raise DisSyntaxError("expected integer", pos)
        return int(value)


def normalize_edu_text(raw: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return " ".join(raw.split())


# ---------------------------------------------------------------------------
# .dis reader


@dataclass
class _Frame:
    role: str
    rel2par: str | None = None
    span: tuple[int, int] | None = None
    leaf: int | None = None
    text: str | None = None
    children: list[NaryNode] = field(default_factory=list)

    def close(self, pos: int) -> NaryNode:
        if self.leaf is not None:
            if self.text is None:
                raise DisSyntaxError(f"leaf {self.leaf} has no text field", pos)
            if self.children:
                raise DisSyntaxError(f"leaf {self.leaf} has children", pos)
            return NaryNode(
                role=self.role,
                rel2par=self.rel2par,
                span=(self.leaf, self.leaf),
                edu=Edu(self.leaf, self.text),
            )
        if self.span is None:
            raise DisSyntaxError("constituent lacks both span and leaf", pos)
        if not self.children:
            raise DisSyntaxError(f"span {self.span} has no children", pos)
        return NaryNode(
            role=self.role, rel2par=self.rel2par, span=self.span,
            children=self.children,
        )


def _parse_dis(text: str) -> NaryNode:
    """Parse one .dis record with an explicit frame stack.

    Treebank nesting is as deep as the document, so no recursion here.
    """
    cursor = _Tokens(_tokenize(_TT_ERR_RE.sub(")", text)), len(text))
    cursor.take("open")
    kind, role, pos = cursor.take("atom")
    if role != ROOT:
        raise DisSyntaxError(f"expected {ROOT}, got {role!r}", pos)
    frames: list[_Frame] = [_Frame(role)]
    root: NaryNode | None = None
    while root is None:
        kind, value, pos = cursor.take()
        if kind == "close":
            node = frames.pop().close(pos)
            if frames:
                frames[-1].children.append(node)
            else:
                root = node
            continue
        if kind != "open":
            raise DisSyntaxError(f"expected ( or ), got {value!r}", pos)
        head_kind, head, head_pos = cursor.peek()
        if head_kind != "atom":
            raise DisSyntaxError("expected a name after (", head_pos)
        if head in (NUCLEUS, SATELLITE):
            cursor.take()
            frames.append(_Frame(head))
            continue
        if head == ROOT:
            raise DisSyntaxError("Root below the top level", head_pos)
        cursor.take()
        frame = frames[-1]
        if head == "span":
            frame.span = (cursor.take_int(), cursor.take_int())
        elif head == "leaf":
            frame.leaf = cursor.take_int()
        elif head == "rel2par":
            frame.rel2par = cursor.take_atom()
        elif head == "text":
            frame.text = normalize_edu_text(cursor.take("text")[1])
        else:
            raise DisSyntaxError(f"unknown field {head!r}", head_pos)
        cursor.take("close")
    if not cursor.done:
        raise DisSyntaxError("trailing content after tree", cursor.peek()[2])
    return root


def parse_dis(text: str) -> tuple[NaryNode, tuple[Edu, ...]]:
    """Parse .dis text into the raw n-ary tree plus its EDUs in order."""
    root = _parse_dis(text)
    edus: list[Edu] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            assert node.edu is not None
            edus.append(node.edu)
        else:
            stack.extend(node.children)
    edus.sort(key=lambda e: e.index)
    if [e.index for e in edus] != list(range(1, len(edus) + 1)):
        raise MalformedTree("leaf indices are not contiguous from 1")
    return root, tuple(edus)


def _doc_id_from_path(path: Path) -> str:
    name = path.name
    for suffix in (".dis", ".out"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name


def read_dis(
    path: str | Path, relation_map: "RelationMap | None" = None
) -> Document:
    """Load one annotated document: parse, optionally map relations, binarize."""
    path = Path(path)
    nary, edus = parse_dis(path.read_text())
    if relation_map is not None:
        nary = map_relations(nary, relation_map)
    return Document(_doc_id_from_path(path), edus, binarize(nary))


# ---------------------------------------------------------------------------
# Relation maps


def normalize_relation(name: str) -> str:
    """Lowercase and drop the embedded-unit suffix ("-e") if present."""
    name = name.strip().lower()
    if name.endswith("-e"):
        name = name[:-2]
    return name


@dataclass(frozen=True)
class RelationMap:
    """Normalized source name -> canonical target label."""

    entries: dict[str, str]

    def apply(self, name: str) -> str:
        key = normalize_relation(name)
        try:
            return self.entries[key]
        except KeyError:
            raise UnknownRelation(name) from None

    def targets(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for target in self.entries.values():
            seen.setdefault(target)
        return tuple(seen)


def _config_rows(text: str) -> Iterable[tuple[int, list[str]]]:
    """Tab-split data rows of a config file, skipping blanks and # comments."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        yield lineno, [cell.strip() for cell in line.split("\t")]


def load_relation_map(path: str | Path) -> RelationMap:
    path = Path(path)
    entries: dict[str, str] = {}
    for lineno, cells in _config_rows(path.read_text()):
        if len(cells) != 2 or not cells[0] or not cells[1]:
            raise ConfigError(f"{path}:{lineno}: expected 'source<TAB>target'")
        key = normalize_relation(cells[0])
        if key in entries and entries[key] != cells[1]:
            raise ConfigError(
                f"{path}:{lineno}: conflicting targets for {cells[0]!r}"
            )
        entries[key] = cells[1]
    if not entries:
        raise ConfigError(f"{path}: empty relation map")
    return RelationMap(entries)


def map_relations(root: NaryNode, mapping: RelationMap) -> NaryNode:
    """Copy of the tree with every real rel2par passed through the map.

    The "span" placeholder and the Root's missing rel2par pass through
    untouched; unknown names raise UnknownRelation.
    """

    def convert(rel2par: str | None) -> str | None:
        if rel2par is None or rel2par == SPAN_REL:
            return rel2par
        return mapping.apply(rel2par)

    out_root = NaryNode(root.role, convert(root.rel2par), root.span, edu=root.edu)
    stack = [(root, out_root)]
    while stack:
        src, dst = stack.pop()
        for child in src.children:
            copy = NaryNode(
                child.role, convert(child.rel2par), child.span, edu=child.edu
            )
            dst.children.append(copy)
            stack.append((child, copy))
    return out_root


# ---------------------------------------------------------------------------
# Label inventories


def load_inventory(path: str | Path) -> LabelInventory:
    path = Path(path)
    directives: dict[str, str] = {}
    relations: list[str] = []
    for lineno, cells in _config_rows(path.read_text()):
        if cells[0].startswith("!"):
            if len(cells) != 2:
                raise ConfigError(f"{path}:{lineno}: expected '!key<TAB>value'")
            directives[cells[0][1:]] = cells[1]
        elif len(cells) == 1:
            relations.append(cells[0])
        else:
            raise ConfigError(f"{path}:{lineno}: one relation name per line")
    try:
        return LabelInventory(
            id=directives["id"],
            relations=tuple(relations),
            default_relation=directives["default_relation"],
            default_nuclearity=directives.get("default_nuclearity", NS),
        )
    except KeyError as exc:
        raise ConfigError(f"{path}: missing directive !{exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _data_path(filename: str) -> Path:
    return Path(str(resources.files("rstkit").joinpath("data", filename)))


def builtin_inventory(name: str) -> LabelInventory:
    """Bundled inventories: "rst-dt" (18 classes) or "instr-dt" (39)."""
    return load_inventory(_data_path(f"{name}.inv"))


def builtin_relation_map(name: str) -> RelationMap:
    """Bundled maps: "rst-dt-coarse" (fine -> 18) or "gum-rstdt"."""
    return load_relation_map(_data_path(f"{name}.map"))


def minicorpus_dir() -> Path:
    """Directory of the bundled synthetic corpus (.dis files + splits.tsv)."""
    return Path(str(resources.files("rstkit").joinpath("data", "minicorpus")))


# ---------------------------------------------------------------------------
# Canonical bracket format for predicted trees


def write_tree(tree: RstTree) -> str:
    """One-line bracket form: (NS Relation (leaf 1) (NN Rel ...))."""
    pieces: list[str] = []
    stack: list[object] = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            pieces.append(item)
        elif isinstance(item, Leaf):
            pieces.append(f"(leaf {item.edu.index})")
        else:
            assert isinstance(item, Node)
            if re.search(r"[\s()]", item.relation):
                raise ValueError(
                    f"relation {item.relation!r} not writable in bracket form"
                )
            pieces.append(f"({PATTERN_SHORT[item.nuclearity]} {item.relation}")
            stack.append(")")
            stack.append(item.right)
            stack.append(item.left)
    text = ""
    for piece in pieces:
        if text and piece != ")":
            text += " "
        text += piece
    return text


def read_tree(line: str, edus: Sequence[Edu] | None = None) -> RstTree:
    """Parse the bracket form back; attaches texts when ``edus`` is given."""
    cursor = _Tokens(_tokenize(line), len(line))
    # frames hold (pattern, relation, children)
    frames: list[tuple[str, str, list[RstTree]]] = []
    result: RstTree | None = None

    def attach(tree: RstTree, pos: int) -> None:
        nonlocal result
        if frames:
            frames[-1][2].append(tree)
        elif result is None:
            result = tree
        else:
            raise DisSyntaxError("multiple top-level trees on one line", pos)

    while not cursor.done:
        kind, value, pos = cursor.take()
        if kind == "open":
            head_kind, head, head_pos = cursor.take()
            if head_kind != "atom":
                raise DisSyntaxError("expected node head after (", head_pos)
            if head == "leaf":
                index = cursor.take_int()
                cursor.take("close")
                if edus is not None:
                    if not 1 <= index <= len(edus):
                        raise DisSyntaxError(f"leaf {index} outside document", pos)
                    attach(Leaf(edus[index - 1]), pos)
                else:
                    attach(Leaf(Edu(index, "")), pos)
            elif head in SHORT_PATTERN:
                relation = cursor.take_atom()
                frames.append((SHORT_PATTERN[head], relation, []))
            else:
                raise DisSyntaxError(f"unknown node head {head!r}", head_pos)
        elif kind == "close":
            if not frames:
                raise DisSyntaxError("unbalanced )", pos)
            pattern, relation, children = frames.pop()
            if len(children) != 2:
                raise DisSyntaxError(
                    f"node needs exactly two children, got {len(children)}", pos
                )
            try:
                attach(Node(children[0], children[1], pattern, relation), pos)
            except MalformedTree as exc:
                raise DisSyntaxError(str(exc), pos) from None
        else:
            raise DisSyntaxError(f"unexpected token {value!r}", pos)

    if frames:
        raise DisSyntaxError("unclosed ( in bracket line", len(line))
    if result is None:
        raise DisSyntaxError("empty bracket line", 0)
    return result


# ---------------------------------------------------------------------------
# Split manifests


def load_split_manifest(path: str | Path) -> dict[str, list[str]]:
    """Read split rows, enforce disjointness and any declared sizes."""
    path = Path(path)
    splits: dict[str, list[str]] = {}
    declared: dict[str, int] = {}
    owner: dict[str, str] = {}
    for lineno, cells in _config_rows(path.read_text()):
        if cells[0] == "!count":
            if len(cells) != 3 or not re.fullmatch(r"\d+", cells[2]):
                raise ConfigError(
                    f"{path}:{lineno}: expected '!count<TAB>split<TAB>N'"
                )
            declared[cells[1]] = int(cells[2])
            continue
        if len(cells) != 2 or not cells[0] or not cells[1]:
            raise ConfigError(f"{path}:{lineno}: expected 'split<TAB>doc_id'")
        name, doc_id = cells
        if doc_id in owner and owner[doc_id] != name:
            raise OverlappingSplits(
                f"{path}:{lineno}: {doc_id!r} already in split {owner[doc_id]!r}"
            )
        if doc_id not in owner:
            owner[doc_id] = name
            splits.setdefault(name, []).append(doc_id)
    for name, expected in declared.items():
        actual = len(splits.get(name, []))
        if actual != expected:
            raise ConfigError(
                f"{path}: split {name!r} declares {expected} documents, has {actual}"
            )
    if not splits:
        raise ConfigError(f"{path}: no split rows")
    return splits


def resolve_document_path(corpus_dir: str | Path, doc_id: str) -> Path:
    corpus_dir = Path(corpus_dir)
    for candidate in (doc_id, f"{doc_id}.dis", f"{doc_id}.out.dis"):
        path = corpus_dir / candidate
        if path.is_file():
            return path
    raise MissingDocument(f"no file for document {doc_id!r} under {corpus_dir}")


def load_split(
    manifest_path: str | Path,
    corpus_dir: str | Path,
    relation_map: RelationMap | None = None,
) -> dict[str, list[Document]]:
    """Load every document of every split, in manifest order."""
    splits = load_split_manifest(manifest_path)
    return {
        name: [
            read_dis(resolve_document_path(corpus_dir, doc_id), relation_map)
            for doc_id in doc_ids
        ]
        for name, doc_ids in splits.items()
    }
