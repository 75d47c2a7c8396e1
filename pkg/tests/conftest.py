"""Shared fixtures: corpus paths, random tree builders, hypothesis profile."""

from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import settings

from rstkit import (
    NUCLEARITY_PATTERNS,
    Document,
    Edu,
    Leaf,
    Node,
    builtin_inventory,
    builtin_relation_map,
    load_split_manifest,
    minicorpus_dir,
    read_dis,
    resolve_document_path,
)

# deterministic property tests: same examples on every run
settings.register_profile("ci", derandomize=True, max_examples=60)
settings.load_profile("ci")

TESTS_DIR = Path(__file__).resolve().parent
DATA_DIR = TESTS_DIR / "data"
GOLDEN_DIR = TESTS_DIR / "goldens"

_WORDS = (
    "plant", "survey", "board", "filing", "route", "quarter", "audit",
    "notice", "crew", "permit", "budget", "draft", "hearing", "market",
)


def make_edus(n: int, rng: random.Random | None = None) -> tuple[Edu, ...]:
    """n synthetic EDUs with short deterministic texts."""
    rng = rng or random.Random(99)
    return tuple(
        Edu(i, f"{rng.choice(_WORDS)} {rng.choice(_WORDS)} {i}.")
        for i in range(1, n + 1)
    )


def random_tree(
    rng: random.Random,
    edus,
    relations=None,
    lo: int | None = None,
    hi: int | None = None,
):
    """Random binary gold tree over edus[lo-1..hi-1]; labels drawn seeded."""
    relations = relations or builtin_inventory("rst-dt").relations
    lo = 1 if lo is None else lo
    hi = len(edus) if hi is None else hi
    if lo == hi:
        return Leaf(edus[lo - 1])
    mid = rng.randint(lo, hi - 1)
    return Node(
        random_tree(rng, edus, relations, lo, mid),
        random_tree(rng, edus, relations, mid + 1, hi),
        rng.choice(NUCLEARITY_PATTERNS),
        rng.choice(relations),
    )


def random_document(rng: random.Random, n: int, doc_id: str = "rand") -> Document:
    edus = make_edus(n, rng)
    return Document(doc_id, edus, random_tree(rng, edus))


def chain_tree(edus, right_heavy: bool = True):
    """Fully right- or left-branching tree, built without recursion."""
    leels = [Leaf(e) for e in edus]
    if right_heavy:
        tree = leels[-1]
        for leaf in reversed(leels[:-1]):
            tree = Node(leaf, tree, "nucleus-satellite", "Elaboration")
    else:
        tree = leels[0]
        for leaf in leels[1:]:
            tree = Node(tree, leaf, "nucleus-satellite", "Elaboration")
    return tree


@pytest.fixture(scope="session")
def inventory():
    return builtin_inventory("rst-dt")


@pytest.fixture(scope="session")
def relmap():
    return builtin_relation_map("rst-dt-coarse")


@pytest.fixture(scope="session")
def press_release_path() -> Path:
    return DATA_DIR / "press_release.dis"


@pytest.fixture(scope="session")
def minicorpus(relmap) -> list[Document]:
    """All 22 bundled documents, relations mapped, in manifest order."""
    corpus = minicorpus_dir()
    splits = load_split_manifest(corpus / "splits.tsv")
    return [
        read_dis(resolve_document_path(corpus, doc_id), relmap)
        for ids in splits.values()
        for doc_id in ids
    ]
