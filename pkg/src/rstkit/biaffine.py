"""Biaffine scoring baseline over span vectors.

Each side of a candidate pair is projected by its own small feed-forward
layer, then a bilinear term plus two linear terms score the pair:

    score = h_left . W . h_right + v_left . h_left + v_right . h_right

Split selection scores every candidate split of a span; label selection
runs one scorer per label. Plain numpy, float64 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class DimensionMismatch(ValueError):
    """A vector or matrix has a shape the parameters do not expect."""


class NoCandidates(ValueError):
    """best_split was given an empty candidate list."""


def _as_vector(x, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[0]}")
    return arr


def concat_features(parts: Iterable) -> np.ndarray:
    """Feature concatenation for classifier-style uses of span vectors."""
    vectors = [_as_vector(part) for part in parts]
    if not vectors:
        raise DimensionMismatch("nothing to concatenate")
    return np.concatenate(vectors)


@dataclass(frozen=True, eq=False)
class Projection:
    """One side's feed-forward layer: affine map plus optional tanh."""

    weight: np.ndarray  # (hidden, input)
    bias: np.ndarray  # (hidden,)

    def __post_init__(self) -> None:
        if self.weight.ndim != 2 or self.bias.ndim != 1:
            raise DimensionMismatch("projection needs a matrix and a vector")
        if self.weight.shape[0] != self.bias.shape[0]:
            raise DimensionMismatch(
                f"bias {self.bias.shape} does not fit weight {self.weight.shape}"
            )


@dataclass(frozen=True, eq=False)
class PairScorer:
    """Bilinear plus linear terms for one decision."""

    W: np.ndarray  # (hidden, hidden)
    v_left: np.ndarray  # (hidden,)
    v_right: np.ndarray  # (hidden,)

    def __post_init__(self) -> None:
        if self.W.ndim != 2 or self.W.shape[0] != self.W.shape[1]:
            raise DimensionMismatch(f"W must be square, got {self.W.shape}")
        for name, vec in (("v_left", self.v_left), ("v_right", self.v_right)):
            if vec.shape != (self.W.shape[0],):
                raise DimensionMismatch(
                    f"{name} shape {vec.shape} does not fit W {self.W.shape}"
                )

    def score(self, h_left: np.ndarray, h_right: np.ndarray) -> float:
        h_left = _as_vector(h_left, self.W.shape[0])
        h_right = _as_vector(h_right, self.W.shape[0])
        return float(
            h_left @ self.W @ h_right
            + self.v_left @ h_left
            + self.v_right @ h_right
        )


@dataclass(frozen=True, eq=False)
class BiaffineParams:
    """Everything needed to score splits and labels.

    ``labels`` covers the relation inventory plus the three nuclearity
    patterns, one scorer each, over the same projected representations.
    """

    proj_left: Projection
    proj_right: Projection
    split: PairScorer
    labels: dict[str, PairScorer]
    nonlinearity: str = "tanh"

    def __post_init__(self) -> None:
        if self.nonlinearity not in ("tanh", "none"):
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")
        hidden = self.split.W.shape[0]
        for side in (self.proj_left, self.proj_right):
            if side.weight.shape[0] != hidden:
                raise DimensionMismatch(
                    "projection output does not match scorer dimension"
                )
        for name, scorer in self.labels.items():
            if scorer.W.shape[0] != hidden:
                raise DimensionMismatch(f"label {name!r} scorer dimension differs")

    @property
    def input_dim(self) -> int:
        return self.proj_left.weight.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.split.W.shape[0]


def project(params: BiaffineParams, side: str, u: np.ndarray) -> np.ndarray:
    """Run one side's feed-forward layer on a raw span vector."""
    proj = {"left": params.proj_left, "right": params.proj_right}.get(side)
    if proj is None:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    u = _as_vector(u, proj.weight.shape[1])
    h = proj.weight @ u + proj.bias
    if params.nonlinearity == "tanh":
        h = np.tanh(h)
    return h


def split_score(params: BiaffineParams, u_left, u_right) -> float:
    """Score one candidate split given the two halves' span vectors."""
    h_left = project(params, "left", u_left)
    h_right = project(params, "right", u_right)
    return params.split.score(h_left, h_right)


def label_score(params: BiaffineParams, label: str, u_left, u_right) -> float:
    try:
        scorer = params.labels[label]
    except KeyError:
        raise KeyError(f"no scorer for label {label!r}") from None
    h_left = project(params, "left", u_left)
    h_right = project(params, "right", u_right)
    return scorer.score(h_left, h_right)


def best_split(
    params: BiaffineParams, candidates: Sequence[tuple]
) -> int:
    """Index of the best-scoring (u_left, u_right) candidate.

    Ties go to the smallest index, so split choice is deterministic.
    """
    if not candidates:
        raise NoCandidates("a span must offer at least one split")
    best_index, best_value = 0, -np.inf
    for index, (u_left, u_right) in enumerate(candidates):
        value = split_score(params, u_left, u_right)
        if value > best_value:
            best_index, best_value = index, value
    return best_index


def best_label(
    params: BiaffineParams,
    u_left,
    u_right,
    labels: Sequence[str] | None = None,
) -> str:
    """Highest-scoring label; exact ties go to the lexicographically least."""
    names = list(params.labels) if labels is None else list(labels)
    if not names:
        raise NoCandidates("no labels to choose from")
    h_left = project(params, "left", u_left)
    h_right = project(params, "right", u_right)
    best_name: str | None = None
    best_value = -np.inf
    for name in names:
        try:
            scorer = params.labels[name]
        except KeyError:
            raise KeyError(f"no scorer for label {name!r}") from None
        value = scorer.score(h_left, h_right)
        if value > best_value or (value == best_value and
                                  best_name is not None and name < best_name):
            best_name, best_value = name, value
    assert best_name is not None
    return best_name


def random_params(
    rng: np.random.Generator,
    input_dim: int,
    hidden_dim: int,
    labels: Iterable[str],
    nonlinearity: str = "tanh",
    scale: float = 0.5,
) -> BiaffineParams:
    """Small random parameters for demos and tests."""

    def matrix(rows: int, cols: int) -> np.ndarray:
        return rng.normal(0.0, scale, size=(rows, cols))

    def vector(size: int) -> np.ndarray:
        return rng.normal(0.0, scale, size=size)

    def scorer() -> PairScorer:
        return PairScorer(
            W=matrix(hidden_dim, hidden_dim),
            v_left=vector(hidden_dim),
            v_right=vector(hidden_dim),
        )

    return BiaffineParams(
        proj_left=Projection(matrix(hidden_dim, input_dim), vector(hidden_dim)),
        proj_right=Projection(matrix(hidden_dim, input_dim), vector(hidden_dim)),
        split=scorer(),
        labels={name: scorer() for name in labels},
        nonlinearity=nonlinearity,
    )


# ---------------------------------------------------------------------------
# Parameter files: self-describing text, exact float round-trip via repr


def _format_matrix(name: str, arr: np.ndarray) -> list[str]:
    arr2 = np.atleast_2d(np.asarray(arr, dtype=np.float64))
    lines = [f"tensor\t{name}\t{arr2.shape[0]}\t{arr2.shape[1]}"]
    for row in arr2:
        lines.append(" ".join(repr(float(x)) for x in row))
    return lines


def save_params(params: BiaffineParams, path: str | Path) -> None:
    lines = [
        "!format\tbiaffine-v1",
        f"!dims\t{params.input_dim}\t{params.hidden_dim}",
        f"!nonlinearity\t{params.nonlinearity}",
        "!labels\t" + "\t".join(params.labels),
    ]
    lines += _format_matrix("proj_left.weight", params.proj_left.weight)
    lines += _format_matrix("proj_left.bias", params.proj_left.bias)
    lines += _format_matrix("proj_right.weight", params.proj_right.weight)
    lines += _format_matrix("proj_right.bias", params.proj_right.bias)
    lines += _format_matrix("split.W", params.split.W)
    lines += _format_matrix("split.v_left", params.split.v_left)
    lines += _format_matrix("split.v_right", params.split.v_right)
    for name, scorer in params.labels.items():
        lines += _format_matrix(f"label.{name}.W", scorer.W)
        lines += _format_matrix(f"label.{name}.v_left", scorer.v_left)
        lines += _format_matrix(f"label.{name}.v_right", scorer.v_right)
    Path(path).write_text("\n".join(lines) + "\n")


def load_params(path: str | Path) -> BiaffineParams:
    path = Path(path)
    lines = path.read_text().splitlines()
    header: dict[str, list[str]] = {}
    tensors: dict[str, np.ndarray] = {}
    i = 0
    while i < len(lines):
        line = lines[i].rstrip()
        i += 1
        if not line or line.startswith("#"):
            continue
        cells = line.split("\t")
        if cells[0].startswith("!"):
            header[cells[0][1:]] = cells[1:]
            continue
        if cells[0] != "tensor" or len(cells) != 4:
            raise ValueError(f"{path}: unexpected line {line!r}")
        name, rows, cols = cells[1], int(cells[2]), int(cells[3])
        data = []
        for _ in range(rows):
            if i >= len(lines):
                raise ValueError(f"{path}: tensor {name} truncated")
            data.append([float(x) for x in lines[i].split()])
            i += 1
        arr = np.asarray(data, dtype=np.float64)
        if arr.shape != (rows, cols):
            raise ValueError(f"{path}: tensor {name} shape mismatch")
        tensors[name] = arr

    if header.get("format") != ["biaffine-v1"]:
        raise ValueError(f"{path}: not a biaffine-v1 parameter file")
    label_names = header.get("labels", [])

    def matrix(name: str) -> np.ndarray:
        try:
            return tensors[name]
        except KeyError:
            raise ValueError(f"{path}: missing tensor {name}") from None

    def vector(name: str) -> np.ndarray:
        return matrix(name)[0]

    return BiaffineParams(
        proj_left=Projection(matrix("proj_left.weight"), vector("proj_left.bias")),
        proj_right=Projection(
            matrix("proj_right.weight"), vector("proj_right.bias")
        ),
        split=PairScorer(
            matrix("split.W"), vector("split.v_left"), vector("split.v_right")
        ),
        labels={
            name: PairScorer(
                matrix(f"label.{name}.W"),
                vector(f"label.{name}.v_left"),
                vector(f"label.{name}.v_right"),
            )
            for name in label_names
        },
        nonlinearity=header.get("nonlinearity", ["tanh"])[0],
    )
