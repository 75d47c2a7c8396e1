"""The numeric baseline behind the same two decisions the oracles answer:
pick a split point, pick a label. Span vectors go through one projection per
side, then a bilinear-plus-linear score; everything is float64 numpy and the
parameters round-trip exactly through a text file.

Run: python3 demos/biaffine_baseline.py
"""

import tempfile
from pathlib import Path

import numpy as np

from rstkit import (
    best_label,
    best_split,
    load_params,
    random_params,
    save_params,
    split_score,
)


def main():
    rng = np.random.default_rng(20114)
    labels = ("Elaboration", "Joint", "Contrast",
              "nucleus-nucleus", "nucleus-satellite", "satellite-nucleus")
    params = random_params(rng, input_dim=6, hidden_dim=4, labels=labels)
    print(f"parameters: input {params.input_dim}, hidden {params.hidden_dim}, "
          f"{len(params.labels)} label scorers")
    print()

    # a 5-EDU span offers 4 candidate splits; each candidate is the pair of
    # span vectors for its two halves
    candidates = [(rng.normal(0, 1, 6), rng.normal(0, 1, 6))
                  for _ in range(4)]
    for index, (u_left, u_right) in enumerate(candidates):
        print(f"  split {index}: score {split_score(params, u_left, u_right):+.4f}")
    choice = best_split(params, candidates)
    print(f"best split: {choice} (ties would go to the smallest index)")
    print()

    u_left, u_right = candidates[choice]
    relation = best_label(params, u_left, u_right,
                          labels=("Elaboration", "Joint", "Contrast"))
    nuclearity = best_label(params, u_left, u_right,
                            labels=("nucleus-nucleus", "nucleus-satellite",
                                    "satellite-nucleus"))
    print(f"label choices for that split: {nuclearity}, {relation}")
    print()

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "model.params"
        save_params(params, path)
        loaded = load_params(path)
        same = split_score(loaded, u_left, u_right) == split_score(
            params, u_left, u_right)
        print(f"saved {path.stat().st_size} bytes; "
              f"reloaded scores identical: {same}")
        print("file starts with:")
        for line in path.read_text().splitlines()[:4]:
            print("  " + line)


if __name__ == "__main__":
    main()
