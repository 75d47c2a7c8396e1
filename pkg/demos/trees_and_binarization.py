"""Build an n-ary constituent the way a treebank file stores one, binarize
it, and derive both decision sequences from the result.

Run: python3 demos/trees_and_binarization.py
"""

from rstkit import (
    Edu,
    NaryNode,
    binarize,
    derive_shift_reduce_sequence,
    derive_split_sequence,
    write_tree,
)

EDUS = [
    Edu(1, "The committee met on Tuesday"),
    Edu(2, "to review the audit,"),
    Edu(3, "which had taken three months."),
    Edu(4, "No action was taken."),
]


def leaf(role, rel, edu):
    return NaryNode(role, rel, (edu.index, edu.index), edu=edu)


def main():
    # a three-child constituent plus a trailing satellite, as a reader
    # would find them in a .dis file
    inner = NaryNode("Nucleus", "span", (1, 3), children=[
        leaf("Nucleus", "span", EDUS[0]),
        leaf("Satellite", "purpose", EDUS[1]),
        leaf("Satellite", "elaboration", EDUS[2]),
    ])
    root = NaryNode("Root", None, (1, 4), children=[
        inner,
        leaf("Satellite", "evaluation", EDUS[3]),
    ])

    tree = binarize(root)
    print("binarized:", write_tree(tree))
    print()

    print("shift-reduce derivation (post-order, 2n-1 actions):")
    for action in derive_shift_reduce_sequence(tree):
        print(" ", action)
    print()

    print("split derivation (pre-order, n-1 steps, k is 0-based):")
    for step in derive_split_sequence(tree):
        print(f"  span={step.span} k={step.k} "
              f"{step.nuclearity} {step.relation}")


if __name__ == "__main__":
    main()
