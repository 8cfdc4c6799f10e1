"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import math

import numpy as np

from ibntrees.trees import Tree


def random_tree(seed: int, max_depth: int, extra: int = 12, ensure_depth: bool = True) -> Tree:
    """Small random tree; optionally guaranteed to reach max_depth."""
    gen = np.random.default_rng(seed)
    t = Tree()
    for _ in range(extra):
        candidates = [v for v in range(t.n_vertices) if t.depth(v) < max_depth]
        t.add_child(int(gen.choice(candidates)))
    if ensure_depth:
        while t.height() < max_depth:
            deepest = max(range(t.n_vertices), key=t.depth)
            t.add_child(deepest)
    return t


def all_cutsets(t: Tree, N: int) -> list[list[int]]:
    """Every minimal cutset of the depth-N truncation, by direct recursion.

    Kept independent of the production recursion: options below a vertex
    are 'cut the edge into it' or a product over children; dead branches
    need nothing.
    """

    def options(v: int) -> list[list[int]]:
        if t.depth(v) == N:
            return [[v]]
        kids = t.children(v)
        if not kids:
            return [[]]
        combos: list[list[int]] = [[]]
        for c in kids:
            combos = [x + y for x in combos for y in options(c)]
        return [[v]] + combos

    combos: list[list[int]] = [[]]
    for c in t.children(0):
        combos = [x + y for x in combos for y in options(c)]
    return combos


def cutset_weight(t: Tree, cut, lam: float) -> float:
    d = t.depth_array()
    return sum(math.exp(-float(d[v]) ** lam) for v in cut)


def brute_force_fire(tree: Tree, k: int, protections: dict[int, list[int]],
                     rounds: int) -> tuple[set[int], set[int]]:
    """Closed-form fire evolution: a vertex burns at round max(0, |v|-k)
    unless some ancestor-or-self was protected at a round no later than the
    fire's arrival there.  protections maps round -> vertex list.
    """
    depths = tree.depth_array()
    protected_round: dict[int, int] = {}
    for r, vs in protections.items():
        for v in vs:
            protected_round[v] = min(r, protected_round.get(v, r))

    burning: set[int] = set()
    for v in range(tree.n_vertices):
        arrival = None
        blocked = False
        u = v
        chain = []
        while True:
            chain.append(u)
            if u == 0:
                break
            u = tree.parent(u)
        for u in reversed(chain):  # root downward
            a = max(0, int(depths[u]) - k)
            if u in protected_round and protected_round[u] <= a:
                blocked = True
                break
            arrival = a
        if not blocked and arrival is not None and arrival <= rounds:
            burning.add(v)
    return burning, set(protected_round)
