"""Nathanson's 2x2 matrix semigroup and its lexicographic minimal spanning tree.

The semigroup is generated by a = [[1,1],[0,1]] and b = [[1,0],[1,0]]
under multiplication.  Words over {a, b} are ordered length-first, then
lexicographically with b < a; breadth-first search that extends by b
before a therefore reaches every element through its minimal word, and
those words form a spanning tree under the prefix relation (asserted
during construction).  Matrix entries are exact big integers: deduping is
by the matrix itself, never a hash truncation.

The tree supports a flow from the identity that is routed entirely into
the b-subtree and halves at every branch vertex; branches occur exactly
where a run of a's can be closed by b, which the minimal-word structure
ties to prime run lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trees import Tree

Mat2 = tuple[int, int, int, int]  # row-major (m00, m01, m10, m11)

MAT_ID: Mat2 = (1, 0, 0, 1)
MAT_A: Mat2 = (1, 1, 0, 1)
MAT_B: Mat2 = (1, 0, 1, 0)
GEN = {"a": MAT_A, "b": MAT_B}


class BallCapError(RuntimeError):
    """Raised when a requested ball exceeds the element cap."""


def mat_mul(x: Mat2, y: Mat2) -> Mat2:
    return (x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3])


def mat_of_word(word: str) -> Mat2:
    m = MAT_ID
    for ch in word:
        m = mat_mul(m, GEN[ch])
    return m


def bfs_ball(n: int, max_elements: int = 2_000_000) -> dict[Mat2, str]:
    """All semigroup elements of word length <= n with their minimal words.

    BFS by length, extending each frontier word by b then a; the frontier
    is kept in lexicographic order (b < a), so the first word reaching a
    matrix is the length-then-lex minimal one.  Includes the identity as
    the empty word.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    elements: dict[Mat2, str] = {MAT_ID: ""}
    frontier: list[tuple[Mat2, str]] = [(MAT_ID, "")]
    for _ in range(n):
        nxt: list[tuple[Mat2, str]] = []
        for m, w in frontier:
            for ch in "ba":
                m2 = mat_mul(m, GEN[ch])
                if m2 not in elements:
                    elements[m2] = w + ch
                    nxt.append((m2, w + ch))
                    if len(elements) > max_elements:
                        raise BallCapError(f"ball exceeds {max_elements} elements")
        frontier = nxt
    return elements


@dataclass(frozen=True)
class LexTree:
    tree: Tree
    words: tuple[str, ...]  # words[v] is the minimal word of vertex v

    def word_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}


def lex_tree(n: int, max_elements: int = 2_000_000) -> LexTree:
    """Spanning tree of the ball: parent of a word is its one-shorter prefix.

    Raises if some minimal word has a non-minimal prefix, which would break
    the spanning-tree property.
    """
    elements = bfs_ball(n, max_elements)
    words = sorted(elements.values(), key=lambda w: (len(w), [0 if c == "b" else 1 for c in w]))
    index = {"": 0}
    t = Tree()
    for w in words[1:]:
        p = index.get(w[:-1])
        if p is None:
            raise AssertionError(f"prefix {w[:-1]!r} of minimal word {w!r} is not minimal")
        index[w] = t.add_child(p)
    return LexTree(t, tuple(words))


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def word_type(word: str) -> int | None:
    """Classify a word: 1 = a^n, 2 = a^i b a^j, 3 = prime-block form
    a^i (b a^{p-1})...(b a^{q-1}) b a^j with nondecreasing prime run
    lengths p <= ... <= q.  None if no form matches."""
    if word == "":
        return None
    runs = [len(r) for r in word.split("b")]
    nb = len(runs) - 1
    if nb == 0:
        return 1
    if nb == 1:
        return 2
    middle = [r + 1 for r in runs[1:-1]]
    if all(_is_prime(m) for m in middle) and all(x <= y for x, y in zip(middle, middle[1:])):
        return 3
    return None


def prime_flow(lt: LexTree, c: float) -> np.ndarray:
    """Unit-source flow: c into the b-subtree, nothing into the a-child,
    split equally at every branch vertex below b.

    Returns theta (per edge, indexed by child vertex).  With c small the
    flow respects the capacities exp(-|e|**lam) for lam < 1/2 because the
    number of halvings along a ray grows like sqrt(depth)/log(depth).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    t = lt.tree
    idx = lt.word_index()
    theta = np.zeros(t.n_vertices)
    theta[idx["b"]] = c
    if "a" in idx:
        theta[idx["a"]] = 0.0
    order = sorted(range(1, t.n_vertices), key=lambda v: t.depth(v))
    for v in order:
        kids = t.children(v)
        if not kids:
            continue
        share = theta[v] / len(kids)
        for ch in kids:
            theta[ch] = share
    return theta


def ball_sizes(n: int, max_elements: int = 2_000_000) -> tuple[np.ndarray, np.ndarray]:
    """(#B(m), #E_m) for m = 0..n.

    The ball counts semigroup elements (nonempty products), so the
    identity root of the spanning tree is excluded; with it, the radius-1
    ball would already overshoot the 2 m**(2 sqrt(m) + 2) bound.
    """
    elements = bfs_ball(n, max_elements)
    lengths = np.fromiter((len(w) for w in elements.values()), dtype=np.int64)
    level = np.bincount(lengths, minlength=n + 1)
    return np.cumsum(level) - 1, level


def theorem_bound_log(n: int) -> float:
    """log of the ball upper bound 2 n**(2 sqrt(n) + 2)."""
    return math.log(2.0) + (2.0 * math.sqrt(n) + 2.0) * math.log(n)


def fitted_lower_constant(ball: np.ndarray, n_min: int = 8) -> float:
    """Largest c with #B(m) >= 2**(c sqrt(m)/log m) on every m >= n_min."""
    cs = []
    for m in range(n_min, len(ball)):
        if ball[m] > 1:
            cs.append(math.log2(float(ball[m])) * math.log(m) / math.sqrt(m))
    if not cs:
        raise ValueError("ball too small to fit")
    return min(cs)
