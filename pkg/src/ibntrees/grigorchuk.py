"""The first Grigorchuk group: action, word problem, inverted orbits.

The four generators act on binary strings through the wreath recursion
a = swap<1,1>, b = <a,c>, c = <a,d>, d = <1,b>; on the all-ones tail the
b/c/d descent acts trivially, so points of the orbit of 1^infinity are
stored as the finite prefix where they may differ from all-ones (trailing
1s trimmed).  Words act on the right: x . (gh) = (x . g) . h.

Everything downstream of a word -- inverted orbit, loop erasure, branch
marks -- follows the incremental law O(w g) = {x0 g} union O(w) g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from . import rng

GENERATORS = "abcd"

# sections (on 0, on 1) of the non-rotating generators; None = identity
SECTIONS = {"b": ("a", "c"), "c": ("a", "d"), "d": (None, "b")}


class DepthBudgetError(RuntimeError):
    """Raised when a ray point outgrows its prefix budget."""


# -- action on finite strings (exhaustive checks) ----------------------------

def act_on_string(letter: str, s: str, sections=None) -> str:
    """Image of the depth-len(s) string s under one generator."""
    sections = SECTIONS if sections is None else sections
    if letter == "a":
        return ("1" if s[0] == "0" else "0") + s[1:] if s else s
    g, i = letter, 0
    s = list(s)
    while g is not None and g != "a" and i < len(s):
        if s[i] == "0":
            g = sections[g][0]
            if g == "a" and i + 1 < len(s):
                s[i + 1] = "1" if s[i + 1] == "0" else "0"
            g = None
        else:
            g = sections[g][1]
            i += 1
    return "".join(s)


def act_word_on_string(word: str, s: str, sections=None) -> str:
    for ch in word:
        s = act_on_string(ch, s, sections)
    return s


def verify_relations(depth: int, sections=None) -> bool:
    """Check a^2=b^2=c^2=d^2=1 and bc=cb=d, bd=db=c, cd=dc=b as
    permutations of {0,1}^depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    strings = ["".join(bits) for bits in product("01", repeat=depth)]

    def image(word: str) -> list[str]:
        return [act_word_on_string(word, s, sections) for s in strings]

    ident = list(strings)
    for g in GENERATORS:
        if image(g + g) != ident:
            return False
    for x, y, z in (("b", "c", "d"), ("b", "d", "c"), ("c", "d", "b")):
        if image(x + y) != image(z) or image(y + x) != image(z):
            return False
    return True


# -- action on ray points -----------------------------------------------------

def act_point(letter: str, prefix: str, budget: int = 4096) -> str:
    """Image of the point prefix·111... under one generator, canonical form.

    The prefix can grow by at most one letter (an `a` flipping the first
    tail 1 to 0); beyond the budget the call fails loudly rather than
    truncating.
    """
    if letter == "a":
        bits = prefix if prefix else "1"
        flipped = ("1" if bits[0] == "0" else "0") + bits[1:]
        return _trim(flipped)
    g, i = letter, 0
    while g is not None and g != "a":
        if i >= len(prefix):
            return prefix  # all-ones tail: b, c, d act trivially
        if prefix[i] == "0":
            g = SECTIONS[g][0]
            if g == "a":
                j = i + 1
                if j > budget:
                    raise DepthBudgetError(f"prefix budget {budget} exhausted")
                bits = prefix + "1" * (j + 1 - len(prefix)) if j >= len(prefix) else prefix
                flipped = bits[:j] + ("1" if bits[j] == "0" else "0") + bits[j + 1:]
                return _trim(flipped)
            return prefix
        g = SECTIONS[g][1]
        i += 1
    return prefix


def _trim(bits: str) -> str:
    return bits.rstrip("1")


def act_point_word(word: str, prefix: str, budget: int = 4096) -> str:
    for ch in word:
        prefix = act_point(ch, prefix, budget)
    return prefix


# -- word problem -------------------------------------------------------------

_THIRD = {frozenset("bc"): "d", frozenset("bd"): "c", frozenset("cd"): "b"}


def reduce_word(word: str) -> str:
    """Collapse xx -> 1 and xy -> z inside {b,c,d} until the word alternates."""
    out: list[str] = []
    for ch in word:
        if ch not in GENERATORS:
            raise ValueError(f"bad generator {ch!r}")
        while True:
            if not out:
                out.append(ch)
                break
            t = out[-1]
            if t == ch:
                out.pop()
                break
            if t != "a" and ch != "a":
                out.pop()
                ch = _THIRD[frozenset((t, ch))]
                continue
            out.append(ch)
            break
    return "".join(out)


def wreath_sections(word: str) -> tuple[bool, str, str]:
    """(root swap, section on subtree 0, section on subtree 1) of the word."""
    swapped = False
    w0: list[str] = []
    w1: list[str] = []
    for ch in word:
        if ch == "a":
            swapped = not swapped
            continue
        s0, s1 = SECTIONS[ch]
        if swapped:
            s0, s1 = s1, s0
        if s0 is not None:
            w0.append(s0)
        if s1 is not None:
            w1.append(s1)
    return swapped, "".join(w0), "".join(w1)


_BASE_STRINGS = ["".join(bits) for bits in product("01", repeat=3)]


@lru_cache(maxsize=1 << 20)
def _trivial_reduced(word: str) -> bool:
    if not word:
        return True
    if len(word) <= 2:
        return all(act_word_on_string(word, s) == s for s in _BASE_STRINGS)
    swapped, w0, w1 = wreath_sections(word)
    if swapped:
        return False
    return _trivial_reduced(reduce_word(w0)) and _trivial_reduced(reduce_word(w1))


def is_trivial(word: str) -> bool:
    """Word problem via the contracting wreath recursion.

    Reduce, check the root permutation, split into the two level-1
    sections and recurse; sections strictly shorten, and words of reduced
    length <= 2 are decided by their action at depth 3.
    """
    return _trivial_reduced(reduce_word(word))


# -- inverted orbits -----------------------------------------------------------

X0 = ""  # canonical prefix of the all-ones ray point


def inverted_orbit(word: str, budget: int = 4096) -> frozenset[str]:
    """O(g_1..g_l) = {x0 g_l, x0 g_{l-1} g_l, ..., x0 g_1..g_l}; the empty
    word gives {x0}."""
    pts = {X0}
    for ch in word:
        pts = {act_point(ch, p, budget) for p in pts}
        pts.add(act_point(ch, X0, budget))
    return frozenset(pts)


def orbit_sizes(word: str, budget: int = 4096) -> np.ndarray:
    """sizes[l] = #O(g_1..g_l) for every prefix, sizes[0] = 1."""
    sizes = np.empty(len(word) + 1, dtype=np.int64)
    sizes[0] = 1
    pts = {X0}
    for i, ch in enumerate(word, start=1):
        pts = {act_point(ch, p, budget) for p in pts}
        pts.add(act_point(ch, X0, budget))
        sizes[i] = len(pts)
    return sizes


# -- loop erasure ---------------------------------------------------------------

def _erase_pass(word: str) -> str:
    """One left-to-right pass deleting maximal trivial segments over which
    the inverted-orbit size stays flat."""
    sizes = orbit_sizes(word)
    n = len(word)
    keep = [True] * n
    start = 1  # 1-indexed candidate for the next loop start
    while start <= n:
        found = None
        for L in range(start, n + 1):
            base = sizes[L - 1]
            if sizes[L] != base:
                continue
            # orbit sizes are nondecreasing: the flat stretch is contiguous
            end = L
            while end + 1 <= n and sizes[end + 1] == base:
                end += 1
            for U in range(end, L, -1):
                if is_trivial(word[L - 1:U]):
                    found = (L, U)
                    break
            if found:
                break
        if not found:
            break
        L, U = found
        for i in range(L - 1, U):
            keep[i] = False
        start = U + 1
    return "".join(ch for ch, k in zip(word, keep) if k)


def loop_erase(word: str) -> str:
    """Delete every trivial segment whose span leaves the inverted-orbit
    size flat, in order of appearance, until none remains.

    Erasing such a loop provably changes no prefix orbit, so passes are
    repeated on the shortened word until a fixpoint: concatenation seams
    can expose new flat trivial segments.  In the result, every trivial
    segment grows the orbit by at least one.
    """
    while True:
        erased = _erase_pass(word)
        if erased == word:
            return word
        word = erased


# -- word search -----------------------------------------------------------------

def search_word(n: int, beam: int = 256, seed: int = 0,
                force_beam: bool = False) -> str:
    """A length-n word with large inverted orbit.

    States are deduplicated by their orbit set (the future depends on
    nothing else), which makes the search exhaustive whenever the state
    count stays within the beam; n <= 12 falls back to a fully exhaustive
    pass unless force_beam is set.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    width = None if (n <= 12 and not force_beam) else beam
    gen = rng.stream_rng(seed, rng.SEARCH_STREAM)
    states: dict[frozenset[str], str] = {frozenset({X0}): ""}
    for _ in range(n):
        nxt: dict[frozenset[str], str] = {}
        for orbit, word in states.items():
            for ch in GENERATORS:
                no = frozenset({act_point(ch, p) for p in orbit} | {act_point(ch, X0)})
                if no not in nxt:
                    nxt[no] = word + ch
        if width is not None and len(nxt) > width:
            keys = list(nxt.keys())
            order = gen.permutation(len(keys))
            ranked = sorted(range(len(keys)), key=lambda i: (-len(keys[i]), order[i]))
            nxt = {keys[i]: nxt[keys[i]] for i in ranked[:width]}
        states = nxt
    return max(states.items(), key=lambda kv: len(kv[0]))[1]


def doubling_word(levels: int, beam: int = 256, seed: int = 0) -> tuple[str, list[str]]:
    """Concatenation xi_1 xi_2 ... of the best found blocks of length 2^k.

    Along the result, every prefix containing xi_k has orbit at least
    #O(xi_k) while being at most 4 |xi_k| long, so orbit growth transfers
    from the blocks to the whole word.
    """
    blocks = [search_word(2 ** k, beam, seed) for k in range(1, levels + 1)]
    return "".join(blocks), blocks


# -- branch marks and the embedded spherically symmetric tree --------------------

@dataclass(frozen=True)
class BranchMarks:
    """Positions along a loop-erased word where the inverted orbit grows.

    The first position is marked by convention; the cumulative mark count
    at l equals #O(q_1..q_l).  Walking the word and inserting a two-way
    lamp choice right after each marked letter yields a spherically
    symmetric tree whose level sizes are powers of two.
    """

    sizes: np.ndarray   # orbit size per prefix length, sizes[0] = 1
    marks: np.ndarray   # marks[l] for letter l >= 1; slot 0 unused

    @property
    def word_length(self) -> int:
        return len(self.sizes) - 1

    def mark_positions(self) -> np.ndarray:
        """M_i = position of the i-th mark (M_1 = 1)."""
        return np.flatnonzero(self.marks)

    def Lambda(self, n: int) -> int:
        """Largest l >= 1 with l + sizes[l] <= n (0 if none)."""
        l = np.arange(1, len(self.sizes))
        ok = l + self.sizes[1:] <= n
        return int(l[ok][-1]) if ok.any() else 0

    def star_positions(self) -> np.ndarray:
        """Graph distances at which the lamp choice sits: M_i + i."""
        m = self.mark_positions()
        return m + np.arange(1, len(m) + 1)

    def tree_marks(self, N: int) -> np.ndarray:
        """Depth-indexed branching flags for from_branch_marks: depth d
        splits in two iff distance d+1 carries a lamp choice."""
        stars = self.star_positions()
        out = np.zeros(N, dtype=bool)
        inside = stars[stars <= N]
        out[inside - 1] = True
        return out

    def level_log2_sizes(self, N: int) -> np.ndarray:
        """log2 #E_n of the embedded tree: the number of lamp choices
        within distance n."""
        stars = self.star_positions()
        counts = np.zeros(N + 1)
        idx = stars[stars <= N]
        counts[idx] = 1.0
        return np.cumsum(counts)

    def max_tree_depth(self) -> int:
        """Deepest level the finite word supports: L + sizes[L]."""
        L = self.word_length
        return int(L + self.sizes[L])


def branch_marks(word: str, budget: int = 4096) -> BranchMarks:
    sizes = orbit_sizes(word, budget)
    marks = np.zeros(len(word) + 1, dtype=bool)
    if len(word) >= 1:
        marks[1] = True
        marks[2:] = sizes[2:] > sizes[1:-1]
    return BranchMarks(sizes=sizes, marks=marks)


# -- growth constants --------------------------------------------------------------

def eta_root(tol: float = 1e-12) -> float:
    """Real root of X^3 + X^2 + X - 2 by bisection on (0, 1)."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if mid ** 3 + mid ** 2 + mid - 2.0 < 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def orbit_growth_exponent() -> float:
    """log 2 / log(2/eta) with eta the real root above (about 0.7674)."""
    return math.log(2.0) / math.log(2.0 / eta_root())


def orbit_exponent_estimate(lengths, beam: int = 64, seed: int = 0):
    """Least-squares slope of log #O(w_n) against log n over searched words.

    Returns (slope, residual, points); the searched words need not attain
    the extremal growth, so the slope is a report, not an assertion.
    """
    lengths = sorted(set(int(x) for x in lengths))
    if len(lengths) < 3:
        raise ValueError("need at least 3 lengths for a fit")
    pts = []
    for n in lengths:
        w = search_word(n, beam, seed)
        pts.append((n, len(inverted_orbit(w))))
    x = np.log([p[0] for p in pts])
    y = np.log([max(p[1], 1) for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), resid, pts
