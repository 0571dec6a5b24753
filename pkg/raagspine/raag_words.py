"""
Words in a right-angled Artin group.

A word is a tuple of letters (see :mod:`raagspine.graph_core`). Two words
represent the same group element exactly when they reduce to the same
normal form: shuffle commuting letters, cancel ``x ... x^-1`` pairs whose
intermediate letters all commute with ``x``, and take the lexicographically
least shuffle of what remains.

Usage:
    g = parse_graph("vertices: a b\\nedges: a-b")
    w = parse_word(g, "b a a^-1 a")
    format_word(g, normalize(g, w))   # "a b"
"""

from __future__ import annotations

from collections import deque
from typing import List, Optional, Set, Tuple

import numpy as np

from raagspine.config import pick
from raagspine.errors import UnknownVertexError, WordError, WordTooLongError
from raagspine.graph_core import Letter, SimplicialGraph, inverse_letter

Word = Tuple[Letter, ...]
NormalForm = Word

EMPTY_WORD_TEXT = "1"


# ------------------------------
# Text form
# ------------------------------
def parse_word(g: SimplicialGraph, text: str) -> Word:
    """Whitespace-separated ``name`` / ``name^-1`` tokens; ``1`` or blank is the identity."""
    tokens = text.replace(",", " ").split()
    if tokens == [EMPTY_WORD_TEXT]:
        return ()
    try:
        return tuple(g.letter(token) for token in tokens)
    except UnknownVertexError as e:
        raise WordError(f"cannot parse word '{text}': {e}") from None


def format_word(g: SimplicialGraph, w: Word) -> str:
    if not w:
        return EMPTY_WORD_TEXT
    return " ".join(g.letter_name(x) for x in w)


def inverse_word(w: Word) -> Word:
    return tuple(inverse_letter(x) for x in reversed(w))


def free_reduce(w: Word) -> Word:
    """Cancel adjacent ``x x^-1`` pairs only."""
    out: List[Letter] = []
    for x in w:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


# ------------------------------
# Normal forms
# ------------------------------
def _reduce(g: SimplicialGraph, w: Word) -> List[Letter]:
    out: List[Letter] = []
    for x in w:
        inv = x ^ 1
        link = g.links[x >> 1]
        for k in range(len(out) - 1, -1, -1):
            y = out[k]
            if y == inv:
                del out[k]
                break
            if not link >> (y >> 1) & 1:
                out.append(x)
                break
        else:
            out.append(x)
    return out


def _lex_least(g: SimplicialGraph, letters: List[Letter]) -> Word:
    remaining = list(letters)
    result: List[Letter] = []
    while remaining:
        best = -1
        seen = 0
        for k, y in enumerate(remaining):
            # y can move to the front iff every earlier letter commutes with it
            if seen & ~g.links[y >> 1] == 0 and (best < 0 or y < remaining[best]):
                best = k
            seen |= 1 << (y >> 1)
        result.append(remaining.pop(best))
    return tuple(result)


def normalize(g: SimplicialGraph, w: Word) -> NormalForm:
    """Reduced, lexicographically least representative of ``w``."""
    return _lex_least(g, _reduce(g, w))


def equal(g: SimplicialGraph, w1: Word, w2: Word) -> bool:
    return normalize(g, w1) == normalize(g, w2)


def multiply(g: SimplicialGraph, *words: Word) -> NormalForm:
    joined: List[Letter] = []
    for w in words:
        joined.extend(w)
    return normalize(g, tuple(joined))


def front_positions(g: SimplicialGraph, w: Word) -> List[int]:
    out = []
    seen = 0
    for k, y in enumerate(w):
        if seen & ~g.links[y >> 1] == 0:
            out.append(k)
        seen |= 1 << (y >> 1)
    return out


def end_positions(g: SimplicialGraph, w: Word) -> List[int]:
    out = []
    seen = 0
    for k in range(len(w) - 1, -1, -1):
        y = w[k]
        if seen & ~g.links[y >> 1] == 0:
            out.append(k)
        seen |= 1 << (y >> 1)
    return out


# ------------------------------
# Special subgroups
# ------------------------------
def split_prefix(g: SimplicialGraph, w: Word, vertex_mask: int) -> Tuple[NormalForm, NormalForm]:
    """
    Split ``w`` as ``prefix * rest`` with ``prefix`` the largest piece over
    ``vertex_mask`` that shuffles to the front.
    """
    rest = list(normalize(g, w))
    prefix: List[Letter] = []
    while True:
        k = next((k for k in front_positions(g, rest) if vertex_mask >> (rest[k] >> 1) & 1), None)
        if k is None:
            break
        prefix.append(rest.pop(k))
    return normalize(g, tuple(prefix)), normalize(g, tuple(rest))


def split_suffix(g: SimplicialGraph, w: Word, vertex_mask: int) -> Tuple[NormalForm, NormalForm]:
    """Split ``w`` as ``rest * suffix``; ``rest`` is the shortest element of w<vertex_mask>."""
    rest = list(normalize(g, w))
    suffix: List[Letter] = []
    while True:
        k = next((k for k in end_positions(g, rest) if vertex_mask >> (rest[k] >> 1) & 1), None)
        if k is None:
            break
        suffix.append(rest.pop(k))
    return normalize(g, tuple(rest)), normalize(g, tuple(reversed(suffix)))


def coset_meet(g: SimplicialGraph, x: Word, a_mask: int, y: Word, b_mask: int) -> Optional[NormalForm]:
    """
    Some element of x<A> meet y<B> for vertex sets A and B, None when the
    cosets are disjoint. A non-empty meet is the coset of <A meet B> through it.
    """
    prefix, rest = split_prefix(g, inverse_word(x) + tuple(y), a_mask)
    if any(not b_mask >> (letter >> 1) & 1 for letter in rest):
        return None
    return normalize(g, tuple(x) + prefix)


# ------------------------------
# Conjugacy
# ------------------------------
def cyclic_reduce(g: SimplicialGraph, w: Word) -> Tuple[Word, NormalForm]:
    """
    Split ``w`` as ``p c p^-1`` with ``c`` cyclically reduced.

    Args:
        g: the defining graph
        w: any word

    Returns:
        (p, c) with c in normal form
    """
    current = list(normalize(g, w))
    prefix: List[Letter] = []
    while True:
        pair = None
        ends = end_positions(g, current)
        for i in front_positions(g, current):
            for j in ends:
                if j != i and current[j] == current[i] ^ 1:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            break
        i, j = pair
        prefix.append(current[i])
        current = [x for k, x in enumerate(current) if k not in pair]
    return tuple(prefix), normalize(g, tuple(current))


def _rotation_closure(g: SimplicialGraph, core: NormalForm) -> Set[NormalForm]:
    start = normalize(g, core)
    seen = {start}
    queue = deque([start])
    while queue:
        word = queue.popleft()
        for k in front_positions(g, word):
            rotated = normalize(g, word[:k] + word[k + 1:] + (word[k],))
            if rotated not in seen:
                seen.add(rotated)
                queue.append(rotated)
    return seen


def _guarded_core(g: SimplicialGraph, w: Word, max_length: Optional[int]) -> NormalForm:
    limit = pick(max_length, "words.max_conjugacy_length")
    _, core = cyclic_reduce(g, w)
    if len(core) > limit:
        raise WordTooLongError(f"cyclically reduced length {len(core)} exceeds conjugacy limit {limit}")
    return core


def cyclic_normal_form(g: SimplicialGraph, w: Word, max_length: Optional[int] = None) -> NormalForm:
    """Conjugacy-class invariant: least normal form among rotations of the cyclic core."""
    core = _guarded_core(g, w, max_length)
    if len(core) <= 1:
        return core
    return min(_rotation_closure(g, core))


def is_conjugate(g: SimplicialGraph, w1: Word, w2: Word, max_length: Optional[int] = None) -> bool:
    c1 = _guarded_core(g, w1, max_length)
    c2 = _guarded_core(g, w2, max_length)
    if len(c1) != len(c2) or sorted(c1) != sorted(c2):
        return False
    if len(c1) <= 1:
        return c1 == c2
    return c2 in _rotation_closure(g, c1)


def abelianization(g: SimplicialGraph, w: Word) -> np.ndarray:
    """Image of ``w`` in Z^V."""
    vector = np.zeros(g.n, dtype=np.int64)
    for x in w:
        vector[x >> 1] += -1 if x & 1 else 1
    return vector
