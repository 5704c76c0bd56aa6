"""Dehn's algorithm over symmetrized small-cancellation presentations.

A per-presentation index holds one suffix automaton per rotation class of
relators, built over the doubled representative so cyclic factors are
found in one stream. Any factor of length l <= |r| is the prefix of the
rotated relator starting at the factor's offset, which is exactly what the
replacement step needs.
"""

from fractions import Fraction
from functools import lru_cache
from typing import List, NamedTuple, Optional, Tuple

from .automata import SuffixAutomaton
from .errors import NotReduced, NotSmallCancellation, NotSymmetrized
from .presentation import Presentation, _rotation_classes, piece_table
from .words import Word, concat, inverse, is_reduced, reduce, shift


class GreendlingerHit(NamedTuple):
    relator: Word
    subword_start: int
    subword_length: int


class _DehnIndex:
    def __init__(self, p: Presentation):
        if not p.symmetrized:
            raise NotSymmetrized("word problem needs a symmetrized presentation")
        self.classes: List[Tuple[Word, SuffixAutomaton]] = [
            (x, SuffixAutomaton(x + x)) for x in _rotation_classes(p)]


@lru_cache(maxsize=32)
def _index(p: Presentation) -> _DehnIndex:
    return _DehnIndex(p)


@lru_cache(maxsize=32)
def _certified(p: Presentation):
    report = piece_table(p)
    if p.lam > Fraction(1, 6):
        raise NotSmallCancellation(
            "Dehn's algorithm requires lambda <= 1/6, got %s" % (p.lam,))
    if not report.lambda_verdict:
        raise NotSmallCancellation(
            "presentation is not C'(%s); max piece %d"
            % (p.lam, report.max_piece_length))
    return report


def find_greendlinger_subword(w: Word, p: Presentation, threshold
                              ) -> Optional[GreendlingerHit]:
    """Longest subword of w exceeding threshold*|r| for some relator r.

    Longest-first; ties broken by earliest position in w, then by relator
    class order, so results are deterministic.
    """
    if not is_reduced(w):
        raise NotReduced("query word must be freely reduced")
    threshold = Fraction(threshold)
    idx = _index(p)
    best: Optional[Tuple[int, int, Word]] = None  # (length, start, relator)
    for x, sa in idx.classes:
        n = len(x)
        cl, cstart, cend = 0, -1, -1
        for pos, l, we in sa.iter_matches(w, cap=n):
            if l > cl:
                cl, cstart, cend = l, pos - l + 1, we
        if cl == 0 or Fraction(cl) <= threshold * n:
            continue
        sx = cend - cl + 1
        if sx >= n:
            sx -= n
        cand = (cl, cstart, shift(x, sx))
        if best is None or (-cand[0], cand[1]) < (-best[0], best[1]):
            best = cand
    if best is None:
        return None
    l, start, relator = best
    return GreendlingerHit(relator, start, l)


def dehn_reduce(w: Word, p: Presentation) -> Word:
    """Repeatedly replace majority relator subwords by the shorter half.

    Each step replaces s (|s| > |r|/2, s a prefix of the rotated relator
    r = s t) by t^-1 and freely reduces, so the length strictly drops and
    the loop terminates.
    """
    _certified(p)
    if not is_reduced(w):
        raise NotReduced("query word must be freely reduced")
    half = Fraction(1, 2)
    while True:
        hit = find_greendlinger_subword(w, p, half)
        if hit is None:
            return w
        r, start, l = hit.relator, hit.subword_start, hit.subword_length
        assert w[start:start + l] == r[:l]
        w = reduce(w[:start] + inverse(r[l:]) + w[start + l:])


def is_identity(w: Word, p: Presentation) -> bool:
    """Whether w represents the identity of the presented group."""
    return dehn_reduce(reduce(w), p) == ()


def relevant_relator_bound(radius: int) -> int:
    """Length above which relators cannot affect queries of length <= 2*radius.

    A Dehn step needs a majority subword, so a relator of length > 4*radius
    never fires on such queries.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return 4 * radius
