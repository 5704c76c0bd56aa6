"""Presentations, symmetrization, pieces, and the C'(lambda) verdicts.

Relator sets are kept as orbit representatives (one cyclic word per
rotation-and-inversion class); the symmetrized set is a lazy set view over
them, since materializing every shift of a 10000-letter relator is pure
waste. Piece lengths come from suffix automata over doubled representatives,
which the brute-force oracle in the tests cross-checks pair by pair.
"""

from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .automata import SuffixAutomaton
from .errors import EmptyRelator, NotSymmetrized, ParseError
from .words import (EMPTY, Word, concat, cyclic_reduce, format_word, inverse,
                    is_reduced, parse_word, shift, word_to_bytes)


def smallest_period(w: Word) -> int:
    """Smallest d with w equal to a power of its length-d prefix."""
    n = len(w)
    if n == 0:
        return 0
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    p = n - fail[n - 1]
    return p if n % p == 0 else n


def is_rotation(x: Word, y: Word) -> bool:
    if len(x) != len(y):
        return False
    if x == y:
        return True
    try:
        return word_to_bytes(y) in word_to_bytes(concat(x, x))
    except ParseError:
        return any(shift(x, i) == y for i in range(1, len(x)))


class SymmetrizedSet:
    """Set view of all cyclic shifts of the orbit words and their inverses.

    Exact length and streaming iteration without materializing the shifts.
    Orbit words are assumed deduplicated up to rotation and inversion.
    """

    def __init__(self, orbits: Sequence[Word]):
        self._entries: List[Tuple[Word, Word, int, bool]] = []
        for w in orbits:
            iw = inverse(w)
            d = smallest_period(w)
            self._entries.append((w, iw, d, is_rotation(w, iw)))

    def __len__(self) -> int:
        return sum(d if merged else 2 * d
                   for _, _, d, merged in self._entries)

    def length_counts(self) -> List[Tuple[int, int]]:
        """(relator length, number of set elements) per orbit, unmaterialized."""
        return [(len(w), d if merged else 2 * d)
                for w, _, d, merged in self._entries]

    def __iter__(self) -> Iterator[Word]:
        for w, iw, d, merged in self._entries:
            for i in range(d):
                yield shift(w, i)
            if not merged:
                for i in range(d):
                    yield shift(iw, i)

    def __contains__(self, w: object) -> bool:
        if not isinstance(w, tuple):
            return False
        for rep, irep, _, merged in self._entries:
            if is_rotation(rep, w) or (not merged and is_rotation(irep, w)):
                return True
        return False

    def isdisjoint(self, other) -> bool:
        return not any(w in self for w in other)


class Presentation:
    """Generator alphabet, relator orbit representatives, and lambda.

    Relators are stored cyclically reduced; exact duplicates and, when
    symmetrized, rotation/inversion duplicates are merged. Value semantics:
    hashable, comparable, immutable.
    """

    __slots__ = ("gen_names", "lam", "orbits", "symmetrized", "_hash")

    def __init__(self, gen_names: Sequence[str], relators: Sequence[Word],
                 lam, symmetrized: bool = False):
        names = tuple(gen_names)
        if len(set(names)) != len(names) or not all(names):
            raise ParseError("generator names must be distinct and nonempty")
        lam = Fraction(lam)
        if lam <= 0:
            raise ParseError("lambda must be a positive rational")
        seen: Set[Word] = set()
        orbits: List[Word] = []
        for r in relators:
            w = cyclic_reduce(r)
            if not w:
                raise EmptyRelator("relator reduces to the empty word")
            if any(abs(x) > len(names) for x in w):
                raise ParseError("relator letter outside the alphabet")
            if w in seen:
                continue
            seen.add(w)
            orbits.append(w)
        if symmetrized:
            deduped: List[Word] = []
            for w in orbits:
                iw = inverse(w)
                if any(is_rotation(u, w) or is_rotation(u, iw)
                       for u in deduped):
                    continue
                deduped.append(w)
            orbits = deduped
        orbits.sort(key=lambda w: (len(w), w))
        object.__setattr__(self, "gen_names", names)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "orbits", tuple(orbits))
        object.__setattr__(self, "symmetrized", symmetrized)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Presentation is immutable")

    @property
    def relators(self):
        if self.symmetrized:
            return SymmetrizedSet(self.orbits)
        return frozenset(self.orbits)

    def symmetrize(self) -> "Presentation":
        if self.symmetrized:
            return self
        return Presentation(self.gen_names, self.orbits, self.lam,
                            symmetrized=True)

    def with_lambda(self, lam) -> "Presentation":
        return Presentation(self.gen_names, self.orbits, lam,
                            symmetrized=self.symmetrized)

    def min_relator_length(self) -> Optional[int]:
        return len(self.orbits[0]) if self.orbits else None

    def key(self):
        return (self.gen_names, self.lam, self.orbits, self.symmetrized)

    def __eq__(self, other):
        return isinstance(other, Presentation) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.key()))
        return self._hash

    def __repr__(self):
        rels = ", ".join(format_word(w, self.gen_names) for w in self.orbits)
        return ("Presentation(<%s | %s>, lambda=%s, symmetrized=%s)"
                % (" ".join(self.gen_names), rels, self.lam, self.symmetrized))


def symmetrize(relators: Sequence[Word]) -> SymmetrizedSet:
    """Smallest symmetric set containing the cyclic reductions of the input."""
    seen: List[Word] = []
    for r in relators:
        w = cyclic_reduce(r)
        if not w:
            raise EmptyRelator("relator reduces to the empty word")
        iw = inverse(w)
        if any(is_rotation(u, w) or is_rotation(u, iw) for u in seen):
            continue
        seen.append(w)
    seen.sort(key=lambda w: (len(w), w))
    return SymmetrizedSet(seen)


class PieceReport:
    """Outcome of the piece computation over a symmetrized presentation."""

    __slots__ = ("max_piece_length", "witness", "lambda_verdict",
                 "star_verdict", "checks")

    def __init__(self, max_piece_length: int,
                 witness: Optional[Tuple[Word, Word, Word]],
                 lambda_verdict: bool, star_verdict: bool,
                 checks: Tuple[Tuple[int, int, int], ...]):
        self.max_piece_length = max_piece_length
        self.witness = witness
        self.lambda_verdict = lambda_verdict
        self.star_verdict = star_verdict
        # one (piece_len, |u|, |v|) row per rotation-class pair
        self.checks = checks

    def __repr__(self):
        return ("PieceReport(max_piece=%d, lambda_verdict=%s, star_verdict=%s)"
                % (self.max_piece_length, self.lambda_verdict,
                   self.star_verdict))


def _rotation_classes(p: Presentation) -> List[Word]:
    """One representative cyclic word per rotation class of the relator set."""
    reps: List[Word] = []
    for w in p.orbits:
        for cand in (w, inverse(w)):
            if not any(is_rotation(r, cand) for r in reps):
                reps.append(cand)
    return reps


def _within_class_piece(x: Word) -> Optional[Tuple[int, int, int]]:
    """Longest common prefix over distinct shifts of the cyclic word x.

    Returns (piece_len, start1, start2) or None. Aperiodic path: a factor of
    x+x of length l <= |x| is a prefix of two distinct relators iff it
    occurs at two ends e1 < e2 <= |x| - 2 + l; the suffix automaton's two
    smallest end positions decide that per state.
    """
    n = len(x)
    d = smallest_period(x)
    if d < n:
        # periodic: only d distinct shifts, compare them directly
        shifts = [shift(x, i) for i in range(d)]
        best: Optional[Tuple[int, int, int]] = None
        for i in range(d):
            for j in range(i + 1, d):
                u, v = shifts[i], shifts[j]
                k = 0
                while k < n and u[k] == v[k]:
                    k += 1
                if best is None or k > best[0]:
                    best = (k, i, j)
        return best
    if n < 2:
        return None
    sa = SuffixAutomaton(x + x)
    min1, min2 = sa.two_smallest_ends()
    inf = sa.n_symbols + 1
    best = None
    for v in range(1, len(sa.length)):
        if min2[v] >= inf:
            continue
        top = sa.length[v] if sa.length[v] < n else n
        if top <= sa.length[sa.link[v]]:
            continue
        if min2[v] > n - 2 + top:
            continue
        if best is None or top > best[0]:
            s1 = min1[v] - top + 1
            s2 = min2[v] - top + 1
            best = (top, s1, s2)
    return best


def _cross_class_piece(x: Word, y: Word) -> Optional[Tuple[int, int, int]]:
    """Longest common factor of cyclic x and cyclic y, with shift offsets.

    Returns (piece_len, start_in_x, start_in_y) or None when disjoint.
    """
    cap = min(len(x), len(y))
    sa = SuffixAutomaton(x + x)
    l, pat_end, word_end = sa.longest_match(y + y, cap=cap)
    if l == 0:
        return None
    sx = word_end - l + 1
    if sx >= len(x):
        sx -= len(x)
    sy = pat_end - l + 1
    if sy >= len(y):
        sy -= len(y)
    return (l, sx, sy)


def piece_table(p: Presentation) -> PieceReport:
    """Max piece length, a witness pair, and the C'(lambda) / (*) verdicts.

    A piece is a common prefix of two distinct symmetrized relators. The
    verdict compares every rotation-class pair against lambda times the
    smaller relator length, exactly.
    """
    if not p.symmetrized:
        raise NotSymmetrized("piece_table requires a symmetrized presentation")
    classes = _rotation_classes(p)
    best_len = 0
    witness: Optional[Tuple[Word, Word, Word]] = None
    checks: List[Tuple[int, int, int]] = []
    lambda_ok = True
    for i, x in enumerate(classes):
        n = len(x)
        hit = _within_class_piece(x)
        if hit is not None:
            l, s1, s2 = hit
            checks.append((l, n, n))
            if Fraction(l) >= p.lam * n:
                lambda_ok = False
            if l > best_len:
                best_len = l
                u = shift(x, s1)
                witness = (u, shift(x, s2), u[:l])
        elif n >= 2:
            checks.append((0, n, n))
        for j in range(i + 1, len(classes)):
            y = classes[j]
            hit = _cross_class_piece(x, y)
            l = hit[0] if hit else 0
            checks.append((l, n, len(y)))
            if Fraction(l) >= p.lam * min(n, len(y)):
                lambda_ok = False
            if hit and l > best_len:
                best_len = l
                u, v = shift(x, hit[1]), shift(y, hit[2])
                witness = (u, v, u[:l])
    if witness is None:
        # no positive-length piece; pick two distinct relators if any exist
        first_two: List[Word] = []
        for r in p.relators:
            if r not in first_two:
                first_two.append(r)
            if len(first_two) == 2:
                break
        if len(first_two) == 2:
            witness = (first_two[0], first_two[1], EMPTY)
    star_ok = True
    inv_lam = 1 / p.lam
    used = set()
    for w in p.orbits:
        if Fraction(len(w)) <= inv_lam:
            star_ok = False
        for x in w:
            used.add(abs(x))
    if used != set(range(1, len(p.gen_names) + 1)):
        star_ok = False
    return PieceReport(best_len, witness, lambda_ok, star_ok, tuple(checks))


def normalize_star(p: Presentation) -> Tuple[Presentation, Presentation]:
    """Split off the factor satisfying (*): relators longer than 1/lambda.

    Returns (long factor, short factor). Alphabets are disjoint; generators
    unused by any relator go to the short factor as free letters. A letter
    shared between a long and a short relator would be a piece breaking the
    C'(lambda) hypothesis, so sharing raises InvariantViolation.
    """
    from .errors import InvariantViolation

    if not p.symmetrized:
        raise NotSymmetrized("normalize_star requires a symmetrized input")
    inv_lam = 1 / p.lam
    long_orbits = [w for w in p.orbits if Fraction(len(w)) > inv_lam]
    short_orbits = [w for w in p.orbits if Fraction(len(w)) <= inv_lam]
    letters_long = {abs(x) for w in long_orbits for x in w}
    letters_short = {abs(x) for w in short_orbits for x in w}
    if letters_long & letters_short:
        raise InvariantViolation(
            "a letter occurs in both a long and a short relator; "
            "impossible under C'(lambda)")
    all_letters = set(range(1, len(p.gen_names) + 1))
    second_letters = sorted(all_letters - letters_long)
    first_letters = sorted(letters_long)

    def subpresentation(letters: List[int], orbits: List[Word]):
        remap = {old: new + 1 for new, old in enumerate(letters)}
        names = tuple(p.gen_names[old - 1] for old in letters)
        rels = [tuple((remap[abs(x)] if x > 0 else -remap[abs(x)])
                      for x in w) for w in orbits]
        return Presentation(names, rels, p.lam, symmetrized=True)

    return (subpresentation(first_letters, long_orbits),
            subpresentation(second_letters, short_orbits))


def generate_family(n: int, base: str = "ab") -> Presentation:
    """The two-generator fixture family a b a b^2 ... a b^n.

    Makes no small-cancellation claim; certify with piece_table.
    """
    if base != "ab":
        raise ParseError("unknown family id: %r" % (base,))
    if n < 1:
        raise ParseError("family index must be >= 1")
    letters: List[int] = []
    for k in range(1, n + 1):
        letters.append(1)
        letters.extend([2] * k)
    return Presentation(("a", "b"), [tuple(letters)], Fraction(1, 6),
                        symmetrized=True)


def parse_presentation_text(text: str) -> Presentation:
    """Parse the presentation file format.

    Line 1 `gens: a b`, line 2 `lambda: p/q`, then one relator per line.
    Letters are juxtaposed; `A` or `a^-1` for inverses, `b^3` for powers.
    Blank lines and lines starting with `#` are ignored.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 2:
        raise ParseError("expected `gens:` and `lambda:` header lines")
    if not lines[0].startswith("gens:"):
        raise ParseError("first line must start with `gens:`")
    names = tuple(lines[0][len("gens:"):].split())
    if not names:
        raise ParseError("no generators listed")
    if not lines[1].startswith("lambda:"):
        raise ParseError("second line must start with `lambda:`")
    lam_text = lines[1][len("lambda:"):].strip()
    try:
        lam = Fraction(lam_text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError("bad lambda %r" % (lam_text,)) from exc
    relators = [parse_word(ln, names) for ln in lines[2:]]
    return Presentation(names, relators, lam, symmetrized=False)


def format_presentation_text(p: Presentation) -> str:
    lines = ["gens: " + " ".join(p.gen_names), "lambda: %s" % (p.lam,)]
    lines.extend(format_word(w, p.gen_names) for w in p.orbits)
    return "\n".join(lines) + "\n"
