"""Vertex arrays, free products, and the finite-alphabet rewriting.

The vertex array combines the contour array and the edge array by
spreading each contour value uniformly over the loop's vertices and each
edge value over its two endpoints.  Everything runs in exact rational
arithmetic: the square-root normalization is never evaluated entry by
entry, only through squared l2 norms, which for nonnegative vectors equal
the l1 norm of the un-rooted array.

A contour too large to materialize contributes a single structural entry
("block", key) carrying its full spread mass.  Blocks keep l1 norms and
translation behaviour exact; per-vertex resolution inside one block is
given up, which only ever overestimates the l1 norm of a difference.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .arrays import (ArrayParams, contours_common, eta, translate_contour_key,
                     xi)
from .cayley import (DEFAULT_MAX_CONTOUR_CELLS, Contour, Region,
                     _loop_vertex_from_anchor)
from .errors import (InvariantViolation, NotNormalForm, NotSmallCancellation,
                     OutOfRegion, ResourceLimit, Skipped, ValencyExceeded)
from .presentation import PieceReport, Presentation, piece_table
from .sparse import SparseVector
from .words import (Word, common_prefix_length, cyclic_reduce, cyclic_shifts,
                    inverse, reduce)


class ProperArrayParams:
    """Two-level parameter block, one step function per array level.

    Level one drives the contour array, level two the edge array; the two
    levels share lambda and mu.  Strict mode additionally requires the gap
    nu11 + 2*lambda <= nu20 - 2*lambda between the levels (equality holds
    at the default values).
    """

    __slots__ = ("lam", "mu", "nu10", "nu11", "nu20", "nu21", "relaxed")

    def __init__(self, nu10=Fraction(6, 33), nu11=Fraction(71, 330),
                 nu20=Fraction(111, 330), nu21=Fraction(122, 330),
                 lam=Fraction(1, 33), mu=None, relaxed: bool = False):
        lam = Fraction(lam)
        mu = Fraction(mu) if mu is not None else 4 * lam
        nu10, nu11 = Fraction(nu10), Fraction(nu11)
        nu20, nu21 = Fraction(nu20), Fraction(nu21)
        if not relaxed and not nu11 + 2 * lam <= nu20 - 2 * lam:
            raise ValueError(
                "need nu11 + 2*lambda <= nu20 - 2*lambda (or relaxed=True)")
        self.lam = lam
        self.mu = mu
        self.nu10, self.nu11 = nu10, nu11
        self.nu20, self.nu21 = nu20, nu21
        self.relaxed = relaxed
        self.xi_params()
        self.eta_params()

    def xi_params(self) -> ArrayParams:
        return ArrayParams(self.nu10, self.nu11, self.lam, self.mu,
                           relaxed=self.relaxed)

    def eta_params(self) -> ArrayParams:
        return ArrayParams(self.nu20, self.nu21, self.lam, self.mu,
                           relaxed=self.relaxed)

    @property
    def K1(self) -> Fraction:
        return self.lam / (self.nu11 - self.nu10)

    @property
    def K2(self) -> Fraction:
        return self.lam / (self.nu21 - self.nu20)

    @property
    def xi_drift_bound(self) -> Fraction:
        if not 0 < self.K1 < 1:
            raise ValueError("drift bound needs 0 < K1 < 1")
        return 1 / ((1 - self.K1) * (self.nu11 - self.nu10))

    @property
    def eta_drift_bound(self) -> Fraction:
        if not 0 < self.K2 < 1:
            raise ValueError("drift bound needs 0 < K2 < 1")
        return 1 + 1 / (self.K2 * (1 - self.K2) * (self.nu21 - self.nu20))

    @property
    def L(self) -> Fraction:
        return self.xi_drift_bound + self.eta_drift_bound

    def __repr__(self):
        return ("ProperArrayParams(lam=%s, mu=%s, nu1=(%s, %s), "
                "nu2=(%s, %s)%s)"
                % (self.lam, self.mu, self.nu10, self.nu11, self.nu20,
                   self.nu21, ", relaxed" if self.relaxed else ""))


def _endpoints(e) -> Tuple[Word, Word]:
    w, x = e
    return w, reduce(w + (x,))


def _contour_vertex_set(key, c: Optional[Contour],
                        max_cells: Optional[int]):
    """All loop vertices behind a contour key, or ResourceLimit.

    A materialized Contour is the authority on its vertex names.  Without
    one, an "edges" key is unfolded by free reduction, which is only valid
    when consecutive loop vertices are literal word extensions; a naming
    that is not free-coherent fails the vertex count and is rejected.
    """
    if c is not None and c.materialized:
        vs = set(c.vertices())
        if len(vs) != c.length:
            raise InvariantViolation("contour loop is not simple")
        return vs
    if key[0] == "edges":
        vs = set()
        for e in key[1]:
            a, b = _endpoints(e)
            vs.add(a)
            vs.add(b)
        if len(vs) != len(key[1]):
            raise InvariantViolation(
                "cannot unfold the loop from its edge words alone; pass "
                "the matching Contour")
        return vs
    if key[0] == "anchored":
        if c is None or c.anchor is None:
            raise ResourceLimit(
                "anchored contour key needs its Contour to materialize")
        if c.materialized:
            return set(c.vertices())
        budget = max_cells if max_cells is not None else \
            DEFAULT_MAX_CONTOUR_CELLS
        n = c.length
        if n * (len(c.anchor) + n) > budget:
            raise ResourceLimit("contour loop of length %d at anchor "
                                "length %d exceeds the cell budget"
                                % (n, len(c.anchor)))
        vs = {_loop_vertex_from_anchor(c, j) for j in range(n)}
        if len(vs) != n:
            raise InvariantViolation("contour loop is not simple")
        return vs
    raise ValueError("unknown contour key %r" % (key,))


def project_contours(v: SparseVector,
                     contours: Optional[Sequence[Contour]] = None,
                     *, max_cells: Optional[int] = None) -> SparseVector:
    """Spread each contour entry uniformly over the loop's vertices.

    Every entry contributes value/|r| at each of the |r| loop vertices, so
    the l1 norm never grows and is preserved for nonnegative input.  Keys
    of "edges" type carry their own vertex set; "anchored" keys need the
    matching Contour passed in `contours`, and a loop too large for the
    cell budget raises ResourceLimit.
    """
    if v.domain != "contours":
        raise ValueError("project_contours expects a contour vector")
    cmap = {c.key: c for c in contours} if contours else {}
    items: Dict[object, Fraction] = {}
    for key, val in v.items():
        vs = _contour_vertex_set(key, cmap.get(key), max_cells)
        share = val / len(vs)
        for w in vs:
            items[w] = items.get(w, Fraction(0)) + share
    return SparseVector("vertices", items)


def project_edges(v: SparseVector) -> SparseVector:
    """Spread each edge entry as value/2 onto its two endpoints."""
    if v.domain != "edges":
        raise ValueError("project_edges expects an edge vector")
    items: Dict[object, Fraction] = {}
    for e, val in v.items():
        for w in _endpoints(e):
            items[w] = items.get(w, Fraction(0)) + val / 2
    return SparseVector("vertices", items)


def phi(g, h, params: ProperArrayParams, ctx: Region,
        *, max_cells: Optional[int] = None) -> SparseVector:
    """Vertex array of the pair (g, h).

    The contour array, run with the level-one step function, is projected
    onto loop vertices; the edge array, run with the level-two step
    function, onto edge endpoints.  A contour whose loop cannot be
    materialized stays as one structural ("block", key) entry holding its
    whole spread mass, which keeps every l1 accounting exact.
    """
    px = params.xi_params()
    pe = params.eta_params()
    xv = xi(g, h, px.step(), px, ctx)
    A = contours_common(g, h, params.mu, ctx)
    ev = eta(g, h, pe.step(), A, pe, ctx)
    cmap = {c.key: c for c in A}
    items: Dict[object, Fraction] = {}
    for key, val in xv.items():
        try:
            vs = _contour_vertex_set(key, cmap.get(key), max_cells)
        except ResourceLimit:
            bk = ("block", key)
            items[bk] = items.get(bk, Fraction(0)) + val
            continue
        share = val / len(vs)
        for w in vs:
            items[w] = items.get(w, Fraction(0)) + share
    for e, val in ev.items():
        for w in _endpoints(e):
            items[w] = items.get(w, Fraction(0)) + val / 2
    return SparseVector("vertices", items)


def translate_phi_key(k: Word, key):
    """Left-translate a vertex-array key (word or structural block)."""
    if key and isinstance(key[0], str):
        if key[0] == "block":
            return ("block", translate_contour_key(k, key[1]))
        raise ValueError("unknown vertex key %r" % (key,))
    return reduce(tuple(k) + tuple(key))


def translate_phi(k: Word, v: SparseVector) -> SparseVector:
    """Left-translate a vertex array by k (exact on tree regions)."""
    return v.map_keys(lambda key: translate_phi_key(k, key))


def _generator_letters(ctx: Region) -> List[int]:
    out = []
    for i in range(1, len(ctx.presentation.gen_names) + 1):
        out.extend((i, -i))
    return out


def phi_tilde_stats(g, h, params: ProperArrayParams, ctx: Region
                    ) -> Tuple[Fraction, bool]:
    """Squared l2 norm of the rooted array, plus the drift verdict.

    The first component is the l1 norm of phi, which equals the squared
    l2 norm of its entrywise square root because phi is nonnegative.  The
    second reports whether ||phi[g,h] - phi[gx,h]||_1 <= L held for every
    generator translate gx that stayed inside the region's margins.
    """
    v = phi(g, h, params, ctx)
    if not v.is_nonnegative():
        raise InvariantViolation("vertex array has a negative entry")
    bound = params.L
    gw = ctx.resolve(g)
    ok = True
    for x in _generator_letters(ctx):
        try:
            gx = ctx.resolve(tuple(gw) + (x,))
            v2 = phi(gx, h, params, ctx)
        except (OutOfRegion, Skipped):
            continue
        if (v - v2).l1() > bound:
            ok = False
    return v.l1(), ok


def phi_tilde_approx(v: SparseVector) -> Dict[object, float]:
    """Entrywise square root as floats.  Approximate, export only."""
    return {k: math.sqrt(float(val)) for k, val in v.items()}


# ---------------------------------------------------------------------------
# Free products


class FactorArray:
    """Squared-amplitude array of one free-product factor.

    mass_vector(x) is the entrywise square of the factor's array vector at
    x: finitely supported, nonnegative, exactly rational.  Working with
    masses instead of amplitudes keeps square roots out of every identity
    that gets verified.  The identity element must map to the zero vector.
    """

    identity: object = None

    def is_identity(self, x) -> bool:
        raise NotImplementedError

    def mass_vector(self, x) -> SparseVector:
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError


class WordLengthFactor(FactorArray):
    """Geodesic array of a finitely generated free group.

    The amplitude at the two endpoints of the geodesic [1, x] is 1/2 and
    at its interior vertices 1, so the mass vector carries 1/4, 1/4 and 1
    and the squared norm is |x| - 1/2 for x != 1.  The half weights at the
    endpoints are what make the array symmetric: translating the vector at
    x^-1 by x reproduces the vector at x exactly.
    """

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("need rank >= 1")
        self.rank = rank
        self.identity = ()

    def is_identity(self, x) -> bool:
        return len(x) == 0

    def _check(self, x) -> Word:
        x = tuple(x)
        if reduce(x) != x or any(not 1 <= abs(v) <= self.rank for v in x):
            raise ValueError("element %r is not a reduced word of rank %d"
                             % (x, self.rank))
        return x

    def mass_vector(self, x) -> SparseVector:
        x = self._check(x)
        if not x:
            return SparseVector.zero("vertices")
        items: Dict[object, Fraction] = {(): Fraction(1, 4),
                                         x: Fraction(1, 4)}
        for j in range(1, len(x)):
            items[x[:j]] = Fraction(1)
        return SparseVector("vertices", items)

    def inverse(self, x):
        return inverse(self._check(x))

    def mul(self, a, b):
        return reduce(self._check(a) + self._check(b))

    def iter_elements(self) -> Iterator[Word]:
        """Nonidentity elements in shortlex order, so in mass order."""
        letters = []
        for i in range(1, self.rank + 1):
            letters.extend((i, -i))
        frontier: List[Word] = [()]
        while True:
            nxt = []
            for w in frontier:
                for x in letters:
                    if w and x == -w[-1]:
                        continue
                    nxt.append(w + (x,))
            for w in nxt:
                yield w
            frontier = nxt


class PhiTildeFactor(FactorArray):
    """Vertex-array factor over a materialized region.

    Elements are the region's canonical vertex words; the mass vector of x
    is phi(1, x).  Products and inverses resolve through the region, so
    they raise OutOfRegion when they leave it.
    """

    def __init__(self, ctx: Region, params: ProperArrayParams):
        self.ctx = ctx
        self.params = params
        self.identity = ()

    def is_identity(self, x) -> bool:
        return self.ctx.resolve(x) == ()

    def mass_vector(self, x) -> SparseVector:
        return phi((), x, self.params, self.ctx)

    def inverse(self, x):
        return self.ctx.resolve(inverse(tuple(x)))

    def mul(self, a, b):
        return self.ctx.resolve(tuple(a) + tuple(b))


def _factor(factors: Sequence[FactorArray], n: int) -> FactorArray:
    if not 1 <= n <= len(factors):
        raise NotNormalForm("factor index %d out of range" % n)
    return factors[n - 1]


def check_normal_form(factors: Sequence[FactorArray], g) -> Tuple:
    """Validate alternating nontrivial syllables; returns g as a tuple."""
    g = tuple(g)
    prev = 0
    for syl in g:
        n, x = syl
        f = _factor(factors, n)
        if n == prev:
            raise NotNormalForm("adjacent syllables share factor %d" % n)
        if f.is_identity(x):
            raise NotNormalForm("identity syllable in factor %d" % n)
        prev = n
    return g


def patched_mass_vector(factors: Sequence[FactorArray], n: int, x
                        ) -> SparseVector:
    """Factor array with the norm floor: mass at least n^2 off identity.

    An element whose squared norm falls below n^2 is replaced by the flat
    two-point vector with mass n^2 at x and at the identity (squared norm
    2 n^2).  The replacement is symmetric, so it preserves the factor's
    symmetry, and it is what makes the combined array proper.
    """
    f = _factor(factors, n)
    if f.is_identity(x):
        return f.mass_vector(x)
    v = f.mass_vector(x)
    if not v.is_nonnegative():
        raise InvariantViolation("factor mass vector has a negative entry")
    if v.l1() < n * n:
        nsq = Fraction(n * n)
        return SparseVector("vertices", {f.identity: nsq, x: nsq})
    return v


def combine_free_product(factors: Sequence[FactorArray], g) -> SparseVector:
    """Array of the free product at a normal form g = (n_i, h_i) syllables.

    Each syllable contributes its patched factor vector, translated by the
    preceding prefix: the support element s lands at the normal form
    prefix + (n_i, s), or at the bare prefix when s is the identity.  The
    supports are pairwise disjoint, which the accumulation asserts, so the
    squared norm is exactly the sum of the patched factor norms.
    """
    g = check_normal_form(factors, g)
    items: Dict[object, Fraction] = {}
    for i, (n, h) in enumerate(g):
        prefix = g[:i]
        f = factors[n - 1]
        for s, m in patched_mass_vector(factors, n, h).items():
            syl = prefix if f.is_identity(s) else prefix + ((n, s),)
            key = (syl, n)
            if key in items:
                raise InvariantViolation(
                    "free-product supports collide at %r" % (key,))
            items[key] = m
    return SparseVector("product", items)


def product_inverse(factors: Sequence[FactorArray], g) -> Tuple:
    g = check_normal_form(factors, g)
    return tuple((n, factors[n - 1].inverse(x)) for n, x in reversed(g))


def product_mul(factors: Sequence[FactorArray], a, b) -> Tuple:
    """Multiply two normal forms, merging syllables at the junction."""
    out = list(check_normal_form(factors, a))
    for n, x in check_normal_form(factors, b):
        if out and out[-1][0] == n:
            f = factors[n - 1]
            merged = f.mul(out[-1][1], x)
            if f.is_identity(merged):
                out.pop()
            else:
                out[-1] = (n, merged)
        else:
            out.append((n, x))
    return tuple(out)


def translate_product(factors: Sequence[FactorArray], k,
                      v: SparseVector) -> SparseVector:
    """Left-translate a combined array by the normal form k."""
    return v.map_keys(
        lambda key: (product_mul(factors, k, key[0]), key[1]))


def check_combined_symmetry(factors: Sequence[FactorArray], g) -> bool:
    """Does the combined array at g^-1 equal the g^-1 translate at g?"""
    rg = combine_free_product(factors, g)
    gi = product_inverse(factors, g)
    rgi = combine_free_product(factors, gi)
    return translate_product(factors, gi, rg) == rgi


def properness_census(factors: Sequence[FactorArray], N: int
                      ) -> Tuple[int, int]:
    """Count normal forms of combined norm <= N against the crude bound.

    Returns (count, bound) where count = #{g : ||R(g)||^2 <= N^2} and
    bound = (sum over n <= N of the factor-level counts) ** (N^2); the
    census raises InvariantViolation if count exceeds bound.  Factors must
    support iter_elements (nonidentity elements in nondecreasing mass
    order); each patched syllable costs at least 1, so normal forms run
    out after N^2 syllables.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    budget = Fraction(N * N)
    admissible: Dict[int, List[Tuple[object, Fraction]]] = {}
    factor_counts = []
    for n in range(1, len(factors) + 1):
        f = factors[n - 1]
        adm: List[Tuple[object, Fraction]] = []
        if n <= N:
            it = getattr(f, "iter_elements", None)
            if it is None:
                raise TypeError("factor %d does not support enumeration" % n)
            nsq = Fraction(n * n)
            for x in it():
                m = f.mass_vector(x).l1()
                patched = 2 * nsq if m < nsq else m
                if m > budget and m >= nsq:
                    break
                if patched <= budget:
                    adm.append((x, patched))
        admissible[n] = adm
        if n <= N:
            factor_counts.append(1 + len(adm))
    bound = sum(factor_counts) ** (N * N) if factor_counts else 1

    def walk(prev: int, left: Fraction) -> int:
        total = 1
        for n, adm in admissible.items():
            if n == prev:
                continue
            for _, cost in adm:
                if cost <= left:
                    total += walk(n, left - cost)
        return total

    count = walk(0, budget)
    if count > bound:
        raise InvariantViolation("census %d exceeds the bound %d"
                                 % (count, bound))
    return count, bound


# ---------------------------------------------------------------------------
# Letter graph and the finite-alphabet rewriting


class LetterGraph:
    """Co-occurrence graph of the alphabet: an edge joins two letters that
    appear in a common relator.  Connected components split the presentation
    into independent free factors."""

    __slots__ = ("presentation", "adjacency", "components",
                 "sub_presentations", "valency", "max_valency")

    def __init__(self, p: Presentation):
        names = p.gen_names
        k = len(names)
        adj: Dict[int, set] = {i: set() for i in range(1, k + 1)}
        supports = []
        for r in p.orbits:
            sup = sorted({abs(x) for x in r})
            supports.append(sup)
            for a in sup:
                for b in sup:
                    if a != b:
                        adj[a].add(b)
        comp_of: Dict[int, int] = {}
        components: List[Tuple[int, ...]] = []
        for i in range(1, k + 1):
            if i in comp_of:
                continue
            seen = {i}
            queue = [i]
            while queue:
                u = queue.pop()
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            idx = len(components)
            components.append(tuple(sorted(seen)))
            for u in seen:
                comp_of[u] = idx
        subs = []
        used = 0
        for comp in components:
            back = {old: new + 1 for new, old in enumerate(comp)}
            rels = []
            for r, sup in zip(p.orbits, supports):
                if comp_of[sup[0]] == comp_of[comp[0]] and sup[0] in back:
                    if any(s not in back for s in sup):
                        raise InvariantViolation(
                            "relator support crosses letter-graph components")
                    rels.append(tuple(
                        back[x] if x > 0 else -back[-x] for x in r))
            used += len(rels)
            subs.append(Presentation(tuple(names[i - 1] for i in comp),
                                     rels, p.lam,
                                     symmetrized=p.symmetrized))
        if used != len(p.orbits):
            raise InvariantViolation("relators lost while splitting "
                                     "letter-graph components")
        self.presentation = p
        self.adjacency = {names[i - 1]: frozenset(names[j - 1] for j in adj[i])
                          for i in range(1, k + 1)}
        self.components = tuple(tuple(names[i - 1] for i in comp)
                                for comp in components)
        self.sub_presentations = tuple(subs)
        self.valency = {names[i - 1]: len(adj[i]) for i in range(1, k + 1)}
        self.max_valency = max(self.valency.values(), default=0)

    def __repr__(self):
        return ("LetterGraph(%d letters, %d components, max valency %d)"
                % (len(self.valency), len(self.components),
                   self.max_valency))


def letter_graph(p: Presentation) -> LetterGraph:
    return LetterGraph(p)


def exponent_inequality_holds(lam, M: int) -> bool:
    """Does (1 - 2/M)^-1 ((1 + 1/M) lam + 2/M) < 1/33 hold?"""
    lam = Fraction(lam)
    if M < 3:
        return False
    M = Fraction(M)
    return (1 / (1 - 2 / M)) * ((1 + 1 / M) * lam + 2 / M) < Fraction(1, 33)


def minimal_exponent(lam) -> int:
    """Smallest M >= 3 satisfying the rewriting inequality."""
    lam = Fraction(lam)
    if not lam < Fraction(1, 33):
        raise NotSmallCancellation(
            "the rewriting inequality needs lambda < 1/33")
    M = 3
    while not exponent_inequality_holds(lam, M):
        M += 1
    return M


DEFAULT_MAX_PSI_LETTERS = 2_000_000


class EmbeddingSpec:
    """Outcome of rewriting a presentation over a finite alphabet.

    The target alphabet is a1..a(N+1), b, c and a primed copy.  Every
    source letter x receives a marker word psi(x) = (w b)^M c (w b)^-M
    with w a positive a-word of length (distance of x) + M, and each
    source relator is rewritten by x -> psi'(x) psi(x)^-1, cyclically
    reduced, then symmetrized.  Marker words are built on demand: only
    their lengths are stored, since at production parameters a single
    rewritten relator runs to millions of letters.
    """

    __slots__ = ("source", "N", "M", "relaxed", "exponent_ok", "base",
                 "graph", "distances", "h_names", "psi_lengths",
                 "placement", "certificates", "emitted", "skipped", "cap",
                 "presentation", "output_report", "output_certified")

    def __init__(self, **kw):
        for name in self.__slots__:
            setattr(self, name, kw.pop(name))
        if kw:
            raise TypeError("unexpected fields %s" % sorted(kw))

    @property
    def vacuous(self) -> bool:
        return not self.emitted

    def psi_word(self, letter: str, primed: bool = False,
                 max_letters: int = DEFAULT_MAX_PSI_LETTERS) -> Word:
        """Materialize psi(letter) (or psi'(letter)) as a word."""
        n, j = self.placement[letter]
        M = self.M
        length = self.psi_lengths[letter]
        if length > max_letters:
            raise ResourceLimit("psi word of %d letters exceeds the limit"
                                % length)
        digits = []
        v = j
        for _ in range(n + M):
            digits.append(v % (self.N + 1))
            v //= self.N + 1
        if v:
            raise InvariantViolation("sphere index out of range")
        w = tuple(d + 1 for d in reversed(digits))
        b = self.N + 2
        c = self.N + 3
        wb = w + (b,)
        word = wb * M + (c,) + inverse(wb * M)
        if len(word) != length:
            raise InvariantViolation("psi length bookkeeping is wrong")
        if primed:
            off = self.N + 3
            word = tuple(x + off if x > 0 else x - off for x in word)
        return word

    def basis_word(self, letter: str,
                   max_letters: int = DEFAULT_MAX_PSI_LETTERS) -> Word:
        """The relator psi'(letter) psi(letter)^-1 joining the two copies."""
        w = self.psi_word(letter, primed=True, max_letters=max_letters)
        u = self.psi_word(letter, primed=False, max_letters=max_letters)
        out = w + inverse(u)
        if reduce(out) != out:
            raise InvariantViolation("basis word failed to stay reduced")
        return out

    def basis_presentation(self,
                           max_letters: int = DEFAULT_MAX_PSI_LETTERS
                           ) -> Presentation:
        """All basis words as one symmetrized presentation at lambda = 1/M."""
        rels = [self.basis_word(x, max_letters=max_letters)
                for x in self.source.gen_names]
        return Presentation(self.h_names, rels, Fraction(1, self.M),
                            symmetrized=False).symmetrize()

    def basis_piece_check(self,
                          max_letters: int = DEFAULT_MAX_PSI_LETTERS,
                          max_cells: int = DEFAULT_MAX_CONTOUR_CELLS
                          ) -> dict:
        """Piece analysis of the joining relators, split by source letter.

        A joining relator t = psi'(x) psi(x)^-1 overlaps its own inverse
        along the junction segment (wb)^-M (w'b')^M, so the same-letter
        piece is always exactly 2M(|w|+1), just under half the relator.
        A 1/M piece test over the whole symmetrized family therefore
        fails for every M >= 3, and that failure carries no information
        about the rewriting: a long match against the same letter's own
        marker identifies the letter consistently.  What the rewriting
        needs is that markers of *distinct* letters only meet along short
        periodic runs.  The verdict is split accordingly: `cross_ok`
        bounds cross-letter pieces by (1/M) min(|t_u|, |t_v|) per pair,
        and `self_exact` confirms every same-letter maximum equals the
        predicted junction length.  `full_report` keeps the unsplit
        piece table for the record.
        """
        letters = list(self.source.gen_names)
        fams: Dict[str, list] = {}
        info: Dict[str, dict] = {}
        for x in letters:
            t = self.basis_word(x, max_letters=max_letters)
            if 2 * len(t) * len(t) > max_cells:
                raise ResourceLimit(
                    "rotation table for %d-letter joining relators "
                    "exceeds the cell budget" % len(t))
            fam = list(cyclic_shifts(t)) + list(cyclic_shifts(inverse(t)))
            fams[x] = fam
            best = 0
            for i, u in enumerate(fam):
                for v in fam[i + 1:]:
                    if u == v:
                        continue
                    k = common_prefix_length(u, v)
                    if k > best:
                        best = k
            n, _ = self.placement[x]
            pred = 2 * self.M * (n + self.M + 1)
            info[x] = {"length": len(t), "self_piece": best,
                       "self_predicted": pred}
        cross: Dict[Tuple[str, str], int] = {}
        cross_ok = True
        max_cross = 0
        for i, x in enumerate(letters):
            for y in letters[i + 1:]:
                best = 0
                for u in fams[x]:
                    for v in fams[y]:
                        k = common_prefix_length(u, v)
                        if k > best:
                            best = k
                cross[(x, y)] = best
                max_cross = max(max_cross, best)
                least = min(info[x]["length"], info[y]["length"])
                if best * self.M >= least:
                    cross_ok = False
        return {
            "letters": info,
            "self_exact": all(d["self_piece"] == d["self_predicted"]
                              for d in info.values()),
            "cross_pieces": cross,
            "max_cross_piece": max_cross,
            "cross_ok": cross_ok,
            "full_report": piece_table(
                self.basis_presentation(max_letters=max_letters)),
        }

    def __repr__(self):
        return ("EmbeddingSpec(N=%d, M=%d, emitted=%d/%d, certified=%s%s)"
                % (self.N, self.M, len(self.emitted),
                   len(self.source.orbits), self.output_certified,
                   ", relaxed" if self.relaxed else ""))


def embed_into_finitely_generated(p: Presentation, N: int, *,
                                  M: Optional[int] = None,
                                  cap: Optional[int] = None,
                                  base: Optional[str] = None,
                                  relaxed: bool = False) -> EmbeddingSpec:
    """Rewrite p over the fixed alphabet a1..a(N+1), b, c plus a primed copy.

    N must dominate the letter-graph valency; the letter graph must be
    connected (split a disconnected presentation first).  M defaults to
    the smallest exponent satisfying the rewriting inequality, which needs
    the source lambda below 1/33; an explicit M that violates the
    inequality is only admitted under relaxed=True and is recorded in the
    result.  Relators whose pre-reduction image exceeds `cap` letters are
    skipped, and the small-cancellation certification runs on whatever was
    emitted: a capped run certifies only the emitted set.
    """
    graph = LetterGraph(p)
    if graph.max_valency > N:
        raise ValencyExceeded("letter valency %d exceeds N=%d"
                              % (graph.max_valency, N))
    if len(graph.components) > 1:
        raise InvariantViolation(
            "letter graph is disconnected; rewrite each component "
            "separately")
    sym = p if p.symmetrized else p.symmetrize()
    if sym.orbits:
        source_report = piece_table(sym)
        if source_report.lambda_verdict is not True:
            raise NotSmallCancellation(
                "source presentation fails its own small-cancellation "
                "condition")
    if M is None:
        M = minimal_exponent(p.lam)
    if M < 3:
        raise ValueError("need M >= 3")
    exponent_ok = exponent_inequality_holds(p.lam, M)
    if not exponent_ok and not relaxed:
        raise InvariantViolation(
            "exponent M=%d fails the rewriting inequality at lambda=%s; "
            "pass relaxed=True to explore anyway" % (M, p.lam))

    names = p.gen_names
    base_name = base if base is not None else names[0]
    if base_name not in names:
        raise ValueError("base letter %r is not in the alphabet" % base_name)
    dist = {base_name: 0}
    frontier = [base_name]
    while frontier:
        nxt = []
        for u in frontier:
            for w in sorted(graph.adjacency[u]):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    if len(dist) != len(names):
        raise InvariantViolation("letter-graph BFS missed a letter")

    spheres: Dict[int, List[str]] = {}
    order = {nm: i for i, nm in enumerate(names)}
    for nm in names:
        spheres.setdefault(dist[nm], []).append(nm)
    placement = {}
    psi_lengths = {}
    for n, members in spheres.items():
        members.sort(key=order.get)
        if len(members) > (N + 1) ** (n + M):
            raise InvariantViolation("sphere %d too large for injectivity"
                                     % n)
        for j, nm in enumerate(members):
            placement[nm] = (n, j)
            psi_lengths[nm] = 2 * (n + M + 1) * M + 1

    h_names = tuple(["a%d" % i for i in range(1, N + 2)] + ["b", "c"]
                    + ["a%d'" % i for i in range(1, N + 2)] + ["b'", "c'"])

    spec_kw = dict(source=p, N=N, M=M, relaxed=relaxed,
                   exponent_ok=exponent_ok, base=base_name, graph=graph,
                   distances=dist, h_names=h_names, psi_lengths=psi_lengths,
                   placement=placement, cap=cap)
    probe = EmbeddingSpec(certificates=(), emitted=(), skipped=(),
                          presentation=None, output_report=None,
                          output_certified=False, **spec_kw)

    certificates = []
    emitted = []
    skipped = []
    rels = []
    for idx, r in enumerate(p.orbits):
        sup = sorted({abs(x) for x in r})
        sup_names = [names[i - 1] for i in sup]
        ds = {dist[nm] for nm in sup_names}
        if max(ds) - min(ds) > 1:
            raise InvariantViolation(
                "relator letters spread over more than two spheres")
        m = min(ds) + M
        expected = {2 * (m + 1) * M + 1, 2 * (m + 2) * M + 1}
        observed = {psi_lengths[nm] for nm in sup_names}
        if not observed <= expected:
            raise InvariantViolation("marker lengths break the two-sphere "
                                     "certificate")
        certificates.append({"orbit": idx, "m": m,
                             "lengths": tuple(sorted(observed)),
                             "relator_length": len(r)})
        estimate = sum(2 * psi_lengths[names[abs(x) - 1]] for x in r)
        if cap is not None and estimate > cap:
            skipped.append((idx, estimate))
            continue
        out: List[int] = []
        for x in r:
            nm = names[abs(x) - 1]
            pw = probe.psi_word(nm, primed=False, max_letters=estimate)
            ppw = probe.psi_word(nm, primed=True, max_letters=estimate)
            if x > 0:
                out.extend(ppw)
                out.extend(inverse(pw))
            else:
                out.extend(pw)
                out.extend(inverse(ppw))
        w = cyclic_reduce(reduce(tuple(out)))
        if not w:
            raise InvariantViolation("relator image collapsed to nothing")
        emitted.append(idx)
        rels.append(w)

    hp = Presentation(h_names, rels, Fraction(1, 33),
                      symmetrized=False).symmetrize()
    output_report: Optional[PieceReport] = None
    output_certified = True
    if rels:
        output_report = piece_table(hp)
        output_certified = output_report.lambda_verdict is True
    if not output_certified and not relaxed:
        raise InvariantViolation(
            "rewritten relators fail the 1/33 condition although the "
            "exponent inequality holds")
    return EmbeddingSpec(certificates=tuple(certificates),
                         emitted=tuple(emitted), skipped=tuple(skipped),
                         presentation=hp, output_report=output_report,
                         output_certified=output_certified, **spec_kw)
