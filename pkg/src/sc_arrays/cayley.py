"""Finite regions of the Cayley graph: distances, geodesics, contours.

Vertex handles are canonical reduced words. The ball backend materializes
every vertex out to the requested radius and folds the free tree along the
relators; the tree backend stays lazy and is valid exactly when the radius
is small enough that the ball is provably still a tree, in which case every
in-region pair has a unique geodesic given by free reduction.
"""

import os
from collections import deque
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import (InvariantViolation, NotSymmetrized, OutOfRegion,
                     ResourceLimit, Skipped)
from .presentation import (Presentation, SymmetrizedSet, is_rotation,
                           piece_table, _rotation_classes)
from .wordproblem import (_certified, _index as _dehn_index,
                          relevant_relator_bound)
from .words import Word, inverse, reduce, shift, word_to_bytes

DEFAULT_MAX_VERTICES = 300_000
DEFAULT_MAX_GEODESICS = 100_000
DEFAULT_MAX_CONTOUR_CELLS = 4_000_000


@lru_cache(maxsize=32)
def _piece_bound(p: Presentation) -> int:
    return piece_table(p).max_piece_length or 0


def shortlex_key(w: Word) -> Tuple[int, bytes]:
    return (len(w), word_to_bytes(w))


def _letter_rank(x: int) -> int:
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


def _letters(n_gens: int) -> List[int]:
    out: List[int] = []
    for k in range(1, n_gens + 1):
        out.append(k)
        out.append(-k)
    return out


def _vertex_cap(explicit: Optional[int]) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("SC_ARRAYS_MAX_VERTICES")
    return int(env) if env else DEFAULT_MAX_VERTICES


def _tree_size(n_gens: int, radius: int) -> int:
    if radius < 0:
        return 0
    if n_gens == 1:
        return 1 + 2 * radius
    b = 2 * n_gens - 1
    return 1 + 2 * n_gens * (b ** radius - 1) // (b - 1)


def edge_key(tail: Word, letter: int, head: Word) -> Tuple[Word, int]:
    """Undirected edge as (source of the positive generator, generator)."""
    if letter > 0:
        return (tail, letter)
    return (head, -letter)


class GeodesicPath:
    """A geodesic as (start word, edge labels); vertices materialize lazily.

    Paper-scale paths are thousands of edges long with vertex words growing
    linearly, so nothing quadratic is stored unless a caller asks for it.
    When built from a folded ball the canonical vertex words are supplied
    up front; the lazy form free-reduces, which is canonical on trees.
    """

    __slots__ = ("start", "label", "_vertices")

    def __init__(self, start: Word, label: Word,
                 vertices: Optional[Sequence[Word]] = None):
        self.start = start
        self.label = label
        self._vertices = tuple(vertices) if vertices is not None else None

    def __len__(self) -> int:
        return len(self.label)

    @property
    def p_minus(self) -> Word:
        return self.start

    @property
    def p_plus(self) -> Word:
        return self.vertex(len(self.label))

    def vertex(self, i: int) -> Word:
        if self._vertices is not None:
            return self._vertices[i]
        return reduce(self.start + self.label[:i])

    def iter_vertices(self) -> Iterator[Word]:
        if self._vertices is not None:
            yield from self._vertices
            return
        cur = list(self.start)
        yield self.start
        for x in self.label:
            if cur and cur[-1] == -x:
                cur.pop()
            else:
                cur.append(x)
            yield tuple(cur)

    def vertices(self) -> Tuple[Word, ...]:
        return tuple(self.iter_vertices())

    def iter_edge_keys(self) -> Iterator[Tuple[Word, int]]:
        prev: Optional[Word] = None
        for i, v in enumerate(self.iter_vertices()):
            if prev is not None:
                yield edge_key(prev, self.label[i - 1], v)
            prev = v

    def edge_keys(self) -> Set[Tuple[Word, int]]:
        return set(self.iter_edge_keys())

    def reversed(self) -> "GeodesicPath":
        verts = self._vertices[::-1] if self._vertices is not None else None
        return GeodesicPath(self.p_plus, inverse(self.label), verts)

    def key(self):
        return (self.start, self.label)

    def __eq__(self, other):
        return isinstance(other, GeodesicPath) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "GeodesicPath(|p|=%d, start=%r)" % (len(self.label), self.start)


class Contour:
    """One relator loop; identity is the canonical key.

    Ball-traced contours carry their vertex cycle and undirected edge set.
    Anchored contours (found along a path in a tree region) keep only the
    rotation class and one anchored vertex: the full loop of a paper-scale
    relator is never materialized.
    """

    __slots__ = ("relator", "length", "key", "anchor", "anchor_phase",
                 "presentation", "class_index", "_vertices", "_edge_keys")

    def __init__(self, relator: Word, key, anchor: Optional[Word] = None,
                 anchor_phase: Optional[int] = None,
                 vertices: Optional[Tuple[Word, ...]] = None,
                 edge_keys=None, presentation: Optional[Presentation] = None,
                 class_index: Optional[int] = None):
        self.relator = relator
        self.length = len(relator)
        self.key = key
        self.anchor = anchor
        self.anchor_phase = anchor_phase
        self.presentation = presentation
        self.class_index = class_index
        self._vertices = vertices
        self._edge_keys = edge_keys

    @property
    def materialized(self) -> bool:
        return self._vertices is not None

    def vertices(self) -> Tuple[Word, ...]:
        if self._vertices is None:
            raise ResourceLimit("contour loop is not materialized")
        return self._vertices

    def edge_keys(self):
        if self._edge_keys is None:
            verts = self.vertices()
            n = len(verts)
            self._edge_keys = frozenset(
                edge_key(verts[i], self.relator[i], verts[(i + 1) % n])
                for i in range(n))
        return self._edge_keys

    def __eq__(self, other):
        return isinstance(other, Contour) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "Contour(|r|=%d, anchor=%r)" % (self.length, self.anchor)


class ArcIntersection:
    """The single arc a contour shares with a geodesic path.

    start_index/end_index delimit the shared edges as positions on the
    path (end exclusive); a plain touching vertex has start==end. The
    endpoints follow the path orientation, end_minus nearer the path start.
    relator_phase is the loop position of end_minus in the spelling of
    contour.relator, and relator_direction is +1 when the path reads the
    relator forwards, -1 when it reads its inverse.
    """

    __slots__ = ("contour", "path", "start_index", "end_index",
                 "overlap_length", "end_minus", "end_plus",
                 "relator_phase", "relator_direction")

    def __init__(self, contour: Contour, path: GeodesicPath, start_index: int,
                 end_index: int, end_minus: Word, end_plus: Word,
                 relator_phase: Optional[int],
                 relator_direction: Optional[int]):
        self.contour = contour
        self.path = path
        self.start_index = start_index
        self.end_index = end_index
        self.overlap_length = end_index - start_index
        self.end_minus = end_minus
        self.end_plus = end_plus
        self.relator_phase = relator_phase
        self.relator_direction = relator_direction

    def edge_keys(self):
        out = set()
        prev = self.path.vertex(self.start_index)
        for i in range(self.start_index, self.end_index):
            nxt = self.path.vertex(i + 1)
            out.add(edge_key(prev, self.path.label[i], nxt))
            prev = nxt
        return frozenset(out)

    def __repr__(self):
        return ("ArcIntersection(|r cap p|=%d at [%d, %d))"
                % (self.overlap_length, self.start_index, self.end_index))


@lru_cache(maxsize=32)
def _mate_table(p: Presentation) -> Tuple[Tuple[int, int], ...]:
    """For each rotation class, its inverse class and rotation offset.

    Entry i is (j, s0) where reps[j] == shift(inverse(reps[i]), s0): the
    loop read backwards spells class j. Self-inverse classes map to i.
    """
    reps = _rotation_classes(p)
    out: List[Tuple[int, int]] = []
    for i, x in enumerate(reps):
        ix = inverse(x)
        mate = None
        for j, y in enumerate(reps):
            if is_rotation(y, ix):
                mate = j
                break
        if mate is None:
            raise InvariantViolation("rotation classes are not inverse-closed")
        y = reps[mate]
        s0 = next(s for s in range(len(x)) if shift(ix, s) == y)
        out.append((mate, s0))
    return tuple(out)


def anchored_contour_key(p: Presentation, class_idx: int, phase: int,
                         vertex: Word):
    """Canonical identity of a loop from one anchored vertex.

    The same loop is seen once per reading direction; normalizing to the
    smaller rotation class (smaller phase on self-inverse classes) makes
    the two readings collide.
    """
    mate, s0 = _mate_table(p)[class_idx]
    n = len(_rotation_classes(p)[class_idx])
    alt = ((n - s0 - phase) % n)
    if mate < class_idx or (mate == class_idx and alt < phase):
        return ("anchored", mate, alt, vertex)
    return ("anchored", class_idx, phase, vertex)


class Region:
    """A radius-R neighborhood of the identity with exact vertex identity."""

    __slots__ = ("presentation", "radius", "backend", "base",
                 "max_geodesics", "unsafe_no_cprime", "certificate_bound",
                 "tree_certified", "fold_count",
                 "_index", "_canon", "_dist", "_adj", "_letter_list",
                 "_bfs_cache", "_n")

    def __init__(self, presentation: Presentation, radius: int, backend: str,
                 max_geodesics: Optional[int], unsafe_no_cprime: bool,
                 certificate_bound: Optional[Fraction],
                 tree_certified: bool):
        self.presentation = presentation
        self.radius = radius
        self.backend = backend
        self.base: Word = ()
        self.max_geodesics = (max_geodesics if max_geodesics is not None
                              else DEFAULT_MAX_GEODESICS)
        self.unsafe_no_cprime = unsafe_no_cprime
        self.certificate_bound = certificate_bound
        self.tree_certified = tree_certified
        self.fold_count = 0
        self._index: Optional[Dict[Word, int]] = None
        self._canon: Optional[List[Word]] = None
        self._dist: Optional[List[int]] = None
        self._adj: Optional[List[Dict[int, int]]] = None
        self._letter_list = _letters(len(presentation.gen_names))
        self._bfs_cache: Dict[int, List[int]] = {}
        self._n = 0

    # -- handles ---------------------------------------------------------

    def resolve(self, w: Sequence[int]) -> Word:
        """Canonical handle of the vertex w, or OutOfRegion."""
        rw = reduce(tuple(w))
        if self.backend == "tree":
            if len(rw) > self.radius:
                raise OutOfRegion("|%d-letter word| > radius %d"
                                  % (len(rw), self.radius))
            return rw
        i = self._index.get(rw)
        if i is None:
            raise OutOfRegion("word does not resolve inside radius %d"
                              % self.radius)
        return self._canon[i]

    def walk(self, w: Sequence[int], start: Sequence[int] = ()) -> Word:
        """Follow w edge by edge from start through the folded graph.

        Unlike resolve, the free length of w does not matter, only that
        every intermediate vertex stays inside the region; this is the
        identity test of record for unsafe (non-C') fixtures.
        """
        if self.backend == "tree":
            return self.resolve(tuple(start) + tuple(w))
        i = self._id(self.resolve(start))
        for x in w:
            j = self._step(i, x)
            if j is None:
                raise OutOfRegion(
                    "walk leaves the region at %r from %r (radius %d)"
                    % (x, self._canon[i], self.radius))
            i = j
        return self._canon[i]

    def __contains__(self, w) -> bool:
        try:
            self.resolve(w)
        except OutOfRegion:
            return False
        return True

    def _id(self, w: Word) -> int:
        i = self._index.get(w)
        if i is None:
            raise OutOfRegion("word does not resolve inside radius %d"
                              % self.radius)
        return i

    # -- enumeration (ball only) -----------------------------------------

    @property
    def vertices(self) -> Tuple[Word, ...]:
        if self.backend == "tree":
            raise ResourceLimit("tree regions do not enumerate vertices")
        return tuple(self._canon)

    def vertex_distance(self, g) -> int:
        g = self.resolve(g)
        if self.backend == "tree":
            return len(g)
        return self._dist[self._id(g)]

    def pos_edges(self) -> Iterator[Tuple[Word, int, Word]]:
        if self.backend == "tree":
            raise ResourceLimit("tree regions do not enumerate edges")
        for i, nbrs in enumerate(self._adj):
            for x, j in sorted(nbrs.items(), key=lambda kv: _letter_rank(kv[0])):
                if x > 0:
                    yield (self._canon[i], x, self._canon[j])

    def iter_tree_words(self) -> Iterator[Tuple[Word, Word]]:
        """(reduced word, canonical class word) for every enumerated word."""
        if self.backend == "tree":
            raise ResourceLimit("tree regions do not enumerate words")
        for w, i in self._index.items():
            yield w, self._canon[i]

    def stats(self) -> Dict[str, object]:
        out = {
            "backend": self.backend,
            "radius": self.radius,
            "tree_certified": self.tree_certified,
            "folds": self.fold_count,
        }
        if self.backend == "ball":
            out["vertices"] = len(self._canon)
            out["pos_edges"] = sum(1 for _ in self.pos_edges())
        return out

    # -- distances and geodesics ------------------------------------------

    def _bfs(self, src: int) -> List[int]:
        cached = self._bfs_cache.get(src)
        if cached is not None:
            return cached
        if len(self._bfs_cache) > 128:
            self._bfs_cache.clear()
        dist = [-1] * self._n
        dist[src] = 0
        dq = deque([src])
        adj = self._adj
        letters = self._letter_list
        while dq:
            u = dq.popleft()
            du = dist[u]
            nbrs = adj[u]
            for x in letters:
                v = nbrs.get(x)
                if v is not None and dist[v] < 0:
                    dist[v] = du + 1
                    dq.append(v)
        self._bfs_cache[src] = dist
        return dist

    def distance(self, g, h) -> int:
        return self._resolve_pair(g, h)[0]

    def distance_and_geodesics(self, g, h) -> Tuple[int, Tuple[GeodesicPath, ...]]:
        """Exact distance and the complete geodesic set between g and h.

        Ball regions enumerate the distance-decreasing edge DAG whenever the
        margin (d(1,g)+d(1,h)+d(g,h))/2 <= radius certifies that no geodesic
        leaves the ball; otherwise the query is recentered at g, which
        succeeds when g^-1 h resolves. Tree regions return the unique free
        path, canonical by the length certificate.
        """
        d, mode, data = self._resolve_pair(g, h)
        if mode == "tree":
            gw, w = data
            return d, (GeodesicPath(gw, w),)
        if mode == "direct":
            gi, hi = data
            return d, self._enumerate(gi, hi)
        gw, wi = data
        paths = []
        for q in self._enumerate(self._id(self.base), wi):
            verts: List[Word] = []
            ok = True
            for x in q.vertices():
                t = reduce(gw + x)
                j = self._index.get(t)
                verts.append(self._canon[j] if j is not None else t)
            paths.append(GeodesicPath(verts[0], q.label, verts))
        return d, tuple(paths)

    def _resolve_pair(self, g, h):
        g = self.resolve(g)
        h = self.resolve(h)
        if self.backend == "tree":
            w = reduce(inverse(g) + h)
            return len(w), "tree", (g, w)
        gi, hi = self._id(g), self._id(h)
        ds = self._bfs(gi)
        dh = ds[hi]
        if dh >= 0 and self._dist[gi] + self._dist[hi] + dh <= 2 * self.radius:
            return dh, "direct", (gi, hi)
        w = reduce(inverse(g) + h)
        wi = self._index.get(w)
        if wi is None:
            raise OutOfRegion("geodesics may leave the region: recentering "
                              "needs |g^-1 h| <= radius")
        return self._dist[wi], "recentered", (g, wi)

    def _enumerate(self, si: int, ti: int) -> Tuple[GeodesicPath, ...]:
        ds = self._bfs(si)
        dt = self._bfs(ti)
        d = ds[ti]
        adj = self._adj
        letters = self._letter_list
        cap = self.max_geodesics
        out: List[Tuple[bytes, Word, List[int]]] = []
        label: List[int] = []
        trail: List[int] = [si]

        def go(u: int) -> None:
            if ds[u] == d:
                if u == ti:
                    if len(out) >= cap:
                        raise ResourceLimit("more than %d geodesics" % cap)
                    w = tuple(label)
                    out.append((word_to_bytes(w), w, list(trail)))
                return
            du = ds[u]
            nbrs = adj[u]
            for x in letters:
                v = nbrs.get(x)
                if v is not None and ds[v] == du + 1 and ds[v] + dt[v] == d:
                    label.append(x)
                    trail.append(v)
                    go(v)
                    label.pop()
                    trail.pop()

        go(si)
        out.sort(key=lambda t: t[0])
        canon = self._canon
        return tuple(
            GeodesicPath(canon[ids[0]], w, [canon[i] for i in ids])
            for _, w, ids in out)

    def _step(self, i: int, x: int) -> Optional[int]:
        return self._adj[i].get(x)


def build_region(p: Presentation, radius: int, *, backend: str = "auto",
                 max_vertices: Optional[int] = None,
                 max_geodesics: Optional[int] = None,
                 unsafe_no_cprime: bool = False) -> Region:
    """Materialize (or certify) the radius-R ball around the identity.

    backend "ball" folds the free tree along all relators of length at most
    relevant_relator_bound(radius) until no trace forces another
    identification. backend "tree" requires 4*radius <= (1-3*lambda)*m and
    answers every query through the free group. "auto" picks the ball when
    it fits under the vertex cap and the certified tree otherwise.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if p.orbits and not p.symmetrized:
        raise NotSymmetrized("build_region needs a symmetrized presentation")
    cert: Optional[Fraction] = None
    certified = not p.orbits
    if p.orbits and not unsafe_no_cprime:
        _certified(p)
        certified = True
        cert = (1 - 3 * p.lam) * p.min_relator_length()
    tree_ok = certified and (cert is None or 4 * radius <= cert)
    cap = _vertex_cap(max_vertices)
    if backend == "auto":
        backend = "ball" if _tree_size(len(p.gen_names), radius) <= cap else "tree"
        if backend == "tree" and not tree_ok:
            raise ResourceLimit(
                "ball would exceed %d vertices and the tree certificate "
                "4R <= (1-3*lambda)*m fails at radius %d" % (cap, radius))
    if backend == "tree":
        if not tree_ok:
            raise ValueError("tree backend needs 4*radius <= (1-3*lambda)*m "
                             "and a certified presentation")
        return Region(p, radius, "tree", max_geodesics, False, cert, True)
    if backend != "ball":
        raise ValueError("backend must be auto, ball, or tree")

    reg = Region(p, radius, "ball", max_geodesics, unsafe_no_cprime, cert,
                 tree_ok)
    letters = _letters(len(p.gen_names))

    words: List[Word] = [()]
    index: Dict[Word, int] = {(): 0}
    adjs: List[Optional[Dict[int, int]]] = [{}]
    frontier = [0]
    for _ in range(radius):
        nxt: List[int] = []
        for i in frontier:
            w = words[i]
            for x in letters:
                if w and w[-1] == -x:
                    continue
                u = w + (x,)
                j = len(words)
                if j > cap:
                    raise ResourceLimit("region exceeds %d vertices" % cap)
                words.append(u)
                index[u] = j
                adjs.append({})
                adjs[i][x] = j
                adjs[j][-x] = i
                nxt.append(j)
        frontier = nxt
    n = len(words)

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pending: deque = deque()
    folds = 0

    def union(a: int, b: int) -> None:
        nonlocal folds
        pending.append((a, b))
        while pending:
            x, y = pending.popleft()
            rx, ry = find(x), find(y)
            if rx == ry:
                continue
            if len(adjs[rx]) < len(adjs[ry]):
                rx, ry = ry, rx
            parent[ry] = rx
            folds += 1
            ax, ay = adjs[rx], adjs[ry]
            for l, t in ay.items():
                cur = ax.get(l)
                if cur is None:
                    ax[l] = t
                elif find(cur) != find(t):
                    pending.append((cur, t))
            adjs[ry] = None

    if p.orbits:
        bound = relevant_relator_bound(radius)
        # shift length equals orbit length: filter before expanding
        short = [w for w in p.orbits if len(w) <= bound]
        relevant = list(SymmetrizedSet(short)) if short else []
        changed = bool(relevant)
        while changed:
            changed = False
            for v0 in range(n):
                if find(v0) != v0:
                    continue
                w0 = words[v0]
                lw = len(w0)
                for r in relevant:
                    if folds == 0:
                        # pristine tree: the walk descends while r cancels
                        # the tail of w0, then only ascends, so it stays in
                        # the ball iff the reduced endpoint does
                        j = 0
                        while j < len(r) and j < lw and w0[lw - 1 - j] == -r[j]:
                            j += 1
                        if lw + len(r) - 2 * j > radius:
                            continue
                    v = v0
                    for x in r:
                        t = adjs[find(v)].get(x)
                        if t is None:
                            v = -1
                            break
                        v = t
                    if v >= 0 and find(v) != find(v0):
                        union(v0, v)
                        changed = True
    reg.fold_count = folds

    roots = sorted(set(find(i) for i in range(n)))
    canon_of_root: Dict[int, Word] = {}
    for i in range(n):
        r = find(i)
        w = words[i]
        best = canon_of_root.get(r)
        if best is None or shortlex_key(w) < shortlex_key(best):
            canon_of_root[r] = w

    root_adj: Dict[int, Dict[int, int]] = {}
    for r in roots:
        root_adj[r] = {x: find(t) for x, t in adjs[r].items()}

    dist: Dict[int, int] = {find(0): 0}
    dq = deque([find(0)])
    while dq:
        u = dq.popleft()
        du = dist[u]
        nbrs = root_adj[u]
        for x in letters:
            v = nbrs.get(x)
            if v is not None and v not in dist:
                dist[v] = du + 1
                dq.append(v)
    assert len(dist) == len(roots)
    assert all(d <= radius for d in dist.values())

    order = sorted(roots, key=lambda r: (dist[r], shortlex_key(canon_of_root[r])))
    compact = {r: i for i, r in enumerate(order)}
    reg._canon = [canon_of_root[r] for r in order]
    reg._dist = [dist[r] for r in order]
    reg._adj = [{x: compact[t] for x, t in root_adj[r].items()} for r in order]
    reg._index = {w: compact[find(i)] for w, i in index.items()}
    reg._n = len(order)
    return reg


# -- contours --------------------------------------------------------------


def _trace_loop(reg: Region, v0: Word, r: Word) -> Optional[Tuple[Word, ...]]:
    """Vertex cycle of the relator loop at v0 reading r, or None to skip.

    Walks folded edges while they exist. A loop that leaves the region is
    rebuilt through the free group, which is only sound when the region
    never folded and the tree certificate holds; per-vertex words take the
    shorter of the two ways around the loop, so every anchor on the same
    loop produces the same labels.
    """
    i0 = reg._id(v0)
    n = len(r)
    words: List[Word] = [v0]
    cur = i0
    complete = True
    for k in range(n):
        t = reg._step(cur, r[k])
        if t is None:
            complete = False
            break
        cur = t
        if k < n - 1:
            words.append(reg._canon[cur])
    if complete:
        if cur != i0:
            if reg.unsafe_no_cprime:
                return None
            raise InvariantViolation(
                "relator trace closes on a different vertex: region fold "
                "is incomplete at %r" % (v0,))
        if len(set(words)) != n:
            if reg.unsafe_no_cprime:
                return None
            raise InvariantViolation("relator loop at %r is not simple" % (v0,))
        return tuple(words)
    if reg.fold_count or not (reg.tree_certified or reg.unsafe_no_cprime):
        raise ResourceLimit(
            "loop leaves the region and the free fallback needs an unfolded, "
            "tree-certified ball")
    fwd = v0
    rest = inverse(r)
    words = []
    for k in range(n):
        if k:
            fwd = reduce(fwd + r[k - 1:k])
        bwd = reduce(v0 + rest[:n - k])
        words.append(fwd if shortlex_key(fwd) <= shortlex_key(bwd) else bwd)
    if len(set(words)) != n:
        if reg.unsafe_no_cprime:
            return None
        raise InvariantViolation("relator loop at %r is not simple" % (v0,))
    return tuple(words)


def trace_contours(reg: Region, near, *,
                   max_cells: Optional[int] = None) -> Tuple[Contour, ...]:
    """All contours meeting `near`, deduplicated by canonical edge set.

    Loops may leave the region; their outside vertices are carried as
    words. Tree regions refuse: paper-scale loops are never materialized,
    their discovery goes through label matching along a path instead.
    """
    if reg.backend == "tree":
        raise ResourceLimit("tree regions do not materialize contours")
    p = reg.presentation
    if not p.orbits:
        return ()
    anchors = [reg.resolve(v) for v in near]
    budget = max_cells if max_cells is not None else DEFAULT_MAX_CONTOUR_CELLS
    cost = len(anchors) * sum(k * n * n
                              for n, k in p.relators.length_counts())
    if cost > budget:
        raise ResourceLimit("contour tracing needs %d cells (cap %d)"
                            % (cost, budget))
    seen: Dict[frozenset, Contour] = {}
    for v0 in anchors:
        for r in p.relators:
            cycle = _trace_loop(reg, v0, r)
            if cycle is None:
                continue
            n = len(cycle)
            eks = frozenset(edge_key(cycle[i], r[i], cycle[(i + 1) % n])
                            for i in range(n))
            if len(eks) != n:
                if reg.unsafe_no_cprime:
                    continue
                raise InvariantViolation("loop at %r repeats an edge" % (v0,))
            if eks in seen:
                continue
            a = min(range(n),
                    key=lambda i: (shortlex_key(cycle[i]), abs(r[i])))
            seen[eks] = Contour(r, ("edges", eks), anchor=cycle[a],
                                anchor_phase=a, vertices=cycle, edge_keys=eks,
                                presentation=reg.presentation)
    out = sorted(seen.values(),
                 key=lambda c: (c.length,
                                sorted((shortlex_key(w), x)
                                       for w, x in c.edge_keys())))
    return tuple(out)


def _arc_from_positions(c: Contour, q: GeodesicPath, hits: List[Tuple[int, int, int]]
                        ) -> ArcIntersection:
    """Validate shared-edge positions as one aligned arc and package it.

    hits are (path_pos, loop_pos, direction) triples; direction +1 when the
    path edge reads relator[loop_pos], -1 when it reads its inverse.
    """
    hits.sort()
    n = c.length
    pos = [h[0] for h in hits]
    if pos != list(range(pos[0], pos[-1] + 1)):
        raise InvariantViolation(
            "contour/path intersection is not one arc: path edges %r" % (pos,))
    dirs = set(h[2] for h in hits)
    if len(dirs) != 1:
        raise InvariantViolation("intersection arc flips direction")
    d = dirs.pop()
    for (p1, l1, _), (p2, l2, _) in zip(hits, hits[1:]):
        if (l1 + d) % n != l2:
            raise InvariantViolation(
                "intersection arc is not contiguous on the contour")
    s, e = pos[0], pos[-1] + 1
    if d > 0:
        phase = hits[0][1]
    else:
        phase = (hits[0][1] + 1) % n
    return ArcIntersection(c, q, s, e, q.vertex(s), q.vertex(e), phase, d)


def intersect(c: Contour, q: GeodesicPath) -> Optional[ArcIntersection]:
    """The arc r cap p, a single touching vertex, or None.

    Any non-arc intersection aborts the run: it would falsify the one-arc
    property that every downstream weight computation relies on.
    """
    if c.materialized:
        loop_edges: Dict[Tuple[Word, int], Tuple[int, int]] = {}
        verts = c.vertices()
        n = len(verts)
        for i in range(n):
            tail, head = verts[i], verts[(i + 1) % n]
            x = c.relator[i]
            d = 1 if x > 0 else -1
            loop_edges[edge_key(tail, x, head)] = (i, d)
        vset = set(verts)
        hits: List[Tuple[int, int, int]] = []
        shared: List[int] = []
        prev = None
        for i, v in enumerate(q.iter_vertices()):
            if v in vset:
                shared.append(i)
            if prev is not None:
                k = edge_key(prev, q.label[i - 1], v)
                at = loop_edges.get(k)
                if at is not None:
                    loop_pos, d = at
                    sign = 1 if q.label[i - 1] > 0 else -1
                    hits.append((i - 1, loop_pos, d * sign))
            prev = v
        if hits:
            arc = _arc_from_positions(c, q, hits)
            if shared != list(range(arc.start_index, arc.end_index + 1)):
                raise InvariantViolation(
                    "contour meets the path at vertices outside its arc")
            return arc
        if not shared:
            return None
        if len(shared) > 1:
            raise InvariantViolation(
                "contour touches the path at %d separate vertices"
                % len(shared))
        i = shared[0]
        v = q.vertex(i)
        phase = verts.index(v)
        return ArcIntersection(c, q, i, i, v, v, phase, 0)
    return _intersect_anchored(c, q)


def _loop_vertex_from_anchor(c: Contour, phase: int) -> Word:
    """Word of the loop vertex at `phase`, reached from the anchored one."""
    r = c.relator
    n = len(r)
    a = c.anchor_phase
    if phase >= a:
        seg = r[a:phase]
    else:
        seg = r[a:] + r[:phase]
    fwd_len = len(seg)
    if fwd_len <= n - fwd_len:
        return reduce(c.anchor + seg)
    if phase <= a:
        back = r[phase:a]
    else:
        back = r[phase:] + r[:a]
    return reduce(c.anchor + inverse(back))


def _maximal_runs(sa, pattern: Word) -> List[Tuple[int, int, int]]:
    """(end_index, length, word_end) of every maximal match of the pattern.

    A run ends where the streamed longest-factor length stops growing; its
    reported occurrence is the one the automaton tracked to that point.
    """
    ms = list(sa.iter_matches(pattern))
    runs: List[Tuple[int, int, int]] = []
    for i, (idx, l, we) in enumerate(ms):
        if l == 0:
            continue
        if i + 1 == len(ms) or ms[i + 1][1] <= l:
            runs.append((idx, l, we))
    return runs


def _intersect_anchored(c: Contour, q: GeodesicPath) -> Optional[ArcIntersection]:
    """Arc of an anchored (lazy) contour along q via cyclic label matching.

    Candidate arcs are maximal matches of the path label (either reading
    direction) against the doubled relator; each is confirmed by comparing
    the anchored loop vertex word with the path vertex word at the match
    start, which is exact for in-region anchors because the shorter way
    around the loop between two region vertices is itself geodesic.

    Known limitation: matches no longer than the maximal piece have no
    unique loop phase, so arcs that short (and bare vertex touches) report
    None. Every arc the array computations produce clears the piece bound
    by construction, so the gap is outside this package's own call graph.
    """
    p = c.presentation
    n = c.length
    sa = _dehn_index(p).classes[c.class_index][1]
    piece = _piece_bound(p)
    label = q.label
    L = len(label)
    found: List[Tuple[int, int, int, int]] = []
    for direction in (1, -1):
        pat = label if direction > 0 else inverse(label)
        for end_idx, l, we in _maximal_runs(sa, pat):
            if l <= piece or l >= n:
                continue
            s = end_idx - l + 1
            j = (we - l + 1) % n
            if direction > 0:
                start_index, end_index = s, s + l
                phase = j
            else:
                start_index, end_index = L - s - l, L - s
                phase = (j + l) % n
            if q.vertex(start_index) != _loop_vertex_from_anchor(c, phase):
                continue
            found.append((start_index, end_index, phase, direction))
    if not found:
        return None
    if len(found) > 1:
        raise InvariantViolation(
            "contour shares %d separate arcs with the path" % len(found))
    s_i, e_i, phase, d = found[0]
    return ArcIntersection(c, q, s_i, e_i, q.vertex(s_i), q.vertex(e_i),
                           phase, d)


def check_arc_geodesics(reg: Region, arc: ArcIntersection) -> str:
    """Oracle: short arcs are unique geodesics, half arcs come in pairs.

    Returns "pass"; raises Skipped when the configuration is outside what
    the region can certify, InvariantViolation when the facts fail.
    """
    s = arc.overlap_length
    n = arc.contour.length
    if 2 * s > n or s == 0:
        raise Skipped("only arcs up to half the relator are covered")
    g, h = arc.end_minus, arc.end_plus
    try:
        d, paths = reg.distance_and_geodesics(g, h)
    except (OutOfRegion, ResourceLimit):
        raise Skipped("endpoints not certifiable inside the region")
    sub = GeodesicPath(g, arc.path.label[arc.start_index:arc.end_index])
    want = (sub.start, sub.label)
    got = set((q.start, q.label) for q in paths)
    if d != s:
        raise InvariantViolation(
            "arc of length %d is not geodesic: d=%d" % (s, d))
    if want not in got:
        raise InvariantViolation("the arc itself is missing from geodesics")
    if 2 * s < n:
        if len(paths) != 1:
            raise InvariantViolation(
                "arc below half the relator must be the unique geodesic; "
                "found %d" % len(paths))
        return "pass"
    # exactly half: the complement arc and nothing else
    if not arc.contour.materialized:
        raise Skipped("half-relator check needs a materialized loop")
    if len(paths) != 2:
        raise InvariantViolation(
            "half-relator arc must have exactly two geodesics; found %d"
            % len(paths))
    comp = _complement_label(arc)
    if (g, comp) not in got:
        raise InvariantViolation("second geodesic is not the complement arc")
    return "pass"


def _complement_label(arc: ArcIntersection) -> Word:
    """Edge labels of the other way around the loop, from end_minus."""
    r = arc.contour.relator
    n = len(r)
    phase, d = arc.relator_phase, arc.relator_direction
    s = arc.overlap_length
    if d > 0:
        # path read r[phase : phase+s); complement: backwards from phase
        seg = tuple(r[(phase - 1 - k) % n] for k in range(n - s))
        return inverse(seg[::-1])
    seg = tuple(r[(phase + k) % n] for k in range(n - s))
    return seg


def dot_dump(reg: Region) -> str:
    """The region graph in DOT, deterministic for golden tests."""
    if reg.backend == "tree":
        raise ResourceLimit("tree regions do not enumerate edges")
    names = reg.presentation.gen_names
    from .words import format_word
    lines = ["digraph region {"]
    for w in reg.vertices:
        lines.append('  "%s";' % (format_word(w, names),))
    for u, x, v in reg.pos_edges():
        lines.append('  "%s" -> "%s" [label="%s"];'
                     % (format_word(u, names), format_word(v, names),
                        names[x - 1]))
    lines.append("}")
    return "\n".join(lines) + "\n"
