"""Contour sets along geodesics and the xi/eta array families.

Everything here is exact rational arithmetic: the step function has
rational breakpoints, overlaps are integer edge counts, so every weight,
array entry, and strict inequality is decided without rounding.
"""

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cayley import (ArcIntersection, Contour, GeodesicPath, Region,
                     anchored_contour_key, intersect, shortlex_key,
                     trace_contours, _loop_vertex_from_anchor, _maximal_runs)
from .errors import (InvariantViolation, NotSmallCancellation, OutOfRegion,
                     Skipped)
from .sparse import SparseVector
from .wordproblem import _certified, _index as _dehn_index
from .words import Word, inverse, reduce


class StepFunction:
    """The ramp that is 0 up to nu0, affine to 1 at nu1, then constant 1."""

    __slots__ = ("nu0", "nu1")

    def __init__(self, nu0, nu1):
        nu0, nu1 = Fraction(nu0), Fraction(nu1)
        if not nu0 < nu1:
            raise ValueError("step function needs nu0 < nu1")
        self.nu0 = nu0
        self.nu1 = nu1

    def __repr__(self):
        return "StepFunction(%s, %s)" % (self.nu0, self.nu1)

    def __eq__(self, other):
        return (isinstance(other, StepFunction)
                and (self.nu0, self.nu1) == (other.nu0, other.nu1))

    def __hash__(self):
        return hash((self.nu0, self.nu1))


def psi_eval(f: StepFunction, x) -> Fraction:
    x = Fraction(x)
    if x <= f.nu0:
        return Fraction(0)
    if x >= f.nu1:
        return Fraction(1)
    return (x - f.nu0) / (f.nu1 - f.nu0)


class ArrayParams:
    """Parameter block for the array construction.

    In the default (strict) mode the inequalities mu + 2*lambda <= nu0 <
    nu1 <= 1/2 - 4*lambda and nu0 + lambda < nu1 are enforced; relaxed mode
    admits any nu0 < nu1 so the pipeline can be exercised on presentations
    whose lambda is far above the regime where the bounds make sense.
    """

    __slots__ = ("lam", "mu", "nu0", "nu1", "relaxed")

    def __init__(self, nu0, nu1, lam=Fraction(1, 33), mu=None,
                 relaxed: bool = False):
        lam = Fraction(lam)
        mu = Fraction(mu) if mu is not None else 4 * lam
        nu0, nu1 = Fraction(nu0), Fraction(nu1)
        if not nu0 < nu1:
            raise ValueError("need nu0 < nu1")
        if not relaxed:
            if not (mu + 2 * lam <= nu0 and nu1 <= Fraction(1, 2) - 4 * lam):
                raise ValueError(
                    "need mu + 2*lambda <= nu0 < nu1 <= 1/2 - 4*lambda "
                    "(or relaxed=True)")
            if not nu0 + lam < nu1:
                raise ValueError("need nu0 + lambda < nu1 (or relaxed=True)")
        self.lam = lam
        self.mu = mu
        self.nu0 = nu0
        self.nu1 = nu1
        self.relaxed = relaxed

    def step(self) -> StepFunction:
        return StepFunction(self.nu0, self.nu1)

    @property
    def K(self) -> Fraction:
        return self.lam / (self.nu1 - self.nu0)

    def __repr__(self):
        return ("ArrayParams(lam=%s, mu=%s, nu0=%s, nu1=%s%s)"
                % (self.lam, self.mu, self.nu0, self.nu1,
                   ", relaxed" if self.relaxed else ""))


def _is_certified(p) -> bool:
    try:
        _certified(p)
    except NotSmallCancellation:
        return False
    return True


def _check_arc_layout(pairs: Sequence[Tuple[Contour, ArcIntersection]],
                      strict: bool) -> None:
    """Arcs along one path: starts strictly increase and never nest."""
    prev_s, prev_e = -1, -1
    for c, a in pairs:
        if strict and a.start_index <= prev_s:
            raise InvariantViolation(
                "two contour arcs start at the same path position")
        if strict and a.end_index <= prev_e:
            raise InvariantViolation(
                "contour arc nested inside the previous one")
        prev_s, prev_e = a.start_index, a.end_index


def _same_loop(c1: Contour, c2: Contour) -> bool:
    if c1.key == c2.key:
        return True
    if c1.class_index is None or c2.class_index is None:
        return False
    if c1.key[1] != c2.key[1]:
        return False
    return _loop_vertex_from_anchor(c1, c2.anchor_phase) == c2.anchor


def _discover_tree(p: GeodesicPath, mu_prime: Fraction, ctx: Region
                   ) -> List[Tuple[Contour, ArcIntersection]]:
    pres = ctx.presentation
    classes = _dehn_index(pres).classes
    label = p.label
    L = len(label)
    t_is_plus = shortlex_key(p.p_plus) >= shortlex_key(p.p_minus)
    by_key: Dict[object, Tuple[Contour, ArcIntersection]] = {}
    for ci, (rep, sa) in enumerate(classes):
        n = len(rep)
        if mu_prime * n > L:
            continue
        for direction in (1, -1):
            pat = label if direction > 0 else inverse(label)
            for end_idx, l, we in _maximal_runs(sa, pat):
                if l < mu_prime * n or l >= n:
                    continue
                s = end_idx - l + 1
                j = (we - l + 1) % n
                if direction > 0:
                    start_index, end_index = s, s + l
                    phase_minus = j
                    phase_plus = (j + l) % n
                else:
                    start_index, end_index = L - s - l, L - s
                    phase_minus = (j + l) % n
                    phase_plus = j
                end_minus = p.vertex(start_index)
                end_plus = p.vertex(end_index)
                if t_is_plus:
                    t_vertex, t_phase = end_plus, phase_plus
                else:
                    t_vertex, t_phase = end_minus, phase_minus
                key = anchored_contour_key(pres, ci, t_phase, t_vertex)
                c = Contour(rep, key, anchor=end_minus,
                            anchor_phase=phase_minus, presentation=pres,
                            class_index=ci)
                arc = ArcIntersection(c, p, start_index, end_index,
                                      end_minus, end_plus, phase_minus,
                                      direction)
                old = by_key.get(key)
                if old is not None:
                    oa = old[1]
                    if (oa.start_index, oa.end_index) != (start_index,
                                                          end_index):
                        raise InvariantViolation(
                            "contour meets the path in two separate arcs")
                    continue
                by_key[key] = (c, arc)
    pairs = sorted(by_key.values(), key=lambda ca: ca[1].start_index)
    for i, (c1, _) in enumerate(pairs):
        for c2, _ in pairs[i + 1:]:
            if _same_loop(c1, c2):
                raise InvariantViolation(
                    "one relator loop produced two arcs on the path")
    return pairs


def _discover_ball(p: GeodesicPath, mu_prime: Fraction, ctx: Region
                   ) -> List[Tuple[Contour, ArcIntersection]]:
    shortest = ctx.presentation.min_relator_length()
    if shortest is None or mu_prime * shortest > len(p.label):
        return []
    out: List[Tuple[Contour, ArcIntersection]] = []
    for c in trace_contours(ctx, p.vertices()):
        arc = intersect(c, p)
        if arc is None:
            continue
        if arc.overlap_length >= mu_prime * c.length:
            out.append((c, arc))
    out.sort(key=lambda ca: ca[1].start_index)
    return out


def contour_arcs(p: GeodesicPath, mu_prime, ctx: Region
                 ) -> List[Tuple[Contour, ArcIntersection]]:
    """Contours with |r cap p| >= mu_prime*|r|, with their arcs, ordered.

    Ball regions trace every loop near the path and filter by overlap;
    tree regions match the path label against each doubled relator class,
    which finds the same arcs without materializing any loop.
    """
    mu_prime = Fraction(mu_prime)
    if ctx.presentation.orbits and mu_prime <= 2 * ctx.presentation.lam:
        raise ValueError("mu_prime must exceed 2*lambda")
    if ctx.backend == "tree":
        pairs = _discover_tree(p, mu_prime, ctx)
    else:
        pairs = _discover_ball(p, mu_prime, ctx)
    _check_arc_layout(pairs, strict=not ctx.unsafe_no_cprime)
    return pairs


def contours_on_geodesic(p: GeodesicPath, mu_prime, ctx: Region
                         ) -> List[Contour]:
    return [c for c, _ in contour_arcs(p, mu_prime, ctx)]


def contours_common(g, h, mu_prime, ctx: Region) -> List[Contour]:
    """Contours meeting every geodesic from g to h at the mu_prime level.

    The order along a geodesic is asserted to be the same for all of them;
    a disagreement is a hard failure, not a tie to break.
    """
    g = ctx.resolve(g)
    h = ctx.resolve(h)
    if g == h:
        return []
    try:
        _, paths = ctx.distance_and_geodesics(g, h)
    except OutOfRegion as e:
        raise Skipped(str(e)) from None
    per_path = [contour_arcs(q, mu_prime, ctx) for q in paths]
    common = {c.key for c, _ in per_path[0]}
    for pairs in per_path[1:]:
        common &= {c.key for c, _ in pairs}
    orders = []
    for pairs in per_path:
        orders.append([c.key for c, _ in pairs if c.key in common])
    for o in orders[1:]:
        if o != orders[0]:
            raise InvariantViolation(
                "geodesics disagree on the contour order")
    by_key = {c.key: c for c, _ in per_path[0]}
    return [by_key[k] for k in orders[0]]


class ContourChain:
    """Ordered contours along one path with their interaction weights."""

    __slots__ = ("path", "contours", "arcs", "overlaps", "ratios",
                 "alpha", "beta", "rho", "sigma", "tau")

    def __init__(self, path, contours, arcs, overlaps, ratios, alpha, beta,
                 rho, sigma, tau):
        self.path = path
        self.contours = contours
        self.arcs = arcs
        self.overlaps = overlaps
        self.ratios = ratios
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.sigma = sigma
        self.tau = tau

    def __len__(self):
        return len(self.contours)

    def __repr__(self):
        return "ContourChain(%d contours on |p|=%d)" % (len(self.contours),
                                                        len(self.path.label))


def chain_weights(p: GeodesicPath, A: Sequence[Contour], f: StepFunction
                  ) -> ContourChain:
    """Interaction weights along p for the ordered contours A.

    alpha/beta measure the edges consecutive arcs share on p, scaled by
    each contour's own length; rho runs left to right, sigma right to
    left, and tau discounts each overlap ratio by what its neighbors have
    already absorbed. Every value is validated against the certified
    bounds when the presentation certifies.
    """
    contours = list(A)
    n = len(contours)
    if n == 0:
        return ContourChain(p, (), (), (), (), (), (), (), (), ())
    arcs: List[ArcIntersection] = []
    for c in contours:
        arc = intersect(c, p)
        if arc is None or arc.overlap_length == 0:
            raise InvariantViolation(
                "chain contour shares no edge with the path")
        arcs.append(arc)
    pres = contours[0].presentation
    strict = pres is not None and _is_certified(pres)
    _check_arc_layout(list(zip(contours, arcs)), strict)
    lam = pres.lam if pres is not None else None
    lens = [c.length for c in contours]
    overlaps = [a.overlap_length for a in arcs]
    ratios = [Fraction(overlaps[i], lens[i]) for i in range(n)]

    def shared(i: int, j: int) -> int:
        lo = max(arcs[i].start_index, arcs[j].start_index)
        hi = min(arcs[i].end_index, arcs[j].end_index)
        return max(0, hi - lo)

    alpha = [Fraction(0)] * n
    beta = [Fraction(0)] * n
    for i in range(1, n):
        common = shared(i - 1, i)
        alpha[i] = Fraction(common, lens[i])
        beta[i - 1] = Fraction(common, lens[i - 1])
    for i in range(n - 1):
        assert beta[i] * lens[i] == alpha[i + 1] * lens[i + 1]
    if strict:
        for i in range(n):
            if not (alpha[i] < lam and beta[i] < lam):
                raise InvariantViolation(
                    "consecutive arcs overlap by %s >= lambda: pieces are "
                    "longer than certified" % (max(alpha[i], beta[i]),))
    rho = [Fraction(0)] * n
    sigma = [Fraction(0)] * n
    for i in range(n):
        prev = rho[i - 1] if i else Fraction(0)
        rho[i] = psi_eval(f, ratios[i] - prev * alpha[i])
    for i in range(n - 1, -1, -1):
        nxt = sigma[i + 1] if i + 1 < n else Fraction(0)
        sigma[i] = psi_eval(f, ratios[i] - nxt * beta[i])
    tau = [Fraction(0)] * n
    for i in range(n):
        r_prev = rho[i - 1] if i else Fraction(0)
        s_next = sigma[i + 1] if i + 1 < n else Fraction(0)
        tau[i] = ratios[i] - r_prev * alpha[i] - s_next * beta[i]
        if not tau[i] <= ratios[i]:
            raise InvariantViolation("tau exceeds its overlap ratio")
        if strict and not ratios[i] - 2 * lam < tau[i]:
            raise InvariantViolation(
                "tau fell more than 2*lambda below the overlap ratio")
    return ContourChain(p, tuple(contours), tuple(arcs), tuple(overlaps),
                        tuple(ratios), tuple(alpha), tuple(beta), tuple(rho),
                        tuple(sigma), tuple(tau))


def xi_along(p: GeodesicPath, f: StepFunction, A: Sequence[Contour]
             ) -> SparseVector:
    """The array of one path: psi(tau_i)*|r_i| on each chain contour."""
    chain = chain_weights(p, A, f)
    items = {}
    for i, c in enumerate(chain.contours):
        items[c.key] = psi_eval(f, chain.tau[i]) * c.length
    return SparseVector("contours", items)


def xi(g, h, f: StepFunction, params: ArrayParams, ctx: Region
       ) -> SparseVector:
    """Pointwise max of xi_along over the complete geodesic set of (g, h)."""
    g = ctx.resolve(g)
    h = ctx.resolve(h)
    if g == h:
        return SparseVector.zero("contours")
    A = contours_common(g, h, params.mu, ctx)
    try:
        _, paths = ctx.distance_and_geodesics(g, h)
    except OutOfRegion as e:
        raise Skipped(str(e)) from None
    out = SparseVector.zero("contours")
    if not A:
        return out
    lengths = {c.key: c.length for c in A}
    for q in paths:
        out = out.pointwise_max(xi_along(q, f, A))
    for k, v in out.items():
        if not 0 <= v <= lengths[k]:
            raise InvariantViolation("xi value %s outside [0, |r|]" % (v,))
    return out


def eta(g, h, f: StepFunction, A: Optional[Sequence[Contour]],
        params: ArrayParams, ctx: Region) -> SparseVector:
    """Edge array: 1 minus the best covering ratio xi(r)/|r| per edge.

    Runs over every edge of every geodesic between g and h. An edge no
    contour of A covers scores 1 (the max over nothing is 0).
    """
    g = ctx.resolve(g)
    h = ctx.resolve(h)
    if g == h:
        return SparseVector.zero("edges")
    try:
        _, paths = ctx.distance_and_geodesics(g, h)
    except OutOfRegion as e:
        raise Skipped(str(e)) from None
    if A is None:
        A = contours_common(g, h, params.mu, ctx)
    xv = xi(g, h, f, params, ctx)
    best: Dict[object, Fraction] = {}
    edges = set()
    for q in paths:
        edges.update(q.iter_edge_keys())
        for c in A:
            arc = intersect(c, q)
            if arc is None:
                continue
            ratio = xv.get(c.key) / c.length
            for e in arc.edge_keys():
                if ratio > best.get(e, -1):
                    best[e] = ratio
    items = {}
    for e in edges:
        v = 1 - best.get(e, Fraction(0))
        if not 0 <= v <= 1:
            raise InvariantViolation("eta value %s outside [0, 1]" % (v,))
        items[e] = v
    return SparseVector("edges", items)


def translate_contour_key(k: Word, key):
    """Left-translate a contour key by k (exact on tree regions)."""
    if key[0] == "anchored":
        _, ci, phase, v = key
        return ("anchored", ci, phase, reduce(k + v))
    if key[0] == "edges":
        return ("edges", frozenset((reduce(k + w), x) for w, x in key[1]))
    raise ValueError("unknown contour key %r" % (key,))


def translate_edge_key(k: Word, e):
    w, x = e
    return (reduce(k + w), x)
