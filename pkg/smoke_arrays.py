import time
from fractions import Fraction

from sc_arrays.presentation import Presentation, generate_family
from sc_arrays.words import parse_word, reduce, inverse
from sc_arrays.cayley import (build_region, edge_key, intersect,
                              GeodesicPath, Contour)
from sc_arrays.arrays import (ArrayParams, StepFunction, psi_eval,
                              chain_weights, contour_arcs,
                              contours_on_geodesic, contours_common,
                              xi_along, xi, eta, translate_contour_key,
                              translate_edge_key)
from sc_arrays.sparse import SparseVector

F = Fraction
W = lambda s, names=("a", "b"): parse_word(s, names)

# 1. psi
f = StepFunction(F(6, 33), F(71, 330))
assert psi_eval(f, F(6, 33)) == 0
assert psi_eval(f, F(71, 330)) == 1
assert psi_eval(f, F(131, 660)) == F(1, 2)
assert psi_eval(f, 0) == 0 and psi_eval(f, 1) == 1
print("psi ok")

# 2. params
pp = ArrayParams(F(6, 33), F(71, 330))
assert pp.K == F(10, 11) and pp.mu == F(4, 33)
pe = ArrayParams(F(111, 330), F(122, 330))
assert pe.K == F(10, 11)
try:
    ArrayParams(F(1, 5), F(1, 4), lam=F(1, 8), mu=F(1, 2))
    raise SystemExit("paper validation should have rejected")
except ValueError:
    pass
rx = ArrayParams(F(1, 5), F(1, 4), lam=F(1, 8), mu=F(1, 2), relaxed=True)
print("params ok")

# 3. free: no contours, eta constant 1
free2 = Presentation(("a", "b"), [], F(1, 33), symmetrized=True)
rf = build_region(free2, 6)
qf = GeodesicPath((), W("a b^-1 a"))
assert contours_on_geodesic(qf, F(4, 33), rf) == []
xvf = xi((), W("a b^-1 a"), pp.step(), pp, rf)
assert not xvf
evf = eta((), W("a b^-1 a"), pp.step(), None, pp, rf)
assert len(evf) == 3 and all(v == 1 for _, v in evf.items())
print("free ok")

# 4. Z^2 bigon, relaxed params
z2 = Presentation(("a", "b"), [W("a b a^-1 b^-1")], F(1, 8)).symmetrize()
rz = build_region(z2, 4, unsafe_no_cprime=True)
g, h = (), W("a b")
cc = contours_common(g, h, F(1, 2), rz)
assert len(cc) == 1 and cc[0].length == 4, cc
xvz = xi(g, h, rx.step(), rx, rz)
assert xvz.get(cc[0].key) == 4, xvz
evz = eta(g, h, rx.step(), None, rx, rz)
assert not evz, evz
evz2 = eta(g, W("a a"), rx.step(), None, rx, rz)
assert len(evz2) == 2 and all(v == 1 for _, v in evz2.items())
print("z2 ok")

# 5. P8 ball R9: 18-of-35 discovery at mu' = 1/2
p8 = generate_family(7)
w8 = p8.orbits[0]
assert len(w8) == 35
t0 = time.time()
r9 = build_region(p8, 9, backend="ball", unsafe_no_cprime=True)
t1 = time.time()
assert r9.fold_count == 0
q18 = GeodesicPath(inverse(w8[:9]), w8[:18])
pairs = contour_arcs(q18, F(1, 2), r9)
assert len(pairs) == 1 and pairs[0][0].length == 35, pairs
arc = pairs[0][1]
assert (arc.start_index, arc.end_index, arc.overlap_length) == (0, 18, 18)
fch = StepFunction(F(12, 35), F(16, 35))
ch1 = chain_weights(q18, [pairs[0][0]], fch)
assert ch1.ratios == (F(18, 35),) and ch1.tau == (F(18, 35),)
assert ch1.rho == (1,) and ch1.sigma == (1,)
print("p8 ball ok (build %.1fs, trace %.1fs)" % (t1 - t0, time.time() - t1))

# 6. synthetic two-contour chain (overlap 1 edge, both arcs 18 of 35)
r2 = tuple(w8[13:] + w8[:13])
X = w8[:18] + r2[1:18]
assert len(X) == 35 and reduce(X) == X
path = GeodesicPath((), X)
verts = [X[:i] for i in range(36)]
cyc1 = [X[:i] for i in range(19)] + [inverse(w8[i:]) for i in range(19, 35)]
cyc2 = [verts[17 + j] for j in range(19)] \
    + [verts[35] + r2[18:j] for j in range(19, 35)]


def mk_contour(rel, cyc):
    n = len(rel)
    eks = frozenset(edge_key(cyc[i], rel[i], cyc[(i + 1) % n])
                    for i in range(n))
    assert len(eks) == n and len(set(cyc)) == n
    return Contour(tuple(rel), ("edges", eks), vertices=tuple(cyc),
                   edge_keys=eks, presentation=p8)


c1 = mk_contour(w8, cyc1)
c2 = mk_contour(r2, cyc2)
a1 = intersect(c1, path)
a2 = intersect(c2, path)
assert (a1.start_index, a1.end_index) == (0, 18)
assert (a2.start_index, a2.end_index) == (17, 35)
ch = chain_weights(path, [c1, c2], fch)
assert ch.overlaps == (18, 18)
assert ch.alpha == (0, F(1, 35)) and ch.beta == (F(1, 35), 0)
assert ch.rho == (1, 1) and ch.sigma == (1, 1)
assert ch.tau == (F(17, 35), F(17, 35))
xa = xi_along(path, fch, [c1, c2])
assert xa.get(c1.key) == 35 and xa.get(c2.key) == 35
print("two-contour chain ok")

# 7. family(140) tree: discovery, xi, eta, symmetry, equivariance
f140 = generate_family(140).with_lambda(F(1, 33))
rt = build_region(f140, 2275, backend="tree")
w140 = f140.orbits[0]
assert len(w140) == 10010
q7 = GeodesicPath((), w140[:7])
assert contours_on_geodesic(q7, F(4, 33), rt) == []
g, h = (), w140[:2000]
t2 = time.time()
cc = contours_common(g, h, F(4, 33), rt)
t3 = time.time()
assert len(cc) == 1 and cc[0].length == 10010, cc
xv = xi(g, h, pp.step(), pp, rt)
assert xv.get(cc[0].key) == 5400, xv
xv2 = xi(h, g, pp.step(), pp, rt)
assert xv == xv2
k = (1,)
xvk = xi(reduce(k + g), reduce(k + h), pp.step(), pp, rt)
tk = translate_contour_key(k, cc[0].key)
assert set(xvk.support()) == {tk} and xvk.get(tk) == 5400
evt = eta(g, h, pp.step(), None, pp, rt)
assert len(evt) == 2000
assert {v for _, v in evt.items()} == {F(461, 1001)}
e0 = next(iter(evt.support()))
assert translate_edge_key((), e0) == e0
print("f140 tree ok (discovery %.1fs, rest %.1fs)" % (t3 - t2,
                                                      time.time() - t3))

print("ALL ARRAYS SMOKE OK")
