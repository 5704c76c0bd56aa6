import time
from fractions import Fraction

from sc_arrays.presentation import Presentation, generate_family, piece_table
from sc_arrays.words import parse_word, reduce, inverse, is_cyclically_reduced
from sc_arrays.cayley import build_region, edge_key, GeodesicPath, Contour
from sc_arrays.arrays import translate_contour_key
from sc_arrays.sparse import SparseVector
from sc_arrays.errors import (InvariantViolation, NotNormalForm,
                              NotSmallCancellation, ResourceLimit,
                              ValencyExceeded)
from sc_arrays.properarray import (ProperArrayParams, project_contours,
                                   project_edges, phi, phi_tilde_stats,
                                   phi_tilde_approx, translate_phi,
                                   WordLengthFactor, PhiTildeFactor,
                                   combine_free_product, patched_mass_vector,
                                   check_combined_symmetry, product_inverse,
                                   product_mul, properness_census,
                                   letter_graph, minimal_exponent,
                                   exponent_inequality_holds,
                                   embed_into_finitely_generated)

F = Fraction
W = lambda s, names=("a", "b"): parse_word(s, names)

# 1. parameter block
dp = ProperArrayParams()
assert dp.K1 == F(10, 11) and dp.K2 == F(10, 11)
assert dp.xi_drift_bound == 330
assert dp.eta_drift_bound == 364
assert dp.L == 694
assert dp.nu11 + 2 * dp.lam == dp.nu20 - 2 * dp.lam
try:
    ProperArrayParams(nu11=F(100, 330))
    raise SystemExit("level gap should have been rejected")
except ValueError:
    pass
ProperArrayParams(nu11=F(100, 330), relaxed=True)
zp = ProperArrayParams(F(1, 5), F(1, 4), F(1, 5), F(1, 4),
                       lam=F(1, 8), mu=F(1, 2), relaxed=True)
print("params ok")

# 2. projections on the synthetic two-contour fixture
p8 = generate_family(7)
w8 = p8.orbits[0]
r2 = tuple(w8[13:] + w8[:13])
X = w8[:18] + r2[1:18]
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
assert project_contours(SparseVector.zero("contours")) == \
    SparseVector.zero("vertices")
pv = project_contours(SparseVector("contours", {c1.key: 35}), [c1])
assert len(pv) == 35 and {v for _, v in pv.items()} == {F(1)}
assert pv.l1() == 35
mixed = SparseVector("contours", {c1.key: 1, c2.key: -1})
pm = project_contours(mixed, [c1, c2])
assert pm.l1() == F(66, 35) < mixed.l1() == 2
shared = set(cyc1) & set(cyc2)
assert shared == {verts[17], verts[18]}
assert all(pm.get(w) == 0 for w in shared)

ev1 = SparseVector("edges", {((), 1): 1})
pe1 = project_edges(ev1)
assert pe1.get(()) == F(1, 2) and pe1.get((1,)) == F(1, 2)
path_edges = {(X[:i], 1 if X[i] > 0 else -1): 1 for i in range(0)}
pedges = SparseVector("edges", {(w8[:i], w8[i]): 1 for i in range(4)})
pp4 = project_edges(pedges)
assert pp4.l1() == 4
assert pp4.get(()) == F(1, 2) and pp4.get(w8[:4]) == F(1, 2)
assert pp4.get(w8[:2]) == 1
opp = project_edges(SparseVector("edges", {((), 1): 1, ((1,), 1): -1}))
assert opp.l1() == 1
print("projections ok")

# 3. phi on a free presentation: the equality case
free2 = Presentation(("a", "b"), [], F(1, 33), symmetrized=True)
rf = build_region(free2, 6)
h4 = (1, 1, 1, 1)
pv0 = phi((), (), dp, rf)
assert not pv0
pvf = phi((), h4, dp, rf)
assert pvf.l1() == 4 == rf.distance((), h4)
assert pvf.get(()) == F(1, 2) and pvf.get(h4) == F(1, 2)
assert pvf.get((1, 1)) == 1
assert phi(h4, (), dp, rf) == pvf
k = (2,)
moved = translate_phi(k, pvf)
assert moved == phi(k, reduce(k + h4), dp, rf)
sq, drift_ok = phi_tilde_stats((), h4, dp, rf)
assert sq == 4 and drift_ok
assert phi_tilde_stats((), (), dp, rf) == (0, True)
approx = phi_tilde_approx(pvf)
assert abs(approx[(1, 1)] - 1.0) < 1e-12
for g in [(1,), (1, 2), (2, -1, 2), (1, 1, -2, 1)]:
    s, ok = phi_tilde_stats((), g, dp, rf)
    assert s == rf.distance((), g) and ok
print("phi free ok")

# 4. phi on the folded Z^2 bigon (relaxed levels)
z2 = Presentation(("a", "b"), [W("a b a^-1 b^-1")], F(1, 8)).symmetrize()
rz = build_region(z2, 4, unsafe_no_cprime=True)
pvz = phi((), (1, 2), zp, rz)
assert pvz.l1() == 4
assert set(pvz.support()) == {(), (1,), (1, 2), (2,)}
assert {v for _, v in pvz.items()} == {F(1)}
assert phi((1, 2), (), zp, rz) == pvz
print("phi z2 ok")

# 5. structural blocks at family(140) scale
f140 = generate_family(140).with_lambda(F(1, 33))
t0 = time.time()
rt = build_region(f140, 2275, backend="tree")
w140 = f140.orbits[0]
g, h = (), w140[:2000]
pvt = phi(g, h, dp, rt)
blocks = [key for key in pvt.support() if key and key[0] == "block"]
assert len(blocks) == 1
assert pvt.get(blocks[0]) == 5400
assert pvt.l1() == 5400 + 2000
assert len(pvt) == 1 + 2001
assert pvt.get(()) == F(1, 2) and pvt.get(h) == F(1, 2)
assert pvt.get(w140[:7]) == 1
assert phi(h, g, dp, rt) == pvt
kv = (1,)
assert translate_phi(kv, pvt) == phi(kv, reduce(kv + h), dp, rt)
sqt, okt = phi_tilde_stats(g, h, dp, rt)
assert sqt == 7400 and okt
assert sqt >= rt.distance(g, h) == 2000
try:
    project_contours(SparseVector("contours", {("anchored", 0, 0, ()): 1}))
    raise SystemExit("anchored key without contour should not project")
except ResourceLimit:
    pass
print("phi f140 ok (%.1fs)" % (time.time() - t0))

# 6. word-length factors and the combined array
z1 = WordLengthFactor(1)
f2 = WordLengthFactor(2)
mv = z1.mass_vector((1, 1, 1))
assert mv.l1() == F(5, 2)
assert mv.get(()) == F(1, 4) and mv.get((1, 1, 1)) == F(1, 4)
assert mv.get((1,)) == 1
for x in [(1,), (1, 1), (-1, -1, -1)]:
    lhs = z1.mass_vector(z1.inverse(x)).map_keys(lambda s: z1.mul(x, s))
    assert lhs == z1.mass_vector(x)
for x in [(1, 2), (2, -1, 2, 2)]:
    lhs = f2.mass_vector(f2.inverse(x)).map_keys(lambda s: f2.mul(x, s))
    assert lhs == f2.mass_vector(x)

factors = [WordLengthFactor(1), WordLengthFactor(1)]
assert combine_free_product(factors, ()) == SparseVector.zero("product")
g1 = ((1, (1, 1, 1)),)
rv1 = combine_free_product(factors, g1)
assert rv1.l1() == patched_mass_vector(factors, 1, (1, 1, 1)).l1() == F(5, 2)
g2 = ((1, (1, 1, 1)), (2, (1, 1)))
rv2 = combine_free_product(factors, g2)
rhs = sum(patched_mass_vector(factors, n, x).l1() for n, x in g2)
assert rv2.l1() == rhs == F(21, 2)
assert patched_mass_vector(factors, 2, (1, 1)).l1() == 8
assert rv2.get((g2, 2)) == 4 and rv2.get((g2[:1], 2)) == 4
assert check_combined_symmetry(factors, g2)
assert check_combined_symmetry(factors, ((2, (-1,)), (1, (1, 1))))
assert product_mul(factors, g2, product_inverse(factors, g2)) == ()
for bad in [((1, ()),), ((1, (1,)), (1, (1,))), ((3, (1,)),)]:
    try:
        combine_free_product(factors, bad)
        raise SystemExit("normal form %r should have been rejected" % (bad,))
    except NotNormalForm:
        pass
count, bound = properness_census(factors, 2)
assert (count, bound) == (9, 10000)
print("free product ok")

# 7. region-backed factor combined with a free factor
pf = PhiTildeFactor(rf, dp)
assert pf.mass_vector((1,)).l1() == 1
assert pf.mass_vector((1, 1)).l1() == 2
lhs = pf.mass_vector(pf.inverse((1, 1))).map_keys(lambda s: pf.mul((1, 1), s))
assert lhs == pf.mass_vector((1, 1))
mixed_factors = [pf, WordLengthFactor(1)]
gm = ((1, (1, 1)), (2, (1,)))
rvm = combine_free_product(mixed_factors, gm)
assert rvm.l1() == 2 + 8
assert check_combined_symmetry(mixed_factors, gm)
print("mixed factors ok")

# 8. letter graph
lg8 = letter_graph(p8)
assert lg8.components == (("a", "b"),)
assert lg8.max_valency == 1 and lg8.valency == {"a": 1, "b": 1}
assert len(lg8.sub_presentations) == 1
assert lg8.sub_presentations[0].orbits == p8.orbits
names5 = ("a", "b", "c", "d", "e")
pd = Presentation(names5, [parse_word("a b a^-1 b^-1", names5),
                           parse_word("c d c d d", names5)], F(1, 6))
lgd = letter_graph(pd)
assert lgd.components == (("a", "b"), ("c", "d"), ("e",))
assert [q.orbits for q in lgd.sub_presentations] == \
    [((1, 2, -1, -2),), ((1, 2, 1, 2, 2),), ()]
assert lgd.max_valency == 1
print("letter graph ok")

# 9. the exponent scan and the toy rewriting
assert minimal_exponent(F(15, 512)) == 2078
assert not exponent_inequality_holds(F(15, 512), 2077)
assert exponent_inequality_holds(F(15, 512), 2078)
assert minimal_exponent(F(1, 34)) == 2346

z2c = Presentation(("a", "b"), [W("a b a^-1 b^-1")], F(1, 3)).symmetrize()
spec = embed_into_finitely_generated(z2c, 1, M=3, relaxed=True)
assert not spec.exponent_ok
assert spec.psi_lengths == {"a": 25, "b": 31}
assert spec.certificates == ({"orbit": 0, "m": 3, "lengths": (25, 31),
                              "relator_length": 4},)
assert spec.emitted == (0,) and not spec.skipped
pa = spec.psi_word("a")
assert len(pa) == 25 and pa[:4] == (1, 1, 1, 3)
pb = spec.psi_word("b")
assert len(pb) == 31 and pb[:5] == (1, 1, 1, 1, 3)
assert reduce(pa) == pa and reduce(pb) == pb
ppa = spec.psi_word("a", primed=True)
assert ppa[:4] == (5, 5, 5, 7)
hrel = spec.presentation.orbits[0]
assert is_cyclically_reduced(hrel)
assert len(hrel) == 212
assert spec.output_certified is False
# the joining relators overlap their own inverses along the junction
# palindrome, so the unsplit table fails 1/M by design; the split check
# must confirm both halves exactly
chk = spec.basis_piece_check()
rep = chk["full_report"]
assert rep.max_piece_length == 30 and rep.lambda_verdict is False
assert chk["self_exact"]
assert chk["letters"]["a"] == {"length": 50, "self_piece": 24,
                               "self_predicted": 24}
assert chk["letters"]["b"] == {"length": 62, "self_piece": 30,
                               "self_predicted": 30}
assert chk["cross_ok"]
assert chk["max_cross_piece"] == 9

f34 = generate_family(140).with_lambda(F(1, 34))
spec34 = embed_into_finitely_generated(f34, 1, cap=10_000)
assert spec34.M == 2346 and spec34.exponent_ok
assert spec34.emitted == () and len(spec34.skipped) == 1
assert spec34.vacuous and spec34.output_certified
assert spec34.psi_lengths["a"] == 2 * (0 + 2346 + 1) * 2346 + 1
assert spec34.psi_lengths["b"] == 2 * (1 + 2346 + 1) * 2346 + 1
assert spec34.certificates[0]["m"] == 2346
assert spec34.certificates[0]["lengths"] == (
    2 * 2347 * 2346 + 1, 2 * 2348 * 2346 + 1)

try:
    embed_into_finitely_generated(z2c, 0, M=3, relaxed=True)
    raise SystemExit("valency 1 > N=0 should have been rejected")
except ValencyExceeded:
    pass
try:
    embed_into_finitely_generated(pd, 2, M=3, relaxed=True)
    raise SystemExit("disconnected letter graph should have been rejected")
except InvariantViolation:
    pass
try:
    embed_into_finitely_generated(p8, 2, M=3, relaxed=True)
    raise SystemExit("p8 fails its own condition, embed should refuse")
except NotSmallCancellation:
    pass
try:
    embed_into_finitely_generated(z2c, 1, M=3)
    raise SystemExit("failing exponent needs relaxed=True")
except InvariantViolation:
    pass
print("embed ok")

print("ALL PROPERARRAY SMOKE OK")
