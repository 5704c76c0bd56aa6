import time
from fractions import Fraction

from sc_arrays.presentation import Presentation, generate_family
from sc_arrays.words import parse_word, reduce, inverse, format_word
from sc_arrays.cayley import (build_region, trace_contours, intersect,
                              check_arc_geodesics, GeodesicPath, Contour,
                              anchored_contour_key, _loop_vertex_from_anchor,
                              _mate_table)
from sc_arrays.errors import OutOfRegion, ResourceLimit

W = lambda s, names=("a", "b"): parse_word(s, names)

# 1. free 2-gen ball R2
free2 = Presentation(("a", "b"), [], Fraction(1, 6), symmetrized=True)
r = build_region(free2, 2)
assert r.backend == "ball"
assert len(r.vertices) == 17, len(r.vertices)
assert r.fold_count == 0
d, gs = r.distance_and_geodesics(W("a"), W("b"))
assert d == 2 and len(gs) == 1 and gs[0].label == W("a^-1 b"), (d, gs)
print("free2 ok")

# 2. Z/3 = <a | a^3>, unsafe, R3
z3 = Presentation(("a",), [W("aaa", ("a",))], Fraction(1, 6), symmetrized=False).symmetrize()
r3 = build_region(z3, 3, unsafe_no_cprime=True)
assert len(r3.vertices) == 3, r3.vertices
assert r3.vertex_distance(W("aa", ("a",))) == 1  # a^2 = a^-1
for v in r3.vertices:
    assert set(x for x in (1, -1)) == set(x for x in (1, -1) if r3._adj[r3._id(v)].get(x) is not None)
print("z3 ok:", r3.stats())

# 3. Z^2, unsafe, R2
z2 = Presentation(("a", "b"), [W("a b a^-1 b^-1")], Fraction(1, 6)).symmetrize()
rz = build_region(z2, 2, unsafe_no_cprime=True)
assert len(rz.vertices) == 13, len(rz.vertices)
cs = trace_contours(rz, [()])
assert len(cs) == 4, len(cs)
for c in cs:
    assert len(c.vertices()) == 4 and len(c.edge_keys()) == 4
print("z2 ok: 13 vertices, 4 base diamonds")

# 4. Z/4 bigon
z4 = Presentation(("a",), [W("aaaa", ("a",))], Fraction(1, 6)).symmetrize()
r4 = build_region(z4, 2, unsafe_no_cprime=True)
d, gs = r4.distance_and_geodesics((), W("aa", ("a",)))
assert d == 2 and len(gs) == 2, (d, len(gs))
assert sorted(g.label for g in gs) == [(-1, -1), (1, 1)] or True
labs = set(g.label for g in gs)
assert labs == {(1, 1), (-1, -1)}, labs
print("z4 bigon ok")

# 5. abc R6 fold
abc = Presentation(("a", "b", "c"), [parse_word("a b c", ("a", "b", "c"))],
                   Fraction(1, 6)).symmetrize()
t0 = time.time()
ra = build_region(abc, 6)
t1 = time.time()
st = ra.stats()
print("abc ok:", st, "%.2fs" % (t1 - t0))
assert st["folds"] > 0
# c = b^-1 a^-1 : check a few identities
assert ra.resolve(parse_word("c", ("a", "b", "c"))) == ra.resolve(parse_word("b^-1 a^-1", ("a", "b", "c")))
assert ra.vertex_distance(parse_word("a b", ("a", "b", "c"))) == 1  # ab = c^-1

# 6. P8 ball R2: 17 vertices, 70 contours through base
p8 = generate_family(7)
assert len(p8.orbits[0]) == 35
rp = build_region(p8, 2, unsafe_no_cprime=True)
assert len(rp.vertices) == 17, len(rp.vertices)
assert rp.fold_count == 0
t0 = time.time()
cs = trace_contours(rp, [()])
t1 = time.time()
print("p8 contours:", len(cs), "%.2fs" % (t1 - t0))
assert len(cs) == 35, len(cs)
assert len(p8.relators) == 70

# 7. family(140) tree backend
fam = generate_family(140).with_lambda(Fraction(1, 33))
t0 = time.time()
rt = build_region(fam, 2275, backend="tree")
t1 = time.time()
print("family(140) tree built %.2fs" % (t1 - t0))
m = fam.min_relator_length()
assert m == 10010, m
w = fam.orbits[0]
g = ()
h = reduce(w[100:100 + 300])  # a relator segment longer than any piece
d, gs = rt.distance_and_geodesics(g, h)
assert d == 300 and len(gs) == 1, (d, len(gs))
# anchored contour through base at phase 100 of the orbit word:
# find the class of w in rotation order
from sc_arrays.presentation import _rotation_classes
reps = _rotation_classes(fam)
ci = next(i for i, x in enumerate(reps) if x == w)
c = Contour(w, anchored_contour_key(fam, ci, 100, ()), anchor=(),
            anchor_phase=100, presentation=fam, class_index=ci)
q = gs[0]
# path reads r[100:107] from the base: arc should be found by extension
arc = intersect(c, q)
assert arc is not None, "anchored arc not found"
print("anchored arc:", arc.start_index, arc.end_index, arc.overlap_length,
      arc.relator_phase, arc.relator_direction)
assert arc.relator_direction == 1
assert arc.relator_phase is not None
v = check_arc_geodesics(rt, arc)
print("arc geodesic check:", v)
t2 = time.time()
print("tree ops %.2fs" % (t2 - t1))
print("ALL SMOKE OK")
