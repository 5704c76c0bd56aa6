"""Timing comparison of the compiled piece/Dehn kernels vs the pure fallback.

Two workloads, both exactly the shapes the test oracles run:

  lcp    all-pairs longest-common-prefix over the symmetrized shifts of
         the a b a b^2 ... a b^n family (the brute-force piece oracle)
  dehn   exhaustive ordered-pair stack-Dehn sweep on <a,b,c | abc>
         reduced words, verified against the folded-ball classes

Both implementations are imported directly, so the SC_ARRAYS_FORCE_PURE
switch is irrelevant here; results are asserted equal before timing is
reported.

Run:  python3 benchmarks/bench_kernels.py [--full]
"""

import argparse
import time
from array import array
from fractions import Fraction

from sc_arrays import _pure_kernels
from sc_arrays.cayley import build_region
from sc_arrays.kernels import pack_words
from sc_arrays.presentation import Presentation, generate_family
from sc_arrays.words import word_to_bytes

try:
    from sc_arrays import _kernels
except ImportError:
    _kernels = None


def lcp_workload(n):
    fam = generate_family(n).symmetrize()
    words = [word_to_bytes(w) for w in fam.relators]
    data, offsets = pack_words(words)
    return data, offsets, len(words)


def dehn_workload(max_len):
    p = Presentation(("a", "b", "c"), [(1, 2, 3)], Fraction(1, 8),
                     symmetrized=True)
    reg = build_region(p, max_len, backend="ball")
    L = 6
    rule = array("b", [-1]) * (L * L)
    for x, y, z in p.relators:
        def enc(v):
            return 2 * (abs(v) - 1) + (0 if v > 0 else 1)
        rule[enc(x) * L + enc(y)] = enc(z) ^ 1
    words = [()]
    frontier = [()]
    letters = [1, -1, 2, -2, 3, -3]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for v in letters:
                if w and w[-1] == -v:
                    continue
                nxt.append(w + (v,))
        words.extend(nxt)
        frontier = nxt
    canon = {}
    class_ids = array("i")
    for w in words:
        c = reg.resolve(w)
        class_ids.append(canon.setdefault(c, len(canon)))
    data, offsets = pack_words([word_to_bytes(w) for w in words])
    return data, offsets, rule, L, class_ids, len(words)


def best_of(fn, repeats=3):
    best = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None or dt < best else best
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--full", action="store_true",
                    help="larger inputs (slower pure runs)")
    args = ap.parse_args()
    fam_n = 28 if args.full else 20
    dehn_len = 5 if args.full else 4

    impls = [("pure", _pure_kernels)]
    if _kernels is not None:
        impls.insert(0, ("cython", _kernels))

    data, offsets, count = lcp_workload(fam_n)
    print("lcp: family(%d), %d symmetrized words, %d bytes packed"
          % (fam_n, count, len(data)))
    results = {}
    for name, mod in impls:
        dt, out = best_of(lambda m=mod: m.all_pairs_max_lcp(data, offsets),
                          repeats=3 if name == "cython" else 1)
        results[name] = out
        print("  %-7s %8.3fs   max_lcp=%d witness=(%d,%d)"
              % (name, dt, *out))
    if len(results) == 2:
        assert results["cython"] == results["pure"], results
        print("  agreement: ok")

    data, offsets, rule, L, class_ids, count = dehn_workload(dehn_len)
    print("dehn: %d reduced words of length <= %d, %d ordered pairs"
          % (count, dehn_len, count * count))
    results = {}
    for name, mod in impls:
        dt, out = best_of(
            lambda m=mod: m.dehn_identity_batch(data, offsets, rule, L,
                                                class_ids),
            repeats=3 if name == "cython" else 1)
        results[name] = out
        print("  %-7s %8.3fs   mismatches=%d" % (name, dt, out[0]))
        assert out[0] == 0, out
    if len(results) == 2:
        assert results["cython"] == results["pure"], results
        print("  agreement: ok")


if __name__ == "__main__":
    main()
