# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Two quadratic sweeps dominate the test suite: the brute-force all-pairs
piece oracle over symmetrized relator sets, and the exhaustive pair sweep
of Dehn triviality against folded-region equality. Both work on packed
byte buffers so the inner loops never touch Python objects.

Word encoding: one byte per letter, generator k (1-based) -> 2*(k-1),
inverse -> 2*(k-1)+1; x^1 flips a letter's sign.
"""

from libc.string cimport memcpy

IMPL = "cython"


def all_pairs_max_lcp(const unsigned char[::1] data, const long long[::1] offsets):
    """Max LCP over all unordered pairs of packed words; see pure twin."""
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t best = 0, bi = -1, bj = -1
    cdef Py_ssize_t i, j, k, m, si, sj, li, lj
    cdef const unsigned char *buf = NULL
    if data.shape[0] > 0:
        buf = &data[0]
    if n >= 2:
        bi, bj = 0, 1
    for i in range(n):
        si = offsets[i]
        li = offsets[i + 1] - si
        for j in range(i + 1, n):
            sj = offsets[j]
            lj = offsets[j + 1] - sj
            m = li if li < lj else lj
            if m <= best:
                continue
            k = 0
            while k < m and buf[si + k] == buf[sj + k]:
                k += 1
            if k > best:
                best = k
                bi = i
                bj = j
    return best, bi, bj


def dehn_identity_batch(const unsigned char[::1] data,
                        const long long[::1] offsets,
                        const signed char[::1] rule,
                        int alphabet_size,
                        const int[::1] class_ids):
    """Exhaustive stack-Dehn vs class-id sweep; see pure twin for contract."""
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef int L = alphabet_size
    cdef long long mism = 0
    cdef Py_ssize_t fi = -1, fj = -1
    cdef unsigned char base[64]
    cdef unsigned char stack[64]
    cdef Py_ssize_t i, j, k, nb, sp
    cdef int cur, t, ci
    cdef signed char r
    cdef const unsigned char *buf = NULL
    if data.shape[0] > 0:
        buf = &data[0]
    for i in range(n):
        nb = 0
        for k in range(offsets[i], offsets[i + 1]):
            cur = buf[k]
            while True:
                if nb == 0:
                    base[0] = <unsigned char> cur
                    nb = 1
                    break
                t = base[nb - 1]
                if t == (cur ^ 1):
                    nb -= 1
                    break
                r = rule[t * L + cur]
                if r >= 0:
                    nb -= 1
                    cur = r
                    continue
                base[nb] = <unsigned char> cur
                nb += 1
                break
        ci = class_ids[i]
        for j in range(n):
            sp = nb
            if nb > 0:
                memcpy(stack, base, nb)
            for k in range(offsets[j + 1] - 1, offsets[j] - 1, -1):
                cur = buf[k] ^ 1
                while True:
                    if sp == 0:
                        stack[0] = <unsigned char> cur
                        sp = 1
                        break
                    t = stack[sp - 1]
                    if t == (cur ^ 1):
                        sp -= 1
                        break
                    r = rule[t * L + cur]
                    if r >= 0:
                        sp -= 1
                        cur = r
                        continue
                    stack[sp] = <unsigned char> cur
                    sp += 1
                    break
            if (sp == 0) != (ci == class_ids[j]):
                if mism == 0:
                    fi = i
                    fj = j
                mism += 1
    return mism, fi, fj
