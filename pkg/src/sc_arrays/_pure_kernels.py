"""Pure-Python implementations of the compiled kernels.

Same signatures as _kernels.pyx. Correct but slow on large inputs;
sc_arrays.kernels picks whichever is available (SC_ARRAYS_FORCE_PURE=1
forces these).

Word encoding throughout: one byte per letter, generator k (1-based) maps to
2*(k-1) and its inverse to 2*(k-1)+1, so x^1 flips a letter's sign.
"""

IMPL = "pure"


def all_pairs_max_lcp(data, offsets):
    """Max longest-common-prefix over all unordered pairs of packed words.

    `data` is a bytes-like concatenation of n words, `offsets` a sequence of
    n+1 start offsets (offsets[n] == len(data)). Returns (max_len, i, j) with
    i < j a witness pair, or (0, -1, -1) when n < 2. Distinctness is by
    index; callers pass de-duplicated word sets.
    """
    n = len(offsets) - 1
    best, bi, bj = 0, -1, -1
    if n >= 2:
        bi, bj = 0, 1
    for i in range(n):
        si, ei = offsets[i], offsets[i + 1]
        li = ei - si
        for j in range(i + 1, n):
            sj = offsets[j]
            lj = offsets[j + 1] - sj
            m = li if li < lj else lj
            if m <= best:
                continue
            k = 0
            while k < m and data[si + k] == data[sj + k]:
                k += 1
            if k > best:
                best, bi, bj = k, i, j
    return best, bi, bj


def dehn_identity_batch(data, offsets, rule, alphabet_size, class_ids):
    """Exhaustive pair sweep of stack-Dehn triviality vs expected classes.

    Specialised to presentations whose symmetrized relators all have length 3
    and share no piece: every majority subword then has length 2 and the
    replacement table `rule` (flattened alphabet_size x alphabet_size, -1 for
    no rule) is conflict-free. For every ordered pair (i, j) the word
    u_i * u_j^-1 is pushed through a reducing stack (free cancellation plus
    rule rewrites); emptiness of the stack is compared against
    class_ids[i] == class_ids[j]. Returns (mismatches, first_i, first_j).
    """
    n = len(offsets) - 1
    L = alphabet_size
    mism, fi, fj = 0, -1, -1
    stack = [0] * 64
    for i in range(n):
        base = []
        for k in range(offsets[i], offsets[i + 1]):
            cur = data[k]
            while True:
                if not base:
                    base.append(cur)
                    break
                t = base[-1]
                if t == cur ^ 1:
                    base.pop()
                    break
                r = rule[t * L + cur]
                if r >= 0:
                    base.pop()
                    cur = r
                    continue
                base.append(cur)
                break
        nb = len(base)
        ci = class_ids[i]
        for j in range(n):
            sp = nb
            stack[:nb] = base
            for k in range(offsets[j + 1] - 1, offsets[j] - 1, -1):
                cur = data[k] ^ 1
                while True:
                    if sp == 0:
                        stack[sp] = cur
                        sp = 1
                        break
                    t = stack[sp - 1]
                    if t == cur ^ 1:
                        sp -= 1
                        break
                    r = rule[t * L + cur]
                    if r >= 0:
                        sp -= 1
                        cur = r
                        continue
                    stack[sp] = cur
                    sp += 1
                    break
            if (sp == 0) != (ci == class_ids[j]):
                if mism == 0:
                    fi, fj = i, j
                mism += 1
    return mism, fi, fj
