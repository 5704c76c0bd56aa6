"""Suffix automaton over a sequence of hashable symbols.

One automaton indexes one word; streaming a pattern through it yields, for
every pattern position, the longest factor of the indexed word ending
there. The piece computation, the Dehn subword search, and contour
discovery all reduce to such streams over doubled (cyclic) relators.
"""

from typing import Iterable, Iterator, List, Optional, Tuple


class SuffixAutomaton:
    __slots__ = ("trans", "link", "length", "first_end", "is_clone",
                 "n_symbols", "_min2")

    def __init__(self, seq: Iterable):
        self.trans: List[dict] = [{}]
        self.link: List[int] = [-1]
        self.length: List[int] = [0]
        # end position (0-based, inclusive) of one occurrence of the state's
        # longest word; valid for every length the state represents
        self.first_end: List[int] = [-1]
        self.is_clone: List[bool] = [False]
        self.n_symbols = 0
        self._min2: Optional[Tuple[List[int], List[int]]] = None
        last = 0
        for c in seq:
            last = self._extend(c, last)
            self.n_symbols += 1

    def _new_state(self, length, link, first_end, clone):
        self.trans.append({})
        self.link.append(link)
        self.length.append(length)
        self.first_end.append(first_end)
        self.is_clone.append(clone)
        return len(self.length) - 1

    def _extend(self, c, last):
        trans, link, length = self.trans, self.link, self.length
        cur = self._new_state(length[last] + 1, 0, length[last], False)
        p = last
        while p != -1 and c not in trans[p]:
            trans[p][c] = cur
            p = link[p]
        if p != -1:
            q = trans[p][c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = self._new_state(length[p] + 1, link[q],
                                        self.first_end[q], True)
                self.trans[clone] = dict(trans[q])
                while p != -1 and trans[p].get(c) == q:
                    trans[p][c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        return cur

    def iter_matches(self, pattern: Iterable, cap: Optional[int] = None
                     ) -> Iterator[Tuple[int, int, int]]:
        """Yield (pattern_index, match_len, word_end) per pattern position.

        match_len is the length of the longest factor of the indexed word
        ending at this pattern position (at most cap when given); word_end
        is the end position of one of its occurrences, -1 for no match.
        """
        trans, link, length, first_end = (self.trans, self.link, self.length,
                                          self.first_end)
        v, l = 0, 0
        for idx, c in enumerate(pattern):
            while v != 0 and c not in trans[v]:
                v = link[v]
                l = length[v]
            nxt = trans[v].get(c)
            if nxt is not None:
                v = nxt
                l += 1
            else:
                l = 0
            if cap is not None and l > cap:
                l = cap
                while length[link[v]] >= l:
                    v = link[v]
            yield idx, l, (first_end[v] if l > 0 else -1)

    def longest_match(self, pattern: Iterable, cap: Optional[int] = None
                      ) -> Tuple[int, int, int]:
        """Longest factor of the indexed word occurring in pattern.

        Returns (length, pattern_end, word_end); (0, -1, -1) if none.
        First maximum wins, so results are deterministic.
        """
        best = (0, -1, -1)
        for idx, l, we in self.iter_matches(pattern, cap):
            if l > best[0]:
                best = (l, idx, we)
        return best

    def two_smallest_ends(self) -> Tuple[List[int], List[int]]:
        """Per state, the two smallest occurrence end positions.

        min2[v] is a large sentinel when the state's words occur once.
        endpos sets are aggregated up the suffix-link tree.
        """
        if self._min2 is not None:
            return self._min2
        nstates = len(self.length)
        inf = self.n_symbols + 1
        min1 = [inf] * nstates
        min2 = [inf] * nstates
        for v in range(1, nstates):
            if not self.is_clone[v]:
                min1[v] = self.first_end[v]
        order = sorted(range(1, nstates), key=self.length.__getitem__,
                       reverse=True)
        for v in order:
            p = self.link[v]
            a, b = min1[v], min2[v]
            # merge {a, b} into parent's two smallest, skipping duplicates
            for x in (a, b):
                if x >= inf:
                    break
                if x == min1[p] or x == min2[p]:
                    continue
                if x < min1[p]:
                    min1[p], min2[p] = x, min1[p]
                elif x < min2[p]:
                    min2[p] = x
        self._min2 = (min1, min2)
        return self._min2
