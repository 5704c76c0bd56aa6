"""Exact sparse vectors over contour, edge, or vertex index sets."""

from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Tuple

DOMAINS = ("contours", "edges", "vertices", "product")


class SparseVector:
    """Finitely supported rational vector; zero entries are never stored.

    Keys are opaque hashables (contour keys, edge keys, or vertex words);
    the domain tag only guards against mixing index sets in arithmetic.
    """

    __slots__ = ("domain", "_items")

    def __init__(self, domain: str, items: Mapping = ()):
        if domain not in DOMAINS:
            raise ValueError("unknown domain %r" % (domain,))
        self.domain = domain
        clean: Dict = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for k, v in pairs:
            v = Fraction(v)
            if v:
                clean[k] = v
        self._items = clean

    @classmethod
    def zero(cls, domain: str) -> "SparseVector":
        return cls(domain)

    def get(self, key) -> Fraction:
        return self._items.get(key, Fraction(0))

    def items(self) -> Iterable[Tuple[object, Fraction]]:
        return self._items.items()

    def support(self):
        return frozenset(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def _check(self, other: "SparseVector") -> None:
        if not isinstance(other, SparseVector):
            raise TypeError("expected SparseVector")
        if other.domain != self.domain:
            raise ValueError("domain mismatch: %s vs %s"
                             % (self.domain, other.domain))

    def __add__(self, other: "SparseVector") -> "SparseVector":
        self._check(other)
        out = dict(self._items)
        for k, v in other._items.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return SparseVector(self.domain, out)

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        self._check(other)
        out = dict(self._items)
        for k, v in other._items.items():
            s = out.get(k, 0) - v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return SparseVector(self.domain, out)

    def scale(self, c) -> "SparseVector":
        c = Fraction(c)
        if not c:
            return SparseVector(self.domain)
        return SparseVector(self.domain,
                            {k: c * v for k, v in self._items.items()})

    def pointwise_max(self, other: "SparseVector") -> "SparseVector":
        """Entrywise max; exact only when both vectors are nonnegative."""
        self._check(other)
        out = dict(self._items)
        for k, v in other._items.items():
            if v > out.get(k, 0):
                out[k] = v
        return SparseVector(self.domain, out)

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self._items.values()), Fraction(0))

    def l2_squared(self) -> Fraction:
        return sum((v * v for v in self._items.values()), Fraction(0))

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._items.values())

    def map_keys(self, fn: Callable) -> "SparseVector":
        out: Dict = {}
        for k, v in self._items.items():
            nk = fn(k)
            if nk in out:
                raise ValueError("key map is not injective at %r" % (nk,))
            out[nk] = v
        return SparseVector(self.domain, out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseVector) and self.domain == other.domain
                and self._items == other._items)

    def __hash__(self):
        return hash((self.domain, frozenset(self._items.items())))

    def __repr__(self):
        return "SparseVector(%s, %d entries, l1=%s)" % (
            self.domain, len(self._items), self.l1())
