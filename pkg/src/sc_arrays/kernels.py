"""Kernel selection: compiled extension when built, pure Python otherwise.

SC_ARRAYS_FORCE_PURE=1 skips the extension (used by the benchmark and by
tests pinning pure/compiled agreement).
"""

import os
from array import array

if os.environ.get("SC_ARRAYS_FORCE_PURE") == "1":
    from . import _pure_kernels as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure_kernels as _impl

IMPL = _impl.IMPL
COMPILED = IMPL == "cython"


def pack_words(words):
    """Concatenate byte-encoded words into (data, offsets) for the kernels."""
    offsets = array("q", [0])
    total = 0
    for w in words:
        total += len(w)
        offsets.append(total)
    return b"".join(words), offsets


def all_pairs_max_lcp(data, offsets):
    return _impl.all_pairs_max_lcp(data, offsets)


def dehn_identity_batch(data, offsets, rule, alphabet_size, class_ids):
    if not isinstance(rule, array):
        rule = array("b", rule)
    if not isinstance(class_ids, array):
        class_ids = array("i", class_ids)
    return _impl.dehn_identity_batch(data, offsets, rule, alphabet_size, class_ids)
