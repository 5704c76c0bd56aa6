"""Words in a free group, stored as tuples of nonzero signed integers.

Letter k > 0 is the k-th generator, -k its inverse (generators are 1-based).
Words are kept freely reduced at all times; every constructor reduces eagerly.
"""

from typing import Iterable, NamedTuple, Sequence, Tuple

from .errors import ParseError

Word = Tuple[int, ...]

EMPTY: Word = ()


class Letter(NamedTuple):
    generator_index: int  # 1-based
    sign: int  # +1 or -1

    @property
    def value(self) -> int:
        return self.generator_index * self.sign


def letter(value: int) -> Letter:
    assert value != 0
    return Letter(abs(value), 1 if value > 0 else -1)


def reduce(letters: Iterable[int]) -> Word:
    """Freely reduce. Cancellation is handled with a stack in one pass."""
    out = []
    for x in letters:
        assert x != 0
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*ws: Word) -> Word:
    """Product with free reduction."""
    out = []
    for w in ws:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def cyclic_reduce(w: Word) -> Word:
    w = reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def is_cyclically_reduced(w: Word) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def cyclic_shifts(w: Word):
    for i in range(len(w)):
        yield w[i:] + w[:i]


def shift(w: Word, i: int) -> Word:
    i %= len(w)
    return w[i:] + w[:i]


def common_prefix_length(u: Word, v: Word) -> int:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


# ---------------------------------------------------------------------------
# Text form. Generators are named; single-letter names may be juxtaposed,
# with uppercase for the inverse and caret powers: "abA", "a b^3 a^-1".
# ---------------------------------------------------------------------------


def _letter_value(name: str, gen_names: Sequence[str]) -> int:
    if name in gen_names:
        return gen_names.index(name) + 1
    if name.lower() in gen_names and name != name.lower():
        return -(gen_names.index(name.lower()) + 1)
    raise ParseError(f"unknown generator {name!r}")


def parse_word(text: str, gen_names: Sequence[str]) -> Word:
    """Parse a word; tokens are whitespace-separated or juxtaposed letters."""
    letters = []
    for token in text.split():
        i = 0
        while i < len(token):
            ch = token[i]
            if not ch.isalpha():
                raise ParseError(f"unexpected character {ch!r} in {token!r}")
            i += 1
            power = 1
            if i < len(token) and token[i] == "^":
                i += 1
                j = i
                if j < len(token) and token[j] == "-":
                    j += 1
                while j < len(token) and token[j].isdigit():
                    j += 1
                if j == i or token[j - 1] == "-":
                    raise ParseError(f"bad power in {token!r}")
                power = int(token[i:j])
                i = j
            val = _letter_value(ch, gen_names)
            if power < 0:
                val, power = -val, -power
            letters.extend([val] * power)
    return reduce(letters)


def format_word(w: Word, gen_names: Sequence[str]) -> str:
    """Inverse of parse_word, with run-length caret powers."""
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        name = gen_names[abs(w[i]) - 1]
        if w[i] < 0:
            if len(name) == 1 and name.upper() != name:
                name = name.upper()
            else:
                name += "^-1"
        run = j - i
        parts.append(name if run == 1 else f"{name}^{run}")
        i = j
    return " ".join(parts)


def word_to_bytes(w: Word) -> bytes:
    """Byte encoding for the piece kernels: gen k -> 2(k-1), inverse -> 2(k-1)+1.

    Byte order equals the letter order a < a^-1 < b < b^-1 < ... used for
    lexicographic tie-breaks. Alphabets of more than 128 generators are out
    of scope.
    """
    out = bytearray()
    for x in w:
        b = 2 * (abs(x) - 1) + (0 if x > 0 else 1)
        if b > 255:
            raise ParseError("alphabet too large for byte encoding")
        out.append(b)
    return bytes(out)


def bytes_to_word(bs: bytes) -> Word:
    return tuple((b // 2 + 1) * (1 if b % 2 == 0 else -1) for b in bs)
