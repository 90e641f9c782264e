"""Tags, nested words and the positional utilities shared by every module.

A word is a tuple of :class:`Tag`.  Plain tuples are accepted everywhere;
:class:`NestedWord` is the validated (well-nested) flavour returned by the
parser.  Text syntax is a concatenation of ``<label>`` and ``</label>``
tokens, whitespace between tokens is ignored.
"""

from __future__ import annotations

import re
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Sequence

LABEL_RE = re.compile(r"[A-Za-z0-9_]+")
_TOKEN_RE = re.compile(r"<(/?)([A-Za-z0-9_]+)>")


class NotWellNested(ValueError):
    pass


class Tag(NamedTuple):
    label: str
    opening: bool

    @property
    def closing(self) -> bool:
        return not self.opening

    def __str__(self) -> str:
        return f"<{self.label}>" if self.opening else f"</{self.label}>"

    def __repr__(self) -> str:
        return f"Tag({self})"


def op(label: str) -> Tag:
    return Tag(label, True)


def cl(label: str) -> Tag:
    return Tag(label, False)


Word = tuple  # tuple[Tag, ...]


class NestedWord(tuple):
    """An immutable, well-nested sequence of tags."""

    def __new__(cls, tags: Iterable[Tag] = ()):
        tags = tuple(tags)
        if not is_well_nested(tags):
            raise NotWellNested(f"not well-nested: {format_word(tags)}")
        return super().__new__(cls, tags)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"NestedWord({format_word(self)!r})"


def is_well_nested(seq: Sequence[Tag]) -> bool:
    stack = []
    for tag in seq:
        if tag.opening:
            stack.append(tag.label)
        elif not stack or stack.pop() != tag.label:
            return False
    return not stack


def _require(w: Sequence[Tag]) -> None:
    if not is_well_nested(w):
        raise NotWellNested(f"not well-nested: {format_word(w)}")


def matching(w: Sequence[Tag]) -> list[int | None]:
    """Index of the associated tag for every position (None if unmatched).

    Matching is by position only; labels are not compared.
    """
    partner: list[int | None] = [None] * len(w)
    stack: list[int] = []
    for i, tag in enumerate(w):
        if tag.opening:
            stack.append(i)
        elif stack:
            j = stack.pop()
            partner[i] = j
            partner[j] = i
    return partner


def unmatched(w: Sequence[Tag]) -> tuple[list[int], list[int]]:
    """Positions of unmatched opening and unmatched closing tags."""
    partner = matching(w)
    opens = [i for i, t in enumerate(w) if t.opening and partner[i] is None]
    closes = [i for i, t in enumerate(w) if t.closing and partner[i] is None]
    return opens, closes


def is_rooted(w: Sequence[Tag]) -> bool:
    _require(w)
    if not w:
        return False
    return matching(w)[0] == len(w) - 1


def depth(w: Sequence[Tag]) -> int:
    _require(w)
    best = level = 0
    for tag in w:
        if tag.opening:
            level += 1
            best = max(best, level)
        else:
            level -= 1
    return best


def last_rooted_start(prefix: Sequence[Tag]) -> int:
    """Start index of the rooted substring ending at the final closing tag."""
    if not prefix or prefix[-1].opening:
        raise ValueError("prefix must end in a closing tag")
    level = 0
    for i in range(len(prefix) - 1, -1, -1):
        level += -1 if prefix[i].opening else 1
        if level == 0:
            if prefix[i].label != prefix[-1].label:
                raise NotWellNested("label mismatch at the final closing tag")
            return i
    raise ValueError("final closing tag is unmatched")


def last_rooted_suffix(prefix: Sequence[Tag]) -> NestedWord:
    return NestedWord(prefix[last_rooted_start(prefix):])


def encode_flat(v: Iterable[str]) -> NestedWord:
    tags = []
    for symbol in v:
        tags += [op(symbol), cl(symbol)]
    return NestedWord(tags)


def labels(w: Iterable[Tag]) -> set[str]:
    return {t.label for t in w}


def parse_word(text: str, alphabet: Iterable[str] | None = None) -> NestedWord:
    """Parse the ``<a></a>`` syntax; whitespace between tokens is ignored."""
    tags = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ValueError(f"bad tag syntax at offset {pos}: {text[pos:pos + 12]!r}")
        tags.append(Tag(m.group(2), m.group(1) == ""))
        pos = m.end()
    if alphabet is not None:
        extra = labels(tags) - set(alphabet)
        if extra:
            raise ValueError(f"labels outside the alphabet: {sorted(extra)}")
    return NestedWord(tags)


def parse_tags(text: str) -> tuple[Tag, ...]:
    """Parse tag syntax without requiring well-nestedness."""
    return tuple(Tag(m.group(2), m.group(1) == "") for m in _tokens(text))


def _tokens(text: str) -> Iterator[re.Match]:
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ValueError(f"bad tag syntax at offset {pos}: {text[pos:pos + 12]!r}")
        yield m
        pos = m.end()


def format_word(w: Iterable[Tag]) -> str:
    return "".join(str(t) for t in w)


def word_sort_key(w: Sequence[Tag]) -> tuple[int, str]:
    """Shortest first, then lexicographic over the serialized form."""
    return (len(w), format_word(w))


def well_nested_words(alphabet: Iterable[str], max_len: int) -> Iterator[tuple[Tag, ...]]:
    """All well-nested words of length <= max_len, shortest first."""
    alphabet = sorted(alphabet)
    for n in range(0, max_len + 1, 2):
        yield from _balanced(alphabet, n // 2)


def _balanced(alphabet: list[str], pairs: int) -> Iterator[tuple[Tag, ...]]:
    if pairs == 0:
        yield ()
        return
    # first tree holds k+1 pairs, the rest of the forest pairs-k-1
    for k in range(pairs):
        for inner in _balanced(alphabet, k):
            for rest in _balanced(alphabet, pairs - 1 - k):
                for a in alphabet:
                    yield (op(a),) + inner + (cl(a),) + rest


def all_tag_sequences(alphabet: Iterable[str], max_len: int) -> Iterator[tuple[Tag, ...]]:
    tags = [Tag(a, o) for a in sorted(alphabet) for o in (True, False)]
    for n in range(max_len + 1):
        yield from product(tags, repeat=n)
