import pytest
from hypothesis import given, strategies as st

from nwgames.words import (NestedWord, NotWellNested, Tag, cl, depth, encode_flat, format_word,
                           is_rooted, is_well_nested, last_rooted_start, last_rooted_suffix,
                           matching, op, parse_tags, parse_word, unmatched, well_nested_words,
                           word_sort_key)
from oracles import balanced, nested_words, tag_sequences

labels = st.sampled_from(["a", "b", "c1", "x_y"])


@st.composite
def nested(draw, max_pairs=6):
    n = draw(st.integers(0, max_pairs))
    out, stack = [], []
    left = n
    while left or stack:
        if left and (not stack or draw(st.booleans())):
            a = draw(labels)
            out.append(op(a))
            stack.append(a)
            left -= 1
        else:
            out.append(cl(stack.pop()))
    return NestedWord(out)


def test_parse_and_format():
    w = parse_word("<a> <b></b>\n</a>")
    assert w == (op("a"), op("b"), cl("b"), cl("a"))
    assert format_word(w) == "<a><b></b></a>"
    assert str(op("a")) == "<a>" and str(cl("a")) == "</a>"
    assert parse_word("") == ()


def test_parse_rejects_garbage_and_unbalanced():
    with pytest.raises(ValueError):
        parse_word("<a>x</a>")
    with pytest.raises(NotWellNested):
        parse_word("<a></b>")
    with pytest.raises(NotWellNested):
        parse_word("<a>")
    with pytest.raises(ValueError):
        parse_word("<c></c>", alphabet={"a", "b"})
    assert parse_tags("</a><a>") == (cl("a"), op("a"))


@given(nested())
def test_format_parse_round_trip(w):
    assert parse_word(format_word(w)) == w


def test_well_nested_matches_brute_force():
    seqs = list(tag_sequences({"a", "b"}, 6))
    assert all(is_well_nested(s) == balanced(s) for s in seqs)


def test_generator_counts():
    # Catalan(n) * 2^n words of length 2n over two labels: 1, 2, 8, 40, 224
    counts = [sum(1 for w in well_nested_words({"a", "b"}, 8) if len(w) == 2 * n) for n in range(5)]
    assert counts == [1, 2, 8, 40, 224]
    assert set(well_nested_words({"a", "b"}, 6)) == set(nested_words({"a", "b"}, 6))


@given(nested())
def test_matching_pairs_are_consistent(w):
    m = matching(w)
    for i, j in enumerate(m):
        assert m[j] == i
        assert w[i].label == w[j].label and w[i].opening != w[j].opening


def test_unmatched_and_rooted():
    assert unmatched(parse_tags("</a><b></b><c>")) == ([3], [0])
    assert is_rooted(parse_word("<a><b></b></a>"))
    assert not is_rooted(parse_word("<a></a><a></a>"))
    assert depth(parse_word("<a><b></b></a><c></c>")) == 2


def test_last_rooted_suffix():
    prefix = parse_tags("<r><a></a><a><b></b></a>")
    assert last_rooted_start(prefix) == 3
    assert format_word(last_rooted_suffix(prefix)) == "<a><b></b></a>"
    with pytest.raises(ValueError):
        last_rooted_start(parse_tags("<a>"))


@given(nested(), nested())
def test_last_rooted_suffix_property(x, y):
    # for any prefix ending in a closing tag, the suffix is rooted and well nested
    w = NestedWord((op("r"),) + x + (cl("r"),)) + y
    for j, t in enumerate(w):
        if not t.opening:
            s = last_rooted_start(w[:j + 1])
            assert is_rooted(w[s:j + 1])


def test_encode_flat_and_sort_key():
    assert format_word(encode_flat("ab")) == "<a></a><b></b>"
    ws = [parse_word(x) for x in ["<b></b>", "", "<a></a>", "<a><a></a></a>"]]
    assert [format_word(w) for w in sorted(ws, key=word_sort_key)] == \
        ["", "<a></a>", "<b></b>", "<a><a></a></a>"]


def test_tag_repr():
    assert repr(Tag("a", True)) == "Tag(<a>)"
    assert repr(parse_word("<a></a>")) == "NestedWord('<a></a>')"
