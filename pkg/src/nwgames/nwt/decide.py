"""Range and image automata and the decision problems built on them."""

from __future__ import annotations

from typing import Sequence

from .. import nwa as N
from ..errors import DeletingTransducerError
from ..nwa import EpsNwa
from ..words import NestedWord, Tag
from .constructions import normalize, restrict_domain
from .core import Nwt, is_eps_free, is_non_deleting
from .runs import run_outputs


def range_automaton(T: Nwt) -> EpsNwa:
    """Epsilon-NWA for the set of all outputs of T.

    Hierarchical states are (p, a) with a the input label (None for epsilon),
    so input labels are matched even though only outputs are read.
    """
    if not is_non_deleting(T):
        raise DeletingTransducerError("range_automaton requires a non-deleting transducer")
    T = normalize(T)
    opens = {(r.src, r.out[0].label, r.dst, (r.hier, r.label)) for r in T.opens}
    closes = {(r.src, (r.hier, r.label), r.out[0].label, r.dst) for r in T.closes}
    eps = {(r.src, r.dst) for r in T.internals}
    hier = {r[3] for r in opens} | {r[1] for r in closes}
    return EpsNwa(frozenset(T.alphabet | T.output_labels()), T.linear, frozenset(hier),
                  frozenset(opens), frozenset(closes), frozenset(eps), T.initial, T.final)


def image_automaton(T: Nwt, w: Sequence[Tag]) -> EpsNwa:
    """Epsilon-NWA accepting exactly T(w)."""
    w = NestedWord(w)
    return range_automaton(restrict_domain(T, N.singleton(w, T.alphabet | {t.label for t in w})))


def image_language_automaton(T: Nwt, A: EpsNwa) -> EpsNwa:
    """Epsilon-NWA accepting T(L(A))."""
    return range_automaton(restrict_domain(T, A))


def transduct_member(T: Nwt, w: Sequence[Tag], u: Sequence[Tag]) -> bool:
    B = image_automaton(T, w)
    if {t.label for t in u} - B.alphabet:
        return False
    return N.accepts(B, u)


def is_nonempty(T: Nwt) -> bool:
    """Is some well-nested input accepted by T?"""
    A = image_language_automaton(T, N.all_well_nested(T.alphabet))
    return not N.is_empty(A)


def typecheck(T: Nwt, A1: EpsNwa, A2: EpsNwa, budget: int = N.DEFAULT_STATE_BUDGET) -> bool:
    """Is T(L(A1)) contained in L(A2)?

    Deterministic A2 is used directly; otherwise it is determinized first
    (exponential, bounded by ``budget``).
    """
    image = image_language_automaton(T, A1)
    if not N.is_deterministic(A2):
        A2 = N.determinize(A2, budget)
    return N.included_in(image, A2)


def typecheck_counterexample(T: Nwt, A1: EpsNwa, A2: EpsNwa,
                             budget: int = N.DEFAULT_STATE_BUDGET):
    image = image_language_automaton(T, A1)
    if not N.is_deterministic(A2):
        A2 = N.determinize(A2, budget)
    return N.inclusion_counterexample(image, A2)


def enumerate_image(T: Nwt, w: Sequence[Tag], max_len: int) -> set[NestedWord]:
    """Transducts of w of length <= max_len, sorted by the caller if needed.

    Non-deleting transducers go through the image automaton; deleting ones
    fall back to run enumeration.
    """
    if is_non_deleting(T):
        return N.enumerate_language(image_automaton(T, w), max_len)
    return {NestedWord(u) for u in run_outputs(T, w, max_len)}


def max_output_ratio(T: Nwt) -> int:
    """Longest single-rule output; bounds |u| / |w| for eps-free T."""
    return max((len(r.out) for r in (*T.opens, *T.closes)), default=0)


def image_is_total(T: Nwt, w: Sequence[Tag], max_len: int) -> bool:
    """True if every transduct of w has length <= max_len."""
    if is_eps_free(T):
        return max_output_ratio(T) * len(w) <= max_len
    if not is_non_deleting(T):
        return False
    longer = N.intersect(image_automaton(T, w), N.min_length(T.alphabet | T.output_labels(), max_len + 1))
    return N.is_empty(longer)
