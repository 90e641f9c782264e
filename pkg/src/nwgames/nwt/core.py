"""Transducer model, validation, classification and text format."""

from __future__ import annotations

import re
import shlex
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, NamedTuple, Optional

from ..errors import ValidationError
from ..words import format_word, is_well_nested, parse_tags, unmatched

EPS_LABEL = "_eps"  # spelling of an epsilon read in the text format


class OpenRule(NamedTuple):
    src: Hashable
    label: Optional[str]  # None reads an opening epsilon
    dst: Hashable
    hier: Hashable
    out: tuple


class CloseRule(NamedTuple):
    src: Hashable
    hier: Hashable
    label: Optional[str]
    dst: Hashable
    out: tuple


class InternalRule(NamedTuple):
    src: Hashable
    dst: Hashable
    out: tuple


@dataclass(frozen=True)
class Nwt:
    alphabet: frozenset
    linear: frozenset
    hier: frozenset
    eps_hier: frozenset
    opens: frozenset
    closes: frozenset
    internals: frozenset
    initial: Hashable
    final: frozenset
    functional: bool = False
    depth_bound: Optional[int] = None

    def __post_init__(self):
        for name in ("alphabet", "linear", "hier", "eps_hier", "final"):
            val = getattr(self, name)
            if not isinstance(val, frozenset):
                object.__setattr__(self, name, frozenset(val))
        object.__setattr__(self, "opens", frozenset(OpenRule(*r[:4], tuple(r[4])) for r in self.opens))
        object.__setattr__(self, "closes", frozenset(CloseRule(*r[:4], tuple(r[4])) for r in self.closes))
        object.__setattr__(self, "internals", frozenset(InternalRule(r[0], r[1], tuple(r[2])) for r in self.internals))

    @classmethod
    def build(cls, alphabet, opens=(), closes=(), internals=(), initial=None, final=(),
              linear=None, hier=None, eps_hier=None, functional=False, depth_bound=None):
        """Construct, inferring undeclared state sets from the rules."""
        opens = [OpenRule(*r[:4], tuple(r[4])) for r in opens]
        closes = [CloseRule(*r[:4], tuple(r[4])) for r in closes]
        internals = [InternalRule(r[0], r[1], tuple(r[2])) for r in internals]
        if linear is None:
            linear = {initial, *final}
            linear |= {x for r in opens for x in (r.src, r.dst)}
            linear |= {x for r in closes for x in (r.src, r.dst)}
            linear |= {x for r in internals for x in (r.src, r.dst)}
        if hier is None:
            hier = {r.hier for r in opens} | {r.hier for r in closes}
        if eps_hier is None:
            eps_hier = {r.hier for r in opens if r.label is None}
            eps_hier |= {r.hier for r in closes if r.label is None}
        return cls(frozenset(alphabet), frozenset(linear), frozenset(hier), frozenset(eps_hier),
                   frozenset(opens), frozenset(closes), frozenset(internals), initial,
                   frozenset(final), functional, depth_bound)

    @cached_property
    def open_from(self) -> dict:
        idx = defaultdict(list)
        for r in self.opens:
            idx[r.src, r.label].append(r)
        return dict(idx)

    @cached_property
    def close_from(self) -> dict:
        idx = defaultdict(list)
        for r in self.closes:
            idx[r.src, r.hier, r.label].append(r)
        return dict(idx)

    @cached_property
    def internal_from(self) -> dict:
        idx = defaultdict(list)
        for r in self.internals:
            idx[r.src].append(r)
        return dict(idx)

    @property
    def rules(self) -> list:
        return [*self.opens, *self.closes, *self.internals]

    @property
    def size(self) -> int:
        """States plus rules plus total output length."""
        outs = sum(len(r.out) for r in self.rules)
        return len(self.linear) + len(self.hier) + len(self.rules) + outs

    def output_labels(self) -> set:
        return {t.label for r in self.rules for t in r.out}

    def __str__(self) -> str:
        return format_nwt(self)


@dataclass(frozen=True)
class NwtClass:
    eps_free: bool
    non_deleting: bool
    relabelling: bool
    deterministic: bool
    functional_claimed: bool
    normal_form: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


# validation ------------------------------------------------------------------------

def validate_nwt(T: Nwt) -> list[str]:
    defects = []
    if T.initial not in T.linear:
        defects.append(f"initial state {T.initial!r} not declared")
    for f in sorted(T.final - T.linear, key=repr):
        defects.append(f"final state {f!r} not declared")
    for p in sorted(T.eps_hier - T.hier, key=repr):
        defects.append(f"eps-hier state {p!r} not declared as hierarchical")

    def common(r, desc):
        for q in (r.src, r.dst):
            if q not in T.linear:
                defects.append(f"{desc}: undeclared linear state {q!r}")
        bad = {t.label for t in r.out} - T.alphabet
        if bad:
            defects.append(f"{desc}: output labels {sorted(bad)} not in alphabet")

    for r in sorted(T.opens, key=repr):
        desc = _describe(r)
        common(r, desc)
        if r.hier not in T.hier:
            defects.append(f"{desc}: undeclared hierarchical state {r.hier!r}")
        if r.label is not None and r.label not in T.alphabet:
            defects.append(f"{desc}: label {r.label!r} not in alphabet")
        if (r.label is None) != (r.hier in T.eps_hier):
            defects.append(f"{desc}: eps-consistency violated")
        if r.out and not unmatched(r.out)[0]:
            defects.append(f"{desc}: synchronisation violated (no unmatched opening tag in output)")
    for r in sorted(T.closes, key=repr):
        desc = _describe(r)
        common(r, desc)
        if r.hier not in T.hier:
            defects.append(f"{desc}: undeclared hierarchical state {r.hier!r}")
        if r.label is not None and r.label not in T.alphabet:
            defects.append(f"{desc}: label {r.label!r} not in alphabet")
        if (r.label is None) != (r.hier in T.eps_hier):
            defects.append(f"{desc}: eps-consistency violated")
        if r.out and not unmatched(r.out)[1]:
            defects.append(f"{desc}: synchronisation violated (no unmatched closing tag in output)")
    for r in sorted(T.internals, key=repr):
        desc = _describe(r)
        common(r, desc)
        if not is_well_nested(r.out):
            defects.append(f"{desc}: internal output must be well-nested")

    # well-formedness over rule pairs that can match in a run: same
    # (hierarchical state, label), and the closing rule's source reachable
    # from the opening rule's target by a well-nested run
    closes_by_key = defaultdict(list)
    for r in T.closes:
        closes_by_key[r.hier, r.label].append(r)
    reach = _inner_reach(T)
    checked = set()
    for r in sorted(T.opens, key=repr):
        inside = reach.get(r.dst, ())
        for r2 in sorted(closes_by_key.get((r.hier, r.label), ()), key=repr):
            if r2.src not in inside:
                continue
            out2 = r2.out
            key = (r.hier, r.out, out2)
            if key in checked:
                continue
            checked.add(key)
            if not is_well_nested(r.out + out2):
                defects.append(f"well-formedness violated for hierarchical state {r.hier!r}: "
                               f"{format_word(r.out)!r} + {format_word(out2)!r}")
    return defects


def _inner_reach(T: Nwt) -> dict:
    """Underlying input automaton summaries from every opening target."""
    from ..nwa import EpsNwa, summaries

    A = EpsNwa(frozenset(), frozenset(), frozenset(),
               frozenset((r.src, r.label, r.dst, r.hier) for r in T.opens),
               frozenset((r.src, r.hier, r.label, r.dst) for r in T.closes),
               frozenset((r.src, r.dst) for r in T.internals), T.initial, frozenset())
    return summaries(A, {r.dst for r in T.opens})


def require_valid_nwt(T: Nwt) -> Nwt:
    defects = validate_nwt(T)
    if defects:
        raise ValidationError("nwt", defects)
    return T


def _describe(r) -> str:
    out = format_word(r.out)
    if isinstance(r, OpenRule):
        return f"open {r.src} {_lab(r.label)} -> {r.dst} {r.hier} out {out!r}"
    if isinstance(r, CloseRule):
        return f"close {r.src} {r.hier} {_lab(r.label)} -> {r.dst} out {out!r}"
    return f"internal {r.src} -> {r.dst} out {out!r}"


def _lab(label) -> str:
    return EPS_LABEL if label is None else label


# classification -------------------------------------------------------------------

def is_eps_free(T: Nwt) -> bool:
    return (not T.eps_hier and not T.internals
            and all(r.label is not None for r in T.opens)
            and all(r.label is not None for r in T.closes))


def is_non_deleting(T: Nwt) -> bool:
    return all(r.out for r in T.opens) and all(r.out for r in T.closes)


def is_normal_form(T: Nwt) -> bool:
    return (all(len(r.out) <= 1 for r in T.opens) and all(len(r.out) <= 1 for r in T.closes)
            and all(not r.out for r in T.internals))


def is_relabelling(T: Nwt) -> bool:
    return (is_eps_free(T)
            and all(len(r.out) == 1 and r.out[0].opening for r in T.opens)
            and all(len(r.out) == 1 and r.out[0].closing for r in T.closes))


def is_deterministic_nwt(T: Nwt) -> bool:
    """Exactly one rule per (q, <a>) and per (q, p, </a>), and no eps moves."""
    if not is_eps_free(T):
        return False
    for q in T.linear:
        for a in T.alphabet:
            if len(T.open_from.get((q, a), ())) != 1:
                return False
            for p in T.hier:
                if len(T.close_from.get((q, p, a), ())) != 1:
                    return False
    return True


def classify(T: Nwt) -> NwtClass:
    det = is_deterministic_nwt(T)
    return NwtClass(eps_free=is_eps_free(T), non_deleting=is_non_deleting(T),
                    relabelling=is_relabelling(T), deterministic=det,
                    functional_claimed=bool(T.functional or det),
                    normal_form=is_normal_form(T))


# renaming and text format --------------------------------------------------------

_NAME_RE = re.compile(r"[^\s#\"]+")


def _is_name(x) -> bool:
    return isinstance(x, str) and _NAME_RE.fullmatch(x) is not None and x not in ("->", "out", EPS_LABEL)


def renamed_nwt(T: Nwt) -> Nwt:
    """Copy whose states are all printable tokens (valid names are kept)."""
    def mapping(states, prefix):
        taken = {s for s in states if _is_name(s)}
        m = {s: s for s in taken}
        i = 0
        for s in sorted((s for s in states if not _is_name(s)), key=repr):
            while f"{prefix}{i}" in taken:
                i += 1
            m[s] = f"{prefix}{i}"
            taken.add(m[s])
        return m

    lin = mapping(T.linear | {T.initial} | T.final, "q")
    hie = mapping(T.hier | T.eps_hier, "p")
    return Nwt(T.alphabet, frozenset(lin[q] for q in T.linear), frozenset(hie[p] for p in T.hier),
               frozenset(hie[p] for p in T.eps_hier),
               frozenset(OpenRule(lin[r.src], r.label, lin[r.dst], hie[r.hier], r.out) for r in T.opens),
               frozenset(CloseRule(lin[r.src], hie[r.hier], r.label, lin[r.dst], r.out) for r in T.closes),
               frozenset(InternalRule(lin[r.src], lin[r.dst], r.out) for r in T.internals),
               lin[T.initial], frozenset(lin[f] for f in T.final), T.functional, T.depth_bound)


def format_nwt(T: Nwt) -> str:
    T = renamed_nwt(T)
    lines = ["nwt",
             f"alphabet: {' '.join(sorted(T.alphabet))}",
             f"linear: {' '.join(sorted(T.linear))}",
             f"hier: {' '.join(sorted(T.hier))}",
             f"eps-hier: {' '.join(sorted(T.eps_hier))}",
             f"initial: {T.initial}",
             f"final: {' '.join(sorted(T.final))}"]
    if T.functional:
        lines.append("functional: true")
    if T.depth_bound is not None:
        lines.append(f"depth-bound: {T.depth_bound}")

    def key(r):
        return tuple("" if x is None else str(x) if not isinstance(x, tuple) else format_word(x) for x in r)

    for r in sorted(T.opens, key=key):
        lines.append(f'open {r.src} {_lab(r.label)} -> {r.dst} {r.hier} out "{format_word(r.out)}"')
    for r in sorted(T.closes, key=key):
        lines.append(f'close {r.src} {r.hier} {_lab(r.label)} -> {r.dst} out "{format_word(r.out)}"')
    for r in sorted(T.internals, key=key):
        lines.append(f'internal {r.src} -> {r.dst} out "{format_word(r.out)}"')
    return "\n".join(lines) + "\n"


def parse_nwt(text: str, check: bool = True) -> Nwt:
    sections: dict = {}
    opens, closes, internals = [], [], []
    errors = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip() if '"' not in raw else _strip_comment(raw)
        if not line:
            continue
        if not seen_header:
            if line != "nwt":
                raise ValidationError("nwt", [f"line {lineno}: expected header 'nwt', got {line!r}"])
            seen_header = True
            continue
        key, sep, rest = line.partition(":")
        if sep and key.strip() in ("alphabet", "linear", "hier", "eps-hier", "initial", "final",
                                   "functional", "depth-bound"):
            sections[key.strip()] = rest.replace(",", " ").split()
            continue
        try:
            tok = shlex.split(line)
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
            continue
        try:
            if tok[0] == "open" and len(tok) == 8 and tok[3] == "->" and tok[6] == "out":
                opens.append(OpenRule(tok[1], _unlab(tok[2]), tok[4], tok[5], parse_tags(tok[7])))
            elif tok[0] == "close" and len(tok) == 8 and tok[4] == "->" and tok[6] == "out":
                closes.append(CloseRule(tok[1], tok[2], _unlab(tok[3]), tok[5], parse_tags(tok[7])))
            elif tok[0] == "internal" and len(tok) == 6 and tok[2] == "->" and tok[4] == "out":
                internals.append(InternalRule(tok[1], tok[3], parse_tags(tok[5])))
            else:
                errors.append(f"line {lineno}: cannot parse {line!r}")
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
    if not seen_header:
        errors.append("empty transducer file")
    if len(sections.get("initial", ())) != 1:
        errors.append("exactly one initial state required")
    functional = sections.get("functional", ["false"])
    if functional not in (["true"], ["false"]):
        errors.append("functional: expects true or false")
    depth_bound = None
    if "depth-bound" in sections:
        try:
            depth_bound = int(sections["depth-bound"][0])
        except (ValueError, IndexError):
            errors.append("depth-bound: expects an integer")
    if errors:
        raise ValidationError("nwt", errors)
    T = Nwt.build(sections.get("alphabet", ()), opens, closes, internals,
                  sections["initial"][0], sections.get("final", ()),
                  sections.get("linear"), sections.get("hier"), sections.get("eps-hier"),
                  functional == ["true"], depth_bound)
    if check:
        require_valid_nwt(T)
    return T


def _strip_comment(raw: str) -> str:
    in_quote = False
    for i, ch in enumerate(raw):
        if ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return raw[:i].strip()
    return raw.strip()


def _unlab(tok: str) -> Optional[str]:
    return None if tok == EPS_LABEL else tok
