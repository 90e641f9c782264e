"""Normal form, composition, identity transducers and domain restriction."""

from __future__ import annotations

from collections import defaultdict

from ..errors import DeletingTransducerError
from ..nwa import EpsNwa, all_well_nested
from ..words import cl, op, unmatched
from .core import CloseRule, InternalRule, Nwt, OpenRule, is_non_deleting, is_normal_form

BOT = ("⊥",)


def normalize(T: Nwt) -> Nwt:
    """Equivalent transducer whose rules output at most one tag.

    A rule with output v1..vn becomes a chain of n steps through fresh linear
    states.  For an opening rule pushing p the step at the last unmatched
    opening tag of v reads the input tag and pushes p; every other step is an
    epsilon opening or closing on the fresh epsilon state ``("nf", p, a)``.
    Closing rules are split around their first unmatched closing tag, and
    internal rules with non-empty output become epsilon chains.  Fresh names
    are derived from the rule itself, so the result is reproducible.

    Opening rules whose output has an unmatched closing tag (and closing rules
    with an unmatched opening tag) can never take part in an accepting run of
    a valid transducer and are dropped.
    """
    if is_normal_form(T):
        return T
    linear = set(T.linear)
    hier = set(T.hier)
    eps_hier = set(T.eps_hier)
    opens, closes, internals = [], [], []

    def chain(rule, q, q2, v, k, real, pending):
        """Emit steps for output v; step k (0-based) is the real read ``real``."""
        states = [q] + [("nf", type(rule).__name__, rule, i) for i in range(1, len(v))] + [q2]
        linear.update(states)
        for i, tag in enumerate(v):
            if i == k:
                real(states[i], states[i + 1], (tag,))
            elif tag.opening:
                opens.append(OpenRule(states[i], None, states[i + 1], pending, (tag,)))
            else:
                closes.append(CloseRule(states[i], pending, None, states[i + 1], (tag,)))

    for r in T.opens:
        if len(r.out) <= 1:
            opens.append(r)
            continue
        open_idx, close_idx = unmatched(r.out)
        if close_idx:
            continue
        pending = ("nf", r.hier, r.label)
        hier.add(pending)
        eps_hier.add(pending)
        chain(r, r.src, r.dst, r.out, open_idx[-1],
              lambda s, d, o, r=r: opens.append(OpenRule(s, r.label, d, r.hier, o)), pending)
    for r in T.closes:
        if len(r.out) <= 1:
            closes.append(r)
            continue
        open_idx, close_idx = unmatched(r.out)
        if open_idx:
            continue
        pending = ("nf", r.hier, r.label)
        hier.add(pending)
        eps_hier.add(pending)
        chain(r, r.src, r.dst, r.out, close_idx[0],
              lambda s, d, o, r=r: closes.append(CloseRule(s, r.hier, r.label, d, o)), pending)
    for r in T.internals:
        if not r.out:
            internals.append(r)
            continue
        pending = ("nfi", r)
        hier.add(pending)
        eps_hier.add(pending)
        chain(r, r.src, r.dst, r.out, -1, None, pending)
    return Nwt(T.alphabet, frozenset(linear), frozenset(hier), frozenset(eps_hier),
               frozenset(opens), frozenset(closes), frozenset(internals), T.initial, T.final,
               T.functional, T.depth_bound)


def identity_nwt(A: EpsNwa) -> Nwt:
    """Transducer copying its input, with domain L(A)."""
    return Nwt(A.alphabet, A.linear, A.hier, frozenset(),
               frozenset(OpenRule(q, a, q2, p, (op(a),)) for q, a, q2, p in A.opens),
               frozenset(CloseRule(q, p, a, q2, (cl(a),)) for q, p, a, q2 in A.closes),
               frozenset(InternalRule(q, q2, ()) for q, q2 in A.eps),
               A.initial, A.final, functional=True)


def identity(alphabet) -> Nwt:
    return identity_nwt(all_well_nested(alphabet))


def _require_non_deleting(T: Nwt, what: str) -> None:
    if not is_non_deleting(T):
        raise DeletingTransducerError(
            f"{what} requires a non-deleting transducer; convert games with make_non_deleting")


def compose(T1: Nwt, T2: Nwt) -> Nwt:
    """Transducer for w -> T2(T1(w)); both inputs must be non-deleting.

    Product over normalized transducers.  Hierarchical states are pairs; a
    ``BOT`` first component marks epsilon steps of T2 during which T1 idles.
    Only the linearly reachable part is kept.
    """
    _require_non_deleting(T1, "compose")
    _require_non_deleting(T2, "compose")
    T1, T2 = normalize(T1), normalize(T2)

    t2_open = defaultdict(list)   # label -> rules of T2 reading <label>
    t2_close = defaultdict(list)
    t2_eps_open, t2_eps_close = [], []
    for r in T2.opens:
        (t2_eps_open if r.label is None else t2_open[r.label]).append(r)
    for r in T2.closes:
        (t2_eps_close if r.label is None else t2_close[r.label]).append(r)

    opens, closes, internals = set(), set(), set()
    for r1 in T1.opens:
        (b,) = r1.out
        for r2 in t2_open.get(b.label, ()):
            opens.add(((r1.src, r2.src), r1.label, (r1.dst, r2.dst), (r1.hier, r2.hier), r2.out))
    for r1 in T1.closes:
        (b,) = r1.out
        for r2 in t2_close.get(b.label, ()):
            closes.add(((r1.src, r2.src), (r1.hier, r2.hier), r1.label, (r1.dst, r2.dst), r2.out))

    # idle moves are instantiated lazily over reachable partner states
    init = (T1.initial, T2.initial)
    by_src = defaultdict(list)
    for r in opens:
        by_src[r[0]].append(r[2])
    for r in closes:
        by_src[r[0]].append(r[3])
    reach = {init}
    todo = [init]
    idle1 = defaultdict(list)
    for r in T1.internals:
        idle1[r.src].append(r.dst)
    idle2 = defaultdict(list)
    for r in T2.internals:
        idle2[r.src].append(r.dst)
    eps2_open = defaultdict(list)
    for r in t2_eps_open:
        eps2_open[r.src].append(r)
    eps2_close = defaultdict(list)
    for r in t2_eps_close:
        eps2_close[r.src].append(r)
    while todo:
        q = todo.pop()
        q1, q2 = q
        nxt = list(by_src.get(q, ()))
        for d in idle1.get(q1, ()):
            internals.add((q, (d, q2), ()))
            nxt.append((d, q2))
        for d in idle2.get(q2, ()):
            internals.add((q, (q1, d), ()))
            nxt.append((q1, d))
        for r in eps2_open.get(q2, ()):
            opens.add((q, None, (q1, r.dst), (BOT, r.hier), r.out))
            nxt.append((q1, r.dst))
        for r in eps2_close.get(q2, ()):
            closes.add((q, (BOT, r.hier), None, (q1, r.dst), r.out))
            nxt.append((q1, r.dst))
        for d in nxt:
            if d not in reach:
                reach.add(d)
                todo.append(d)

    opens = {r for r in opens if r[0] in reach}
    closes = {r for r in closes if r[0] in reach}
    hier = {r[3] for r in opens} | {r[1] for r in closes}
    eps_hier = {p for p in hier if p[0] == BOT or p[0] in T1.eps_hier}
    final = {q for q in reach if q[0] in T1.final and q[1] in T2.final}
    return Nwt(T1.alphabet | T2.alphabet, frozenset(reach), frozenset(hier), frozenset(eps_hier),
               frozenset(OpenRule(*r) for r in opens), frozenset(CloseRule(*r) for r in closes),
               frozenset(InternalRule(*r) for r in internals), init, frozenset(final),
               T1.functional and T2.functional)


def restrict_domain(T: Nwt, A: EpsNwa) -> Nwt:
    """T restricted to inputs in L(A)."""
    _require_non_deleting(T, "restrict_domain")
    return compose(identity_nwt(A), T)
