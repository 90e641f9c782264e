"""Nested word automata with optional internal epsilon moves.

Rules are plain tuples::

    opens   (q, a, q2, p)     read <a> in q, go to q2, push p
    closes  (q, p, a, q2)     read </a> in q with p on top, pop, go to q2
    eps     (q, q2)           internal epsilon move

Membership, determinization and enumeration work on *summary sets*: sets of
pairs ``(entry, current)`` of linear states, where ``entry`` is the state
reached right after the innermost pending opening tag.  Emptiness saturates
the same pairs pushdown-style.
"""

from __future__ import annotations

import re
from collections import defaultdict, deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Hashable, Iterable, Optional, Sequence

from .errors import BudgetExceeded, ValidationError
from .words import NestedWord, Tag, cl, format_word, is_well_nested, op

State = Hashable
DEFAULT_STATE_BUDGET = 10**6


@dataclass(frozen=True, eq=True)
class EpsNwa:
    alphabet: frozenset
    linear: frozenset
    hier: frozenset
    opens: frozenset
    closes: frozenset
    eps: frozenset
    initial: State
    final: frozenset

    kind = "eps-nwa"

    def __post_init__(self):
        for name in ("alphabet", "linear", "hier", "opens", "closes", "eps", "final"):
            val = getattr(self, name)
            if not isinstance(val, frozenset):
                object.__setattr__(self, name, frozenset(val))

    @classmethod
    def build(cls, alphabet, opens=(), closes=(), eps=(), initial=None, final=(),
              linear=None, hier=None):
        """Construct, inferring undeclared state sets from the rules."""
        opens, closes, eps = (frozenset(map(tuple, r)) for r in (opens, closes, eps))
        if linear is None:
            linear = {initial, *final}
            for q, _, q2, _ in opens:
                linear |= {q, q2}
            for q, _, _, q2 in closes:
                linear |= {q, q2}
            for q, q2 in eps:
                linear |= {q, q2}
        if hier is None:
            hier = {r[3] for r in opens} | {r[1] for r in closes}
        return cls(frozenset(alphabet), frozenset(linear), frozenset(hier), opens, closes,
                   eps, initial, frozenset(final))

    # indexes ---------------------------------------------------------------

    @cached_property
    def open_from(self) -> dict:
        idx = defaultdict(list)
        for q, a, q2, p in self.opens:
            idx[q, a].append((q2, p))
        return dict(idx)

    @cached_property
    def open_by_state(self) -> dict:
        idx = defaultdict(list)
        for q, a, q2, p in self.opens:
            idx[q].append((a, q2, p))
        return dict(idx)

    @cached_property
    def open_into(self) -> dict:
        idx = defaultdict(list)
        for q, a, q2, p in self.opens:
            idx[q2].append((q, a, p))
        return dict(idx)

    @cached_property
    def close_from(self) -> dict:
        idx = defaultdict(list)
        for q, p, a, q2 in self.closes:
            idx[q, p, a].append(q2)
        return dict(idx)

    @cached_property
    def close_by_pair(self) -> dict:
        idx = defaultdict(list)
        for q, p, a, q2 in self.closes:
            idx[q, p].append((a, q2))
        return dict(idx)

    @cached_property
    def eps_from(self) -> dict:
        idx = defaultdict(list)
        for q, q2 in self.eps:
            idx[q].append(q2)
        return dict(idx)

    @property
    def size(self) -> int:
        return len(self.linear) + len(self.hier) + len(self.opens) + len(self.closes) + len(self.eps)

    def with_kind(self, cls):
        return cls(self.alphabet, self.linear, self.hier, self.opens, self.closes, self.eps,
                   self.initial, self.final)

    def __str__(self) -> str:
        return format_nwa(self)


class Dnwa(EpsNwa):
    """An automaton claiming determinism (at most one rule per key, no eps).

    Partial automata are allowed; :func:`complete` adds sink states.
    """

    kind = "dnwa"


class Nwa(EpsNwa):
    kind = "nwa"


# validation ------------------------------------------------------------------

def validate(A: EpsNwa) -> list[str]:
    defects = []
    if A.initial not in A.linear:
        defects.append(f"initial state {A.initial!r} not declared")
    for f in sorted(A.final - A.linear, key=repr):
        defects.append(f"final state {f!r} not declared")

    def check(q, what):
        if q not in A.linear:
            defects.append(f"{what}: undeclared linear state {q!r}")

    for q, a, q2, p in sorted(A.opens, key=repr):
        rule = f"open {q} {a} -> {q2} {p}"
        check(q, rule), check(q2, rule)
        if a not in A.alphabet:
            defects.append(f"{rule}: label {a!r} not in alphabet")
        if p not in A.hier:
            defects.append(f"{rule}: undeclared hierarchical state {p!r}")
    for q, p, a, q2 in sorted(A.closes, key=repr):
        rule = f"close {q} {p} {a} -> {q2}"
        check(q, rule), check(q2, rule)
        if a not in A.alphabet:
            defects.append(f"{rule}: label {a!r} not in alphabet")
        if p not in A.hier:
            defects.append(f"{rule}: undeclared hierarchical state {p!r}")
    for q, q2 in sorted(A.eps, key=repr):
        rule = f"eps {q} -> {q2}"
        check(q, rule), check(q2, rule)
    if isinstance(A, (Dnwa, Nwa)) and A.eps:
        defects.append(f"{A.kind} must not contain eps rules")
    if isinstance(A, Dnwa):
        defects.extend(determinism_defects(A))
    return defects


def determinism_defects(A: EpsNwa) -> list[str]:
    defects = []
    if A.eps:
        defects.append("eps rules present")
    for (q, a), targets in sorted(A.open_from.items(), key=repr):
        if len(targets) > 1:
            defects.append(f"{len(targets)} opening rules for ({q}, <{a}>)")
    for (q, p, a), targets in sorted(A.close_from.items(), key=repr):
        if len(targets) > 1:
            defects.append(f"{len(targets)} closing rules for ({q}, {p}, </{a}>)")
    return defects


def is_deterministic(A: EpsNwa) -> bool:
    return not determinism_defects(A)


def is_total(A: EpsNwa) -> bool:
    if not is_deterministic(A):
        return False
    n_open = len(A.linear) * len(A.alphabet)
    n_close = len(A.linear) * len(A.hier) * len(A.alphabet)
    return len(A.open_from) == n_open and len(A.close_from) == n_close


def require_valid(A: EpsNwa) -> EpsNwa:
    defects = validate(A)
    if defects:
        raise ValidationError(A.kind, defects)
    return A


# summary sets ----------------------------------------------------------------

def _closure(A: EpsNwa, pairs) -> frozenset:
    if not A.eps:
        return frozenset(pairs)
    seen = set(pairs)
    stack = list(seen)
    eps_from = A.eps_from
    while stack:
        e, q = stack.pop()
        for q2 in eps_from.get(q, ()):
            if (e, q2) not in seen:
                seen.add((e, q2))
                stack.append((e, q2))
    return frozenset(seen)


def _initial_summary(A: EpsNwa) -> frozenset:
    return _closure(A, {(A.initial, A.initial)})


def _open_step(A: EpsNwa, S: frozenset, a: str) -> frozenset:
    open_from = A.open_from
    targets = {q2 for _, q in S for q2, _ in open_from.get((q, a), ())}
    return _closure(A, {(t, t) for t in targets})


def _close_step(A: EpsNwa, outer: frozenset, a: str, inner: frozenset, b: str) -> frozenset:
    by_entry = defaultdict(list)
    for e, q in inner:
        by_entry[e].append(q)
    open_from, close_from = A.open_from, A.close_from
    out = set()
    for e, q in outer:
        for q2, p in open_from.get((q, a), ()):
            for qc in by_entry.get(q2, ()):
                for q3 in close_from.get((qc, p, b), ()):
                    out.add((e, q3))
    return _closure(A, out)


def _accepting(A: EpsNwa, S) -> bool:
    return any(q in A.final for _, q in S)


def accepts(A: EpsNwa, w: Sequence[Tag]) -> bool:
    """Membership of a well-nested word, in time polynomial in |A|·|w|."""
    bad = {t.label for t in w} - A.alphabet
    if bad:
        raise ValueError(f"labels outside the alphabet: {sorted(bad)}")
    if not is_well_nested(w):
        raise ValueError(f"not well-nested: {format_word(w)}")
    S = _initial_summary(A)
    frames = []
    for tag in w:
        if tag.opening:
            frames.append((S, tag.label))
            S = _open_step(A, S, tag.label)
        else:
            outer, a = frames.pop()
            S = _close_step(A, outer, a, S, tag.label)
        if not S:
            return False
    assert not frames
    return _accepting(A, S)


# determinization ---------------------------------------------------------------

def determinize(A: EpsNwa, budget: int = DEFAULT_STATE_BUDGET) -> Dnwa:
    """Summary-set determinization.  The result is total and language-equivalent.

    States are named ``d0, d1, ...`` (linear) and ``h0, h1, ...`` (hierarchical)
    in discovery order, so the output is reproducible.
    """
    labels = sorted(A.alphabet)
    lin_id: dict = {}
    hier_id: dict = {}
    todo: deque = deque()
    done_lin: list = []
    done_hier: list = []
    opens, closes = [], []

    def add_lin(S):
        if S not in lin_id:
            if len(lin_id) + len(hier_id) >= budget:
                raise BudgetExceeded("determinization state", budget)
            lin_id[S] = f"d{len(lin_id)}"
            todo.append(("lin", S))
        return lin_id[S]

    def add_hier(h):
        if h not in hier_id:
            if len(lin_id) + len(hier_id) >= budget:
                raise BudgetExceeded("determinization state", budget)
            hier_id[h] = f"h{len(hier_id)}"
            todo.append(("hier", h))
        return hier_id[h]

    def close_rules(S, h):
        outer, a = h
        for b in labels:
            T = _close_step(A, outer, a, S, b)
            closes.append((lin_id[S], hier_id[h], b, add_lin(T)))

    add_lin(_initial_summary(A))
    while todo:
        kind, item = todo.popleft()
        if kind == "lin":
            S = item
            for a in labels:
                T = _open_step(A, S, a)
                name = add_lin(T)
                opens.append((lin_id[S], a, name, add_hier((S, a))))
            for h in done_hier:
                close_rules(S, h)
            done_lin.append(S)
        else:
            h = item
            for S in done_lin:
                close_rules(S, h)
            done_hier.append(h)

    final = {name for S, name in lin_id.items() if _accepting(A, S)}
    return Dnwa(A.alphabet, frozenset(lin_id.values()), frozenset(hier_id.values()),
                frozenset(opens), frozenset(closes), frozenset(), "d0", frozenset(final))


# boolean operations --------------------------------------------------------------

def intersect(A: EpsNwa, B: EpsNwa) -> EpsNwa:
    """Product automaton restricted to its forward-reachable part.

    Epsilon moves are not synchronised: each one advances a single component.
    """
    init = (A.initial, B.initial)
    lin = {init}
    hier = set()
    lin_todo = deque([init])
    hier_todo: deque = deque()
    done_lin, done_hier = [], []
    opens, closes, eps = set(), set(), set()

    def add_lin(q):
        if q not in lin:
            lin.add(q)
            lin_todo.append(q)

    def add_hier(p):
        if p not in hier:
            hier.add(p)
            hier_todo.append(p)

    def do_close(q, p):
        (q1, q2), (p1, p2) = q, p
        b_rules = B.close_by_pair.get((q2, p2))
        if not b_rules:
            return
        for a, r1 in A.close_by_pair.get((q1, p1), ()):
            for b, r2 in b_rules:
                if a == b:
                    add_lin((r1, r2))
                    closes.add((q, p, a, (r1, r2)))

    while lin_todo or hier_todo:
        if lin_todo:
            q = lin_todo.popleft()
            q1, q2 = q
            for r1 in A.eps_from.get(q1, ()):
                add_lin((r1, q2))
                eps.add((q, (r1, q2)))
            for r2 in B.eps_from.get(q2, ()):
                add_lin((q1, r2))
                eps.add((q, (q1, r2)))
            for a, r1, p1 in A.open_by_state.get(q1, ()):
                for r2, p2 in B.open_from.get((q2, a), ()):
                    add_lin((r1, r2))
                    add_hier((p1, p2))
                    opens.add((q, a, (r1, r2), (p1, p2)))
            for p in done_hier:
                do_close(q, p)
            done_lin.append(q)
        else:
            p = hier_todo.popleft()
            for q in done_lin:
                do_close(q, p)
            done_hier.append(p)

    final = {q for q in lin if q[0] in A.final and q[1] in B.final}
    cls = Dnwa if not eps and is_deterministic(A) and is_deterministic(B) else EpsNwa
    return cls(A.alphabet | B.alphabet, frozenset(lin), frozenset(hier), frozenset(opens),
               frozenset(closes), frozenset(eps), init, frozenset(final))


def union(A: EpsNwa, B: EpsNwa) -> EpsNwa:
    """Disjoint sum with a fresh initial state and eps moves into both parts."""
    init = ("union",)

    def tag(i, X):
        return ({(i, q) for q in X.linear},
                {(i, p) for p in X.hier},
                {((i, q), a, (i, q2), (i, p)) for q, a, q2, p in X.opens},
                {((i, q), (i, p), a, (i, q2)) for q, p, a, q2 in X.closes},
                {((i, q), (i, q2)) for q, q2 in X.eps},
                {(i, q) for q in X.final})

    la, ha, oa, ca, ea, fa = tag(0, A)
    lb, hb, ob, cb, eb, fb = tag(1, B)
    eps = ea | eb | {(init, (0, A.initial)), (init, (1, B.initial))}
    return EpsNwa(A.alphabet | B.alphabet, frozenset(la | lb | {init}), frozenset(ha | hb),
                  frozenset(oa | ob), frozenset(ca | cb), frozenset(eps), init,
                  frozenset(fa | fb))


def _fresh(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def complete(D: EpsNwa, alphabet: Iterable[str] | None = None) -> Dnwa:
    """Total deterministic version of D over ``alphabet`` (default: D's own).

    Missing rules lead to a fresh sink state; D itself is returned (as a
    Dnwa) when it is already total.
    """
    defects = determinism_defects(D)
    if defects:
        raise ValueError("cannot complete a non-deterministic automaton: " + "; ".join(defects))
    alphabet = frozenset(D.alphabet if alphabet is None else set(alphabet) | D.alphabet)
    if alphabet == D.alphabet and is_total(D):
        return D.with_kind(Dnwa)
    sink = _fresh("sink", D.linear)
    psink = _fresh("psink", D.hier)
    linear = D.linear | {sink}
    hier = D.hier | {psink}
    opens, closes = set(D.opens), set(D.closes)
    open_keys, close_keys = set(D.open_from), set(D.close_from)
    for q in linear:
        for a in alphabet:
            if (q, a) not in open_keys:
                opens.add((q, a, sink, psink))
            for p in hier:
                if (q, p, a) not in close_keys:
                    closes.add((q, p, a, sink))
    return Dnwa(alphabet, linear, hier, frozenset(opens), frozenset(closes), frozenset(),
                D.initial, D.final)


def complement(D: EpsNwa, alphabet: Iterable[str] | None = None) -> Dnwa:
    """Complement relative to the well-nested words over the (extended) alphabet."""
    C = complete(D, alphabet)
    return replace(C, final=C.linear - C.final)


# emptiness -------------------------------------------------------------------------

def _saturate(A: EpsNwa, stop_at_final: bool = True, seeds=()) -> tuple[dict, Optional[tuple]]:
    """Summary pairs reachable from the initial state, with derivations.

    ``seeds`` are extra entry states to start from.
    Returns (derivations, accepting_pair or None).
    """
    R: dict = {}
    by_entry = defaultdict(set)
    by_state = defaultdict(set)
    work: deque = deque()
    q0 = A.initial
    hit = None

    def add(pair, how):
        nonlocal hit
        if pair in R:
            return
        R[pair] = how
        by_entry[pair[0]].add(pair[1])
        by_state[pair[1]].add(pair[0])
        work.append(pair)
        if hit is None and pair[0] == q0 and pair[1] in A.final:
            hit = pair

    add((q0, q0), None)
    for e in seeds:
        add((e, e), None)
    eps_from, open_by_state, open_into, close_from = A.eps_from, A.open_by_state, A.open_into, A.close_from
    while work:
        if hit is not None and stop_at_final:
            break
        pair = work.popleft()
        e, q = pair
        for q2 in eps_from.get(q, ()):
            add((e, q2), ("eps", pair))
        for a, q1, p in open_by_state.get(q, ()):
            add((q1, q1), None)
            for q2 in list(by_entry[q1]):
                for q3 in close_from.get((q2, p, a), ()):
                    add((e, q3), ("nest", pair, a, (q1, q2)))
        for x, a, p in open_into.get(e, ()):
            for q3 in close_from.get((q, p, a), ()):
                for e0 in list(by_state[x]):
                    add((e0, q3), ("nest", (e0, x), a, pair))
    return R, hit


def summaries(A: EpsNwa, entries) -> dict:
    """For each entry state e, the states reachable from e by well-nested runs."""
    R, _ = _saturate(A, stop_at_final=False, seeds=entries)
    out = defaultdict(set)
    for e, q in R:
        out[e].add(q)
    return out


def is_empty(A: EpsNwa) -> bool:
    return _saturate(A)[1] is None


def _rebuild(R: dict, pair) -> tuple[Tag, ...]:
    memo: dict = {}
    stack = [pair]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        how = R[cur]
        if how is None:
            memo[cur] = ()
            stack.pop()
        elif how[0] == "eps":
            if how[1] in memo:
                memo[cur] = memo[how[1]]
                stack.pop()
            else:
                stack.append(how[1])
        else:
            _, prefix, a, inner = how
            missing = [x for x in (prefix, inner) if x not in memo]
            if missing:
                stack.extend(missing)
            else:
                memo[cur] = memo[prefix] + (op(a),) + memo[inner] + (cl(a),)
                stack.pop()
    return memo[pair]


def witness(A: EpsNwa) -> Optional[NestedWord]:
    """Some accepted word, or None if the language is empty."""
    R, hit = _saturate(A)
    if hit is None:
        return None
    return NestedWord(_rebuild(R, hit))


def included_in(A: EpsNwa, D: EpsNwa) -> bool:
    """L(A) ⊆ L(D) for deterministic D, via emptiness of A ∩ ¬D."""
    defects = determinism_defects(D)
    if defects:
        raise ValueError("inclusion target must be deterministic: " + "; ".join(defects))
    return is_empty(intersect(A, complement(D, A.alphabet)))


def inclusion_counterexample(A: EpsNwa, D: EpsNwa) -> Optional[NestedWord]:
    return witness(intersect(A, complement(D, A.alphabet)))


# enumeration ---------------------------------------------------------------------

def enumerate_language(A: EpsNwa, max_len: int) -> set[NestedWord]:
    """All accepted words of length <= max_len."""
    labels = sorted(A.alphabet)
    out: set = set()
    open_cache: dict = {}
    close_cache: dict = {}
    word: list = []
    frames: list = []

    def opened(S, a):
        key = (S, a)
        if key not in open_cache:
            open_cache[key] = _open_step(A, S, a)
        return open_cache[key]

    def closed(outer, a, S):
        key = (outer, a, S)
        if key not in close_cache:
            close_cache[key] = _close_step(A, outer, a, S, a)
        return close_cache[key]

    def dfs(S):
        if not frames and _accepting(A, S):
            out.add(NestedWord(word))
        remaining = max_len - len(word)
        if remaining >= len(frames) + 2:
            for a in labels:
                T = opened(S, a)
                if T:
                    frames.append((S, a))
                    word.append(op(a))
                    dfs(T)
                    word.pop()
                    frames.pop()
        if frames and remaining >= len(frames):
            outer, a = frames.pop()
            T = closed(outer, a, S)
            if T:
                word.append(cl(a))
                dfs(T)
                word.pop()
            frames.append((outer, a))

    S0 = _initial_summary(A)
    if S0:
        dfs(S0)
    return out


# stock automata ------------------------------------------------------------------

def empty_nwa(alphabet: Iterable[str] = ()) -> Dnwa:
    return Dnwa(frozenset(alphabet), frozenset({"q"}), frozenset(), frozenset(), frozenset(),
                frozenset(), "q", frozenset())


def all_well_nested(alphabet: Iterable[str]) -> Dnwa:
    alphabet = frozenset(alphabet)
    return Dnwa(alphabet, frozenset({"q"}), frozenset(f"p_{a}" for a in alphabet),
                frozenset(("q", a, "q", f"p_{a}") for a in alphabet),
                frozenset(("q", f"p_{a}", a, "q") for a in alphabet),
                frozenset(), "q", frozenset({"q"}))


def singleton(w: Sequence[Tag], alphabet: Iterable[str] | None = None) -> Dnwa:
    """Deterministic automaton accepting exactly {w}."""
    w = tuple(w)
    if not is_well_nested(w):
        raise ValueError(f"not well-nested: {format_word(w)}")
    alphabet = frozenset({t.label for t in w} if alphabet is None else alphabet)
    opens, closes, stack = [], [], []
    for i, tag in enumerate(w):
        if tag.opening:
            stack.append(i)
            opens.append((f"s{i}", tag.label, f"s{i + 1}", f"p{i}"))
        else:
            j = stack.pop()
            closes.append((f"s{i}", f"p{j}", tag.label, f"s{i + 1}"))
    n = len(w)
    return Dnwa(alphabet, frozenset(f"s{i}" for i in range(n + 1)),
                frozenset(r[3] for r in opens), frozenset(opens), frozenset(closes),
                frozenset(), "s0", frozenset({f"s{n}"}))


def min_length(alphabet: Iterable[str], n: int) -> Dnwa:
    """Well-nested words of length >= n."""
    alphabet = frozenset(alphabet)
    states = [f"n{i}" for i in range(n + 1)]
    opens, closes = set(), set()
    for i in range(n + 1):
        nxt = states[min(i + 1, n)]
        for a in alphabet:
            opens.add((states[i], a, nxt, f"p_{a}"))
            closes.add((states[i], f"p_{a}", a, nxt))
    return Dnwa(alphabet, frozenset(states), frozenset(f"p_{a}" for a in alphabet),
                frozenset(opens), frozenset(closes), frozenset(), states[0],
                frozenset({states[n]}))


def splice(w: Sequence[Tag], i: int, j: int, B: EpsNwa) -> EpsNwa:
    """Automaton for { w[:i] x w[j:] : x in L(B) }, where w[i:j] is well-nested.

    The fixed context is read tag by tag; B runs in between, entered and left
    through eps moves.
    """
    w = tuple(w)
    partner = {}
    stack = []
    for k, tag in enumerate(w):
        if tag.opening:
            stack.append(k)
        elif stack:
            partner[k] = stack.pop()
    linear = {("w", k) for k in range(i + 1)} | {("w", k) for k in range(j, len(w) + 1)}
    opens = {(("b", q), a, ("b", q2), ("b", p)) for q, a, q2, p in B.opens}
    closes = {(("b", q), ("b", p), a, ("b", q2)) for q, p, a, q2 in B.closes}
    eps = {(("b", q), ("b", q2)) for q, q2 in B.eps}
    eps.add((("w", i), ("b", B.initial)))
    eps |= {(("b", f), ("w", j)) for f in B.final}
    for k in list(range(i)) + list(range(j, len(w))):
        tag = w[k]
        if tag.opening:
            opens.add((("w", k), tag.label, ("w", k + 1), ("w", k)))
        else:
            closes.add((("w", k), ("w", partner[k]), tag.label, ("w", k + 1)))
    linear |= {("b", q) for q in B.linear}
    hier = {("w", k) for k in range(len(w)) if w[k].opening} | {("b", p) for p in B.hier}
    return EpsNwa(B.alphabet | {t.label for t in w}, frozenset(linear), frozenset(hier),
                  frozenset(opens), frozenset(closes), frozenset(eps), ("w", 0),
                  frozenset({("w", len(w))}))


# renaming and text format ----------------------------------------------------------

_NAME_RE = re.compile(r"[^\s#]+")


def _is_name(x) -> bool:
    return isinstance(x, str) and _NAME_RE.fullmatch(x) is not None and x != "->"


def renamed(A: EpsNwa) -> EpsNwa:
    """Copy with every state renamed to a printable token.

    String states that are already valid tokens keep their names.
    """
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

    lin = mapping(A.linear | {A.initial} | A.final, "q")
    hie = mapping(A.hier, "p")
    return type(A)(A.alphabet, frozenset(lin[q] for q in A.linear), frozenset(hie.values()),
                   frozenset((lin[q], a, lin[q2], hie[p]) for q, a, q2, p in A.opens),
                   frozenset((lin[q], hie[p], a, lin[q2]) for q, p, a, q2 in A.closes),
                   frozenset((lin[q], lin[q2]) for q, q2 in A.eps),
                   lin[A.initial], frozenset(lin[f] for f in A.final))


def _names(xs) -> str:
    return " ".join(sorted(xs))


def format_nwa(A: EpsNwa) -> str:
    A = renamed(A)
    lines = [A.kind,
             f"alphabet: {_names(A.alphabet)}",
             f"linear: {_names(A.linear)}",
             f"hier: {_names(A.hier)}",
             f"initial: {A.initial}",
             f"final: {_names(A.final)}"]
    lines += [f"open {q} {a} -> {q2} {p}" for q, a, q2, p in sorted(A.opens)]
    lines += [f"close {q} {p} {a} -> {q2}" for q, p, a, q2 in sorted(A.closes)]
    lines += [f"eps {q} -> {q2}" for q, q2 in sorted(A.eps)]
    return "\n".join(lines) + "\n"


_KINDS = {"nwa": Nwa, "dnwa": Dnwa, "eps-nwa": EpsNwa}


def parse_nwa(text: str, check: bool = True) -> EpsNwa:
    """Parse the line format written by :func:`format_nwa`.

    Missing ``linear:``/``hier:`` sections are inferred from the rules.
    """
    header = None
    sections: dict = {}
    opens, closes, eps = [], [], []
    errors = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            if line not in _KINDS:
                raise ValidationError("automaton", [f"line {lineno}: expected header nwa|dnwa|eps-nwa, got {line!r}"])
            header = line
            continue
        key, sep, rest = line.partition(":")
        if sep and key.strip() in ("alphabet", "linear", "hier", "initial", "final"):
            sections[key.strip()] = rest.replace(",", " ").split()
            continue
        tok = line.split()
        if tok[0] == "open" and len(tok) == 6 and tok[3] == "->":
            opens.append((tok[1], tok[2], tok[4], tok[5]))
        elif tok[0] == "close" and len(tok) == 6 and tok[4] == "->":
            closes.append((tok[1], tok[2], tok[3], tok[5]))
        elif tok[0] == "eps" and len(tok) == 4 and tok[2] == "->":
            eps.append((tok[1], tok[3]))
        else:
            errors.append(f"line {lineno}: cannot parse {line!r}")
    if header is None:
        errors.append("empty automaton file")
    if "initial" not in sections or len(sections["initial"]) != 1:
        errors.append("exactly one initial state required")
    if errors:
        raise ValidationError("automaton", errors)
    cls = _KINDS[header]
    A = cls.build(sections.get("alphabet", ()), opens, closes, eps,
                  sections["initial"][0], sections.get("final", ()),
                  sections.get("linear"), sections.get("hier"))
    if check:
        require_valid(A)
    return A
