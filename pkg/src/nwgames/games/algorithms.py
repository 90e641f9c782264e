"""Specialised solvers for decidable fragments and the deletion-removal transform."""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .. import nwa as N
from ..errors import DeletingTransducerError, FunctionalityViolation
from ..nwt import CloseRule, Nwt, OpenRule, image_automaton, run_outputs
from ..words import NestedWord, Tag, cl, format_word, last_rooted_start, matching, op
from .model import JULIET, Game, SolveResult, Strategy, Verdict
from .engine import CALL, Arena


def check_win_replay_free(g: Game, w: Sequence[Tag]) -> SolveResult:
    """Replay-free games with an epsilon-free replacement transducer.

    Juliet either reads ahead or calls on a closing function symbol; after a
    call every transduct of the rooted suffix is tried and she continues
    right after the called position.  Replacement strings are never
    revisited, so the processed prefix plus the input position is the state.
    """
    w = NestedWord(w)
    if not g.cls.eps_free:
        raise ValueError("check_win_replay_free requires an epsilon-free transducer")
    arena = Arena(g)
    n = len(w)
    choice: dict = {}

    @lru_cache(maxsize=None)
    def cw(u: tuple, i: int) -> bool:
        if i == n:
            return arena.accepts(u)
        t = w[i]
        if cw(u + (t,), i + 1):
            return True
        if t.opening or t.label not in g.gamma:
            return False
        s = last_rooted_start(u + (t,))
        ys, _ = arena.romeo_moves(u[s:] + (t,))
        if ys and all(cw(u[:s] + y, i + 1) for y, _ in ys):
            choice[(u, i)] = CALL
            return True
        return False

    try:
        won = cw((), 0)
        stats = {"explored": cw.cache_info().currsize}
    finally:
        cw.cache_clear()
    verdict = Verdict.JULIET if won else Verdict.ROMEO
    moves = {f"{format_word(u)}|{i}": m for (u, i), m in choice.items()} if won else {}
    return SolveResult(verdict, Strategy(JULIET, moves) if won else None, stats)


def _call_sites(g: Game, w) -> list[tuple[int, int]]:
    """(start, end) of every rooted substring closed by a function symbol."""
    m = matching(w)
    return [(m[j], j + 1) for j, t in enumerate(w) if not t.opening and t.label in g.gamma]


def solve_single_call(g: Game, w: Sequence[Tag]) -> SolveResult:
    """At most one Call in the whole game (depth and input width 1)."""
    w = NestedWord(w)
    if g.accepts(w):
        return SolveResult(Verdict.JULIET, Strategy(JULIET, {}), {"checks": 0})
    T = N.complete(g.target, g.alphabet | g.R.output_labels())
    checks = 0
    for i, j in _call_sites(g, w):
        checks += 1
        last = w[i:j]
        if g.cls.non_deleting:
            B = image_automaton(g.R, last)
            ok = not N.is_empty(B) and N.included_in(N.splice(w, i, j, B), T)
        elif g.cls.eps_free:
            ys = run_outputs(g.R, last)
            ok = bool(ys) and all(g.accepts(w[:i] + y + w[j:]) for y in ys)
        else:
            raise DeletingTransducerError("solve_single_call requires a non-deleting or epsilon-free transducer")
        if ok:
            return SolveResult(Verdict.JULIET, Strategy(JULIET, {f"call@{j - 1}": CALL}),
                               {"checks": checks, "call_position": j - 1})
    return SolveResult(Verdict.ROMEO, None, {"checks": checks})


def _require_functional_relabelling(g: Game) -> None:
    cls = g.cls
    if not cls.relabelling:
        raise ValueError("the write-once solver requires a relabelling transducer")
    if not cls.functional_claimed:
        raise ValueError("the write-once solver requires a transducer claimed functional")


def build_juliet_transducer(g: Game) -> Nwt:
    """Relabelling transducer whose image on w is the set of write-once outcomes.

    In the copy state ``"copy"`` it reproduces the input.  At an opening tag
    with a function symbol it may instead simulate R on the rooted substring
    starting there; the simulation must end in a final state of R exactly at
    the matching closing tag, after which copying resumes.
    """
    _require_functional_relabelling(g)
    R = g.R
    C = "copy"
    sigma = g.alphabet | R.alphabet
    opens, closes = set(), set()
    for a in sigma:
        opens.add(OpenRule(C, a, C, C, (op(a),)))
        closes.add(CloseRule(C, C, a, C, (cl(a),)))
    for r in R.opens:
        if r.src == R.initial and r.label in g.gamma:
            opens.add(OpenRule(C, r.label, ("sim", r.dst), ("root", r.hier), r.out))
        opens.add(OpenRule(("sim", r.src), r.label, ("sim", r.dst), ("sim", r.hier), r.out))
    for r in R.closes:
        closes.add(CloseRule(("sim", r.src), ("sim", r.hier), r.label, ("sim", r.dst), r.out))
        if r.dst in R.final and r.label in g.gamma:
            closes.add(CloseRule(("sim", r.src), ("root", r.hier), r.label, C, r.out))
    return Nwt.build(sigma, opens, closes, (), C, {C}, functional=False)


def solve_write_once(g: Game, w: Sequence[Tag]) -> SolveResult:
    """Write-once games with a functional relabelling transducer."""
    w = NestedWord(w)
    RJ = build_juliet_transducer(g)
    B = N.intersect(image_automaton(RJ, w), g.target)
    target_word = N.witness(B)
    if target_word is None:
        return SolveResult(Verdict.ROMEO, None, {"automaton_states": len(B.linear)})
    called = _called_nodes(g, w, target_word)
    moves = {f"call@{j}": CALL for j in called}
    return SolveResult(Verdict.JULIET, Strategy(JULIET, moves),
                       {"automaton_states": len(B.linear), "target_word": format_word(target_word),
                        "calls": len(called)})


def _called_nodes(g: Game, w, target) -> list[int]:
    """Closing positions of an antichain of calls turning w into target."""
    m = matching(w)
    children: dict = {}
    stack = [-1]
    for i, t in enumerate(w):
        if t.opening:
            children.setdefault(stack[-1], []).append(i)
            stack.append(i)
        else:
            stack.pop()

    def cover(i) -> list[int] | None:
        j = m[i]
        if w[i] == target[i] and w[j] == target[j]:
            calls: list[int] = []
            for ch in children.get(i, []):
                sub = cover(ch)
                if sub is None:
                    break
                calls += sub
            else:
                return calls
        if w[i].label in g.gamma and tuple(target[i:j + 1]) in run_outputs(g.R, w[i:j + 1]):
            return [j]
        return None

    calls = []
    for i in children.get(-1, []):
        sub = cover(i)
        if sub is None:
            raise FunctionalityViolation("write-once witness could not be matched to call sites")
        calls += sub
    return sorted(calls)


# deletion removal -------------------------------------------------------------------

def _fresh_label(base: str, taken: set) -> str:
    name = f"{base}_del"
    while name in taken:
        name += "_"
    return name


def make_non_deleting(g: Game) -> Game:
    """Equivalent game whose transducer never deletes.

    Every rule with empty output instead writes a struck-out twin of the tag
    it reads (a separate struck label stands in for epsilon reads).  The new
    transducer copies struck tags in every state, and the target treats them
    as transparent brackets: reading one changes nothing but the stack.
    """
    R = g.R
    taken = set(g.alphabet) | R.alphabet | R.output_labels() | g.target.alphabet
    struck: dict = {}

    def strike(label):
        key = "eps" if label is None else label
        if key not in struck:
            struck[key] = _fresh_label(key, taken | set(struck.values()))
        return struck[key]

    opens, closes = [], []
    for r in R.opens:
        opens.append(r if r.out else r._replace(out=(op(strike(r.label)),)))
    for r in R.closes:
        closes.append(r if r.out else r._replace(out=(cl(strike(r.label)),)))
    if not struck:
        return g
    keep = "struck"
    while keep in R.hier:
        keep += "_"
    for s in struck.values():
        for q in R.linear:
            opens.append(OpenRule(q, s, q, keep, (op(s),)))
            closes.append(CloseRule(q, keep, s, q, (cl(s),)))
    R2 = Nwt(R.alphabet | set(struck.values()), R.linear, R.hier | {keep}, R.eps_hier,
             frozenset(opens), frozenset(closes), R.internals, R.initial, R.final,
             R.functional, R.depth_bound)

    sigma2 = set(g.alphabet) | set(struck.values())
    T = g.target
    skip = "skip"
    while skip in T.hier:
        skip += "_"
    t_opens = set(T.opens)
    t_closes = set(T.closes)
    for s in struck.values():
        for q in T.linear:
            t_opens.add((q, s, q, skip))
            t_closes.add((q, skip, s, q))
    T2 = N.Dnwa(frozenset(T.alphabet | set(struck.values())), T.linear, T.hier | {skip},
                frozenset(t_opens), frozenset(t_closes), T.eps, T.initial, T.final)
    T2 = N.complete(T2, sigma2)
    return Game(frozenset(sigma2), g.gamma, R2, T2)


def strip_struck(g2: Game, g: Game, word) -> NestedWord:
    """Drop the struck-out tags that make_non_deleting added."""
    extra = g2.alphabet - g.alphabet
    return NestedWord(t for t in word if t.label not in extra)


__all__ = ["build_juliet_transducer", "check_win_replay_free", "make_non_deleting",
           "solve_single_call", "solve_write_once", "strip_struck"]
