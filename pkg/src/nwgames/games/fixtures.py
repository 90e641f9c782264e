"""Hand-built games: the doubling family and a few small examples."""

from __future__ import annotations

from .. import nwa as N
from ..errors import BudgetExceeded
from ..nwt import CloseRule, Nwt, OpenRule
from ..words import NestedWord, cl, op, parse_word
from .engine import CALL, READ
from .model import Configuration, Constraints, Game

DEFAULT_SIZE_LIMIT = 1 << 16


def tower(k: int, n: int) -> int:
    """Exp(k, n): Exp(0, n) = n and Exp(k, n) = 2 ** Exp(k - 1, n)."""
    e = n
    for _ in range(k):
        e = 2 ** e
    return e


def _exp_bounded(k: int, n: int, limit: int) -> int:
    e = n
    for _ in range(k):
        if e > limit.bit_length():
            raise BudgetExceeded("doubling target size", limit)
        e = 2 ** e
    if e > limit:
        raise BudgetExceeded("doubling target size", limit)
    return e


def _c(j: int) -> str:
    return f"c{j}"


def gen_doubling_game(k: int, n: int, size_limit: int = DEFAULT_SIZE_LIMIT) -> tuple[Game, NestedWord]:
    """Deterministic epsilon-free game whose scripted play grows the word to 2*Exp(k, n).

    The input is the path <k-1>..<1><c0>^n<c1>..<ck> closed again.  Calling
    a node labelled c_j deletes it and doubles every c_{j+1} node below;
    calling a numbered node i deletes it and copies the rest, which lets
    Juliet call the copied c_i nodes once more.  The target is the single
    path of ck nodes of the final length.
    """
    if k < 1 or n < 1:
        raise ValueError("k and n must be at least 1")
    E = _exp_bounded(k, n, size_limit)
    cs = [_c(j) for j in range(k + 1)]
    nums = [str(i) for i in range(1, k)]
    sigma = set(cs) | set(nums)
    gamma = set(cs[:k]) | set(nums)

    opens, closes = [], []
    # hierarchical states: root (the called node), copy, double, sink
    roots = {_c(j): ("dbl", j) for j in range(k)}
    roots.update({i: ("cp",) for i in nums})
    inner = set(roots.values())
    for a in sigma:
        if a in roots:
            opens.append(OpenRule("start", a, roots[a], "root", ()))
        else:
            opens.append(OpenRule("start", a, "sink", "sinkp", ()))
        opens.append(OpenRule("done", a, "sink", "sinkp", ()))
        opens.append(OpenRule("sink", a, "sink", "sinkp", ()))
        for q in inner:
            if q[0] == "dbl" and a == _c(q[1] + 1):
                opens.append(OpenRule(q, a, q, "dblp", (op(a), op(a))))
            else:
                opens.append(OpenRule(q, a, q, "cpp", (op(a),)))
    hier = ["root", "cpp", "dblp", "sinkp"]
    for a in sigma:
        for p in hier:
            for q in ("start", "done", "sink"):
                closes.append(CloseRule(q, p, a, "sink", ()))
            for q in inner:
                if p == "cpp":
                    closes.append(CloseRule(q, p, a, q, (cl(a),)))
                elif p == "dblp" and q[0] == "dbl" and a == _c(q[1] + 1):
                    closes.append(CloseRule(q, p, a, q, (cl(a), cl(a))))
                elif p == "root" and roots.get(a) == q:
                    closes.append(CloseRule(q, p, a, "done", ()))
                else:
                    closes.append(CloseRule(q, p, a, "sink", ()))
    R = Nwt.build(sigma, opens, closes, (), "start", {"done"}, functional=True)

    ck = cs[k]
    t_opens = [(i, ck, i + 1, "p") for i in range(E)]
    t_closes = [(E + i, "p", ck, E + i + 1) for i in range(E)]
    T = N.Dnwa.build(sigma, t_opens, t_closes, (), 0, {2 * E})

    w = [op(i) for i in reversed(nums)] + [op(cs[0])] * n + [op(c) for c in cs[1:]]
    w += [cl(c) for c in reversed(cs[1:])] + [cl(cs[0])] * n + [cl(i) for i in nums]
    return Game(sigma, gamma, R, T), NestedWord(w)


def doubling_strategy(k: int):
    """Scripted Juliet strategy: in round r call c_{r-1} nodes, then node r."""
    def choose(cfg: Configuration) -> str:
        t = cfg.v[0]
        if t.opening:
            return READ
        present = {x.label for x in cfg.u + cfg.v if x.label.isdigit()}
        rnd = min((int(x) for x in present), default=k)
        return CALL if t.label in (_c(rnd - 1), str(rnd)) else READ
    return choose


DOUBLING_CONSTRAINTS = Constraints(max_call_depth=2)


# small examples ---------------------------------------------------------------------

def relabel_game(sigma, gamma, mapping: dict, target_words, functional: bool = True) -> Game:
    """Game whose transducer relabels the root via ``mapping`` and copies the rest.

    ``mapping`` sends a root label to a list of replacement labels; the
    target accepts exactly ``target_words``.
    """
    sigma = set(sigma)
    opens, closes = [], []
    for a, bs in mapping.items():
        for b in bs:
            opens.append(OpenRule("i", a, "in", ("root", b), (op(b),)))
            closes.append(CloseRule("in", ("root", b), a, "f", (cl(b),)))
    for a in sigma:
        opens.append(OpenRule("in", a, "in", ("copy", a), (op(a),)))
        closes.append(CloseRule("in", ("copy", a), a, "in", (cl(a),)))
    R = Nwt.build(sigma, opens, closes, (), "i", {"f"}, functional=functional)
    target_words = list(target_words)
    if len(target_words) == 1:
        T = N.singleton(target_words[0], sigma)
    else:
        A = N.empty_nwa(sigma)
        for w in target_words:
            A = N.union(A, N.singleton(w, sigma))
        T = N.determinize(A)
    return Game(sigma, gamma, R, T)


def a_to_b_game() -> Game:
    """Sigma = {a, b}, Gamma = {a}; a call on an a-node renames it b; T = {<b></b>}."""
    return relabel_game({"a", "b"}, {"a"}, {"a": ["b"]}, [parse_word("<b></b>")])


def swap_cycle_game() -> Game:
    """a and b swap forever under calls; the target needs a t-node that never appears."""
    return relabel_game({"a", "b", "t"}, {"a", "b"}, {"a": ["b"], "b": ["a"]},
                        [parse_word("<t></t>")])


__all__ = ["DOUBLING_CONSTRAINTS", "a_to_b_game", "doubling_strategy",
           "gen_doubling_game", "relabel_game", "swap_cycle_game", "tower"]
