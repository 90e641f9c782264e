"""Game semantics and the generic solver.

The solver explores the reachable configuration graph (up to the state
budget) and computes Juliet's attractor to the winning end configurations.
Plays that never end are Romeo wins, which is exactly what a least fixpoint
gives on a cyclic graph.  Two fixpoints are computed: a pessimistic one in
which unexplored configurations and truncated Romeo move sets count against
Juliet, and an optimistic one in which they count for her.  If they disagree
on the initial configuration the verdict is BudgetExhausted.
"""

from __future__ import annotations

import heapq
import random
import sys
from collections import deque
from typing import Callable, Optional, Sequence

from ..errors import BudgetExceeded, FunctionalityViolation
from ..nwt import enumerate_image, image_is_total, run_outputs
from ..words import NestedWord, Tag, format_word, last_rooted_start, parse_word, word_sort_key
from .model import (JULIET, ROMEO, ATag, Configuration, Constraints, Game, SolveResult, Strategy,
                    Verdict, annotate, initial_configuration, plain)

READ, CALL = "read", "call"


class Arena:
    """Successor computation for one game under fixed constraints.

    Configurations are kept canonical: annotations that the constraints
    cannot observe are erased and replacement origins are renumbered, so
    equal positions share one node.
    """

    def __init__(self, g: Game, c: Constraints = Constraints()):
        self.g, self.c = g, c
        cls = g.cls
        self.eps_free = cls.eps_free
        self.non_deleting = cls.non_deleting
        self.functional = cls.functional_claimed
        self.keep_level = c.max_call_depth is not None or c.write_once
        self.keep_origin = c.max_call_width is not None
        self._moves: dict = {}
        self._annotated: dict = {}
        self._accepts: dict = {}

    # Romeo ---------------------------------------------------------------------

    def romeo_moves(self, last: tuple) -> tuple[list, bool]:
        """(transduct, its text) pairs in enumeration order, and a truncation flag."""
        hit = self._moves.get(last)
        if hit is not None:
            return hit
        R = self.g.R
        if self.eps_free:
            outs, truncated = run_outputs(R, last), False
        else:
            budget = self.c.romeo_output_budget
            if budget is None:
                budget = len(last) + 8
            if self.non_deleting:
                outs = enumerate_image(R, last, budget)
                truncated = not image_is_total(R, last, budget)
            else:
                # deleting epsilon rules: no finite bound on the transducts
                outs, truncated = run_outputs(R, last, budget), True
        outs = sorted((tuple(u) for u in outs), key=word_sort_key)
        if self.functional and len(outs) > 1:
            raise FunctionalityViolation(
                f"transducer claimed functional maps {format_word(last)} to "
                f"{format_word(outs[0])} and {format_word(outs[1])}")
        hit = self._moves[last] = ([(y, format_word(y)) for y in outs], truncated)
        return hit

    def accepts(self, u: tuple) -> bool:
        hit = self._accepts.get(u)
        if hit is None:
            hit = self._accepts[u] = self.g.accepts(u)
        return hit

    # bookkeeping ---------------------------------------------------------------

    def counted(self, origin: int) -> bool:
        return self.c.max_call_width is not None and (origin != 0 or self.c.width_includes_input)

    def call_allowed(self, cfg: Configuration, t: ATag) -> bool:
        c = self.c
        if c.max_call_depth is not None and t.level + 1 > c.max_call_depth:
            return False
        if self.counted(t.origin) and dict(cfg.used).get(t.origin, 0) >= c.max_call_width:
            return False
        if c.write_once:
            s = last_rooted_start(cfg.u + (t,))
            if t.level or any(x.level for x in cfg.u[s:]):
                return False
        return True

    def canon(self, player: str, u: tuple, v: tuple, used: tuple) -> Configuration:
        if not self.keep_origin:
            if not self.keep_level:
                u = tuple(ATag(t.label, t.opening) for t in u)
                v = tuple(ATag(t.label, t.opening) for t in v)
            else:
                u = tuple(ATag(t.label, t.opening, t.level) for t in u)
                v = tuple(ATag(t.label, t.opening, t.level) for t in v)
            return Configuration(player, u, v, ())
        ren = {0: 0}
        for t in u + v:
            if t.origin not in ren:
                ren[t.origin] = len(ren)
        lvl = self.keep_level
        u = tuple(ATag(t.label, t.opening, t.level if lvl else 0, ren[t.origin]) for t in u)
        v = tuple(ATag(t.label, t.opening, t.level if lvl else 0, ren[t.origin]) for t in v)
        used = tuple(sorted((ren[o], n) for o, n in used if o in ren and n))
        return Configuration(player, u, v, used)

    def initial(self, w) -> Configuration:
        cfg = initial_configuration(w)
        return self.canon(JULIET, cfg.u, cfg.v, ())

    # moves ---------------------------------------------------------------------

    def outcome(self, cfg: Configuration) -> Optional[str]:
        """Winner of a terminal configuration, or None if the play goes on."""
        if cfg.player == JULIET and not cfg.v:
            return JULIET if self.accepts(plain(cfg.u)) else ROMEO
        return None

    def successors(self, cfg: Configuration) -> tuple[list, bool]:
        """(move, configuration) pairs and whether Romeo's moves were truncated."""
        u, v, used = cfg.u, cfg.v, cfg.used
        if cfg.player == JULIET:
            if not v:
                return [], False
            t = v[0]
            # reading and calling keep the tag order, so cfg stays canonical
            out = [(READ, Configuration(JULIET, u + (t,), v[1:], used))]
            if not t.opening and t.label in self.g.gamma and self.call_allowed(cfg, t):
                if self.counted(t.origin):
                    d = dict(used)
                    d[t.origin] = d.get(t.origin, 0) + 1
                    used = tuple(sorted(d.items()))
                out.append((CALL, Configuration(ROMEO, u, v, used)))
            return out, False
        t = v[0]
        s = last_rooted_start(u + (t,))
        last = plain(u[s:] + (t,))
        outs, truncated = self.romeo_moves(last)
        head = u[:s]
        level = t.level + 1 if self.keep_level else 0
        res = []
        if self.keep_origin:
            fresh = max((x.origin for x in u + v), default=0) + 1
            for y, text in outs:
                res.append((text, self.canon(JULIET, head, annotate(y, level, fresh) + v[1:], used)))
        else:
            key = (last, level)
            ann = self._annotated.get(key)
            if ann is None:
                ann = self._annotated[key] = [(annotate(y, level), text) for y, text in outs]
            for y, text in ann:
                res.append((text, Configuration(JULIET, head, y + v[1:], ())))
        return res, truncated


def successors(g: Game, k: Configuration, c: Constraints = Constraints()) -> list:
    """Moves available at k; raises BudgetExceeded if Romeo's set was truncated."""
    arena = Arena(g, c)
    res, truncated = arena.successors(arena.canon(k.player, k.u, k.v, k.used))
    if truncated:
        raise BudgetExceeded("Romeo move enumeration", c.romeo_output_budget)
    return res


# solver -----------------------------------------------------------------------------

# exploration stops at the first stage that settles the root
_STAGES = (500, 5_000, 50_000)


class _Graph:
    """Configuration graph explored breadth-first, growable in stages.

    Nodes whose successors are still unknown (succ[i] is None) form the
    frontier.  Levels and per-origin call counts never decrease along a
    play, so expanding by (max level, max calls) first finishes every game
    with tighter bounds before touching the extra room of looser ones.
    """

    def __init__(self, arena: Arena, root: Configuration):
        self.arena = arena
        self.nodes = [root]
        self.index = {root: 0}
        self.succ: list = [None]     # per node: [(move, idx)] once expanded
        self.truncated: list = [False]
        self.expanded = 0
        self._todo = [(self._rank(root), 0)]

    def _rank(self, k: Configuration) -> tuple:
        level = max((t.level for t in k.u + k.v), default=0) if self.arena.keep_level else 0
        calls = max((n for _, n in k.used), default=0)
        return level, calls

    @property
    def frontier(self) -> int:
        return len(self._todo)

    def grow(self, budget: int) -> None:
        todo = self._todo
        while todo and self.expanded < budget:
            _, i = heapq.heappop(todo)
            moves, trunc = self.arena.successors(self.nodes[i])
            edges = []
            for move, nxt in moves:
                j = self.index.get(nxt)
                if j is None:
                    j = self.index[nxt] = len(self.nodes)
                    self.nodes.append(nxt)
                    self.succ.append(None)
                    self.truncated.append(False)
                    heapq.heappush(todo, (self._rank(nxt), j))
                edges.append((move, j))
            self.succ[i] = edges
            self.truncated[i] = trunc
            self.expanded += 1
        self.preds = [[] for _ in self.nodes]
        for i, edges in enumerate(self.succ):
            for _, j in edges or ():
                self.preds[j].append(i)

    def attractor(self, arena: Arena, optimistic: bool) -> dict:
        """Node -> (rank, chosen move) for nodes from which Juliet forces a win."""
        win: dict = {}
        need = []
        queue = deque()
        for i, cfg in enumerate(self.nodes):
            edges = self.succ[i]
            if edges is None:
                need.append(None)
                if optimistic:
                    win[i] = (0, None)
                    queue.append(i)
                continue
            if cfg.player == JULIET:
                need.append(1)
                if arena.outcome(cfg) == JULIET:
                    win[i] = (0, None)
                    queue.append(i)
            elif self.truncated[i] and not optimistic:
                need.append(None)
            else:
                need.append(len(edges))
                if not edges and self.truncated[i]:
                    win[i] = (0, None)
                    queue.append(i)
        while queue:
            j = queue.popleft()
            rank = win[j][0] + 1
            for i in self.preds[j]:
                if i in win or need[i] is None:
                    continue
                need[i] -= 1
                if self.nodes[i].player == JULIET:
                    move = next(m for m, k in self.succ[i] if k == j)
                    win[i] = (rank, move)
                    queue.append(i)
                elif need[i] == 0:
                    win[i] = (rank, None)
                    queue.append(i)
        return win


def solve(g: Game, w: Sequence[Tag], c: Constraints = Constraints(), witness: bool = True) -> SolveResult:
    """Decide whether Juliet wins the game on w under the constraints."""
    w = NestedWord(w)
    arena = Arena(g, c)
    root = arena.initial(w)
    graph = _Graph(arena, root)
    budgets = sorted({b for b in _STAGES if b < c.state_budget} | {c.state_budget})
    for budget in budgets:
        graph.grow(budget)
        stats = {"explored": graph.expanded, "configurations": len(graph.nodes),
                 "frontier": graph.frontier, "truncated_romeo_nodes": sum(graph.truncated)}
        pess = graph.attractor(arena, optimistic=False)
        if 0 in pess:
            strat = _juliet_witness(graph, pess) if witness else None
            return SolveResult(Verdict.JULIET, strat, stats)
        opt = graph.attractor(arena, optimistic=True)
        if 0 not in opt:
            strat = _romeo_witness(graph, opt) if witness else None
            return SolveResult(Verdict.ROMEO, strat, stats)
        if not graph.frontier:
            break
    return SolveResult(Verdict.BUDGET, None, stats)


def _juliet_witness(graph: _Graph, win: dict) -> Strategy:
    moves = {}
    seen = {0}
    todo = [0]
    while todo:
        i = todo.pop()
        cfg = graph.nodes[i]
        if cfg.player == JULIET:
            move = win[i][1]
            if move is None:
                continue
            moves[cfg.digest()] = move
            nxt = [next(k for m, k in graph.succ[i] if m == move)]
        else:
            nxt = [k for _, k in graph.succ[i]]
        for k in nxt:
            if k not in seen:
                seen.add(k)
                todo.append(k)
    return Strategy(JULIET, moves)


def _romeo_witness(graph: _Graph, opt: dict) -> Strategy:
    moves = {}
    seen = {0}
    todo = [0]
    while todo:
        i = todo.pop()
        cfg = graph.nodes[i]
        edges = graph.succ[i]
        if cfg.player == ROMEO:
            escape = [(m, k) for m, k in edges if k not in opt]
            if not escape:
                continue  # no replacement at all: Romeo has already won
            m, k = escape[0]
            moves[cfg.digest()] = m
            nxt = [k]
        else:
            nxt = [k for _, k in edges]
        for k in nxt:
            if k not in seen:
                seen.add(k)
                todo.append(k)
    return Strategy(ROMEO, moves)


def solve_naive(g: Game, w: Sequence[Tag], c: Constraints = Constraints(),
                max_nodes: int = 2_000_000) -> bool:
    """Memoless search of the play tree; a repeat on the current path is a Romeo win.

    Exponential; only meant as an oracle on small instances.
    """
    arena = Arena(g, c)
    path: set = set()
    visited = [0]
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20_000))

    def wins(cfg) -> bool:
        if cfg in path:
            return False
        res = arena.outcome(cfg)
        if res is not None:
            return res == JULIET
        visited[0] += 1
        if visited[0] > max_nodes:
            raise BudgetExceeded("naive search", max_nodes)
        moves, truncated = arena.successors(cfg)
        if truncated:
            raise BudgetExceeded("Romeo move enumeration", c.romeo_output_budget)
        path.add(cfg)
        try:
            if cfg.player == JULIET:
                return any(wins(k) for _, k in moves)
            return bool(moves) and all(wins(k) for _, k in moves)
        finally:
            path.discard(cfg)

    try:
        return wins(arena.initial(NestedWord(w)))
    finally:
        sys.setrecursionlimit(old)


# replay ----------------------------------------------------------------------------

def play(g: Game, w: Sequence[Tag], c: Constraints = Constraints(),
         juliet: Strategy | Callable | None = None, romeo: Strategy | Callable | None = None,
         seed: Optional[int] = None, max_steps: int = 100_000) -> list:
    """Play one game and return [(configuration, move)]; the last move is None.

    Strategies map configuration digests to moves (or are callables taking
    the configuration).  Juliet defaults to Read; Romeo's replies without a
    strategy are drawn with ``seed`` (first in enumeration order if None).
    """
    arena = Arena(g, c)
    rng = random.Random(seed) if seed is not None else None
    cfg = arena.initial(NestedWord(w))
    trace = []
    seen = set()
    for _ in range(max_steps):
        moves, truncated = arena.successors(cfg)
        if not moves:
            trace.append((cfg, None))
            return trace
        if cfg.player == JULIET:
            move = _lookup(juliet, cfg) or READ
        else:
            move = _lookup(romeo, cfg)
            if move is None:
                move = rng.choice(moves)[0] if rng else moves[0][0]
        chosen = [k for m, k in moves if m == move or (cfg.player == ROMEO and _same_word(m, move))]
        if not chosen:
            raise ValueError(f"move {move!r} is not available at {cfg.text()}")
        trace.append((cfg, move))
        key = (cfg, move)
        if key in seen and rng is None:
            raise BudgetExceeded("play length (cycle)", max_steps)
        seen.add(key)
        cfg = chosen[0]
    raise BudgetExceeded("play length", max_steps)


def _lookup(strategy, cfg):
    if strategy is None:
        return None
    if callable(strategy) and not isinstance(strategy, Strategy):
        return strategy(cfg)
    return strategy.moves.get(cfg.digest())


def _same_word(a: str, b: str) -> bool:
    try:
        return parse_word(a) == parse_word(b)
    except ValueError:
        return False


def final_word(trace: list) -> NestedWord:
    cfg = trace[-1][0]
    return NestedWord(plain(cfg.u + cfg.v))


def winner(g: Game, trace: list, c: Constraints = Constraints()) -> str:
    """Winner of a finished play (Romeo if it ended at a Romeo node)."""
    cfg = trace[-1][0]
    return Arena(g, c).outcome(cfg) or ROMEO


def all_plays_won(g: Game, w: Sequence[Tag], c: Constraints, juliet: Strategy,
                  max_nodes: int = 200_000) -> bool:
    """Does ``juliet`` win against every Romeo reply?  Cycles count as losses."""
    arena = Arena(g, c)
    root = arena.initial(NestedWord(w))
    # a strategy is winning iff no Romeo-reachable play escapes; search the
    # strategy-restricted graph for a losing leaf or a cycle
    color: dict = {root: 1}
    count = 0

    def children(cfg):
        moves, truncated = arena.successors(cfg)
        if truncated:
            raise BudgetExceeded("Romeo move enumeration", arena.c.romeo_output_budget)
        if cfg.player == JULIET:
            move = juliet.moves.get(cfg.digest(), READ)
            return [k for m, k in moves if m == move]
        return [k for _, k in moves]

    if arena.outcome(root) is not None:
        return arena.outcome(root) == JULIET
    stack = [(root, iter(children(root)))]
    while stack:
        cfg, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            color[cfg] = 2
            stack.pop()
            continue
        state = color.get(nxt)
        if state == 1:
            return False
        if state == 2:
            continue
        res = arena.outcome(nxt)
        if res is not None:
            if res != JULIET:
                return False
            color[nxt] = 2
            continue
        kids = children(nxt)
        if not kids:
            return False
        count += 1
        if count > max_nodes:
            raise BudgetExceeded("strategy check", max_nodes)
        color[nxt] = 1
        stack.append((nxt, iter(kids)))
    return True
