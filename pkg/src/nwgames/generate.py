"""Seeded random instances for property and cross-check tests."""

from __future__ import annotations

import random
from typing import Optional

from . import nwa as N
from .games.model import Game
from .nwt import CloseRule, InternalRule, Nwt, OpenRule
from .words import NestedWord, Tag, cl, op


def labels(n: int) -> list[str]:
    return [chr(ord("a") + i) for i in range(n)]


def random_word(rng: random.Random, alphabet, max_len: int, min_len: int = 0) -> NestedWord:
    """Uniform length (even, within bounds), then a random well-nested word."""
    alphabet = sorted(alphabet)
    pairs = rng.randint(min_len // 2, max_len // 2)
    out: list[Tag] = []
    stack: list[str] = []
    opens_left = pairs
    while opens_left or stack:
        if opens_left and (not stack or rng.random() < 0.5):
            a = rng.choice(alphabet)
            out.append(op(a))
            stack.append(a)
            opens_left -= 1
        else:
            out.append(cl(stack.pop()))
    return NestedWord(out)


def _small_wn(rng, alphabet, p: float) -> tuple:
    """Usually empty, sometimes a single short well-nested word."""
    if rng.random() >= p:
        return ()
    return tuple(random_word(rng, alphabet, 2, 2))


def random_nwt(rng: random.Random, alphabet, n_states: int = 3, *, relabelling: bool = False,
               deleting: float = 0.0, extra: float = 0.0, eps: float = 0.0,
               deterministic: bool = False, n_hier: int = 3, density: float = 0.9,
               out_alphabet=None) -> Nwt:
    """Random valid NWT.

    Each hierarchical state fixes the label b written around the matched
    pair (or None for a deleted pair), so every matchable opening/closing
    pair outputs <b>x ... y</b> with x, y well-nested and validity holds by
    construction.  ``extra`` is the chance of such padding x, y;
    ``deleting`` the share of deleting hierarchical states; ``eps`` the
    chance of an internal epsilon rule per state.
    """
    sigma = sorted(alphabet)
    outs = sorted(out_alphabet or alphabet)
    Q = list(range(n_states))
    hier = []
    for i in range(n_hier):
        b = None if rng.random() < deleting else rng.choice(outs)
        hier.append((f"p{i}", b))
    if not any(b is not None for _, b in hier) and not deleting:
        hier[0] = ("p0", rng.choice(outs))
    pad = 0.0 if relabelling else extra

    opens, closes, internals = [], [], []
    for q in Q:
        for a in sigma:
            k = 1 if deterministic else (rng.random() < density) + (rng.random() < density / 3)
            for _ in range(k):
                p = rng.choice(hier)
                out = () if p[1] is None else (op(p[1]),) + _small_wn(rng, outs, pad)
                opens.append(OpenRule(q, a, rng.choice(Q), p, out))
    for q in Q:
        for p in hier:
            for a in sigma:
                k = 1 if deterministic else (rng.random() < density) + (rng.random() < density / 3)
                for _ in range(k):
                    out = () if p[1] is None else _small_wn(rng, outs, pad) + (cl(p[1]),)
                    closes.append(CloseRule(q, p, a, rng.choice(Q), out))
    if eps and not deterministic:
        for q in Q:
            if rng.random() < eps:
                out = _small_wn(rng, outs, 0.5) if not relabelling else ()
                internals.append(InternalRule(q, rng.choice(Q), out))
    final = {q for q in Q if rng.random() < 0.5} or {rng.choice(Q)}
    return Nwt.build(set(sigma) | set(outs), opens, closes, internals, 0, final,
                     linear=set(Q), hier=set(hier), functional=deterministic)


def random_dnwa(rng: random.Random, alphabet, n_states: int = 3, n_hier: int = 2,
                p_final: float = 0.4) -> N.Dnwa:
    """Random total DNWA."""
    Q = list(range(n_states))
    P = [f"h{i}" for i in range(n_hier)]
    sigma = sorted(alphabet)
    opens = [(q, a, rng.choice(Q), rng.choice(P)) for q in Q for a in sigma]
    closes = [(q, p, a, rng.choice(Q)) for q in Q for p in P for a in sigma]
    final = {q for q in Q if rng.random() < p_final}
    return N.Dnwa.build(sigma, opens, closes, (), 0, final, linear=set(Q), hier=set(P))


def random_nwa(rng: random.Random, alphabet, n_states: int = 3, n_hier: int = 2,
               density: float = 0.5, eps: float = 0.0) -> N.EpsNwa:
    """Random, usually nondeterministic, epsilon-NWA."""
    Q = list(range(n_states))
    P = [f"h{i}" for i in range(n_hier)]
    sigma = sorted(alphabet)
    opens = [(q, a, q2, p) for q in Q for a in sigma for q2 in Q for p in P if rng.random() < density / n_hier]
    closes = [(q, p, a, q2) for q in Q for p in P for a in sigma for q2 in Q if rng.random() < density / 2]
    epsr = [(q, q2) for q in Q for q2 in Q if q != q2 and rng.random() < eps]
    final = {q for q in Q if rng.random() < 0.4}
    return N.EpsNwa.build(sigma, opens, closes, epsr, 0, final, linear=set(Q), hier=set(P))


def random_game(rng: random.Random, kind: str = "eps-free", n_labels: int = 2,
                n_states: int = 3, target_states: int = 3, attempts: int = 50) -> Game:
    """Random game of a given transducer kind with a non-empty target.

    Kinds: "eps-free", "non-deleting", "relabelling", "functional-relabelling",
    "deleting-relabelling".
    """
    sigma = labels(n_labels)
    for _ in range(attempts):
        gamma = {a for a in sigma if rng.random() < 0.6} or {rng.choice(sigma)}
        if kind == "eps-free":
            R = random_nwt(rng, sigma, n_states, deleting=0.25, extra=0.25)
        elif kind == "non-deleting":
            R = random_nwt(rng, sigma, n_states, extra=0.25)
        elif kind == "relabelling":
            R = random_nwt(rng, sigma, n_states, relabelling=True)
        elif kind == "functional-relabelling":
            R = random_nwt(rng, sigma, n_states, relabelling=True, deterministic=True)
        elif kind == "deleting-relabelling":
            R = random_nwt(rng, sigma, n_states, relabelling=True, deleting=0.35)
        else:
            raise ValueError(f"unknown game kind {kind!r}")
        T = random_dnwa(rng, sigma, target_states)
        if not N.is_empty(T):
            return Game(frozenset(sigma), frozenset(gamma), R, T)
    raise RuntimeError("could not draw a game with a non-empty target")


def rng_for(seed: Optional[int]) -> random.Random:
    return random.Random(seed)


def random_instance(rng: random.Random, kind: str = "eps-free", max_len: int = 6,
                    keep_member: float = 0.2, **kw) -> tuple[Game, NestedWord]:
    """Game plus input word, biased towards words not already in the target."""
    while True:
        g = random_game(rng, kind, **kw)
        w = random_word(rng, g.alphabet, max_len, min_len=2)
        if not g.accepts(w) or rng.random() < keep_member:
            return g, w
