"""Brute-force run enumeration over epsilon-extensions.

This is the reference semantics used as a test oracle and as the Romeo move
generator for transducers without epsilon moves.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..words import Tag
from .core import Nwt, is_eps_free


def run_outputs(T: Nwt, w: Sequence[Tag], max_len: Optional[int] = None,
                stack_cap: Optional[int] = None) -> set[tuple]:
    """All outputs of accepting runs of T on w, restricted to length <= max_len.

    Configurations are (position, state, stack, output so far); the stack
    holds (hierarchical state, input label or None).  Repeated configurations
    are pruned, so eps cycles terminate.  Without max_len the transducer must
    be eps-free.  ``stack_cap`` bounds the number of pending epsilon openings
    (only relevant for deleting transducers; default max_len).
    """
    if max_len is None and not is_eps_free(T):
        raise ValueError("max_len is required for transducers with epsilon moves")
    if stack_cap is None:
        stack_cap = max_len if max_len is not None else 0
    w = tuple(w)
    n = len(w)
    results: set = set()
    seen: set = set()
    open_from, close_from, internal_from = T.open_from, T.close_from, T.internal_from
    final = T.final
    todo = [(0, T.initial, (), (), 0)]
    while todo:
        cfg = todo.pop()
        if cfg in seen:
            continue
        seen.add(cfg)
        i, q, stack, out, neps = cfg
        if i == n and not stack and q in final:
            results.add(out)

        def push(i2, q2, stack2, rule_out, neps2):
            out2 = out + rule_out if rule_out else out
            if max_len is not None and len(out2) > max_len:
                return
            todo.append((i2, q2, stack2, out2, neps2))

        for r in internal_from.get(q, ()):
            push(i, r.dst, stack, r.out, neps)
        if neps < stack_cap:
            for r in open_from.get((q, None), ()):
                push(i, r.dst, stack + ((r.hier, None),), r.out, neps + 1)
        if stack and stack[-1][1] is None:
            for r in close_from.get((q, stack[-1][0], None), ()):
                push(i, r.dst, stack[:-1], r.out, neps - 1)
        if i < n:
            tag = w[i]
            if tag.opening:
                for r in open_from.get((q, tag.label), ()):
                    push(i + 1, r.dst, stack + ((r.hier, tag.label),), r.out, neps)
            elif stack and stack[-1][1] == tag.label:
                for r in close_from.get((q, stack[-1][0], tag.label), ()):
                    push(i + 1, r.dst, stack[:-1], r.out, neps)
    return results

