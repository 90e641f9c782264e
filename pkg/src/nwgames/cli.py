"""Command-line front end.

Exit codes: 0 success / true / JulietWins, 1 false / RomeoWins,
2 usage or validation error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import nwa as N
from .errors import BudgetExceeded, DeletingTransducerError, FunctionalityViolation, ValidationError
from .games import (Constraints, Strategy, Verdict, check_win_replay_free, doubling_strategy,
                    final_word, format_game, gen_doubling_game, parse_game, play, solve,
                    solve_single_call, solve_write_once, validate_game, winner)
from .games.fixtures import DOUBLING_CONSTRAINTS, tower
from .games.model import JULIET
from .nwt import (compose, enumerate_image, format_nwt, image_is_total, parse_nwt, run_outputs,
                  typecheck_counterexample, validate_nwt)
from .words import NestedWord, format_word, parse_word, word_sort_key

OK, FALSE, USAGE, BUDGET = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = USAGE):
        super().__init__(message)
        self.code = code


# input helpers ----------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}")


def _header(text: str) -> str:
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            return line
    return ""


def load_word(arg: str) -> NestedWord:
    """A word file, or the word itself when the argument starts with '<' or is empty."""
    text = arg if arg.lstrip().startswith("<") or arg == "" else _read(arg)
    return parse_word(text)


def load_automaton(path: str) -> N.EpsNwa:
    return N.parse_nwa(_read(path))


def load_nwt(path: str):
    return parse_nwt(_read(path))


def load_game(path: str):
    return parse_game(_read(path), Path(path).parent)


def _bound(text: str):
    if text in ("unbounded", "inf", "none"):
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number or 'unbounded', got {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError("bounds must be non-negative")
    return n


def _natural(text: str) -> int:
    n = _bound(text)
    if n is None:
        raise argparse.ArgumentTypeError("expected a natural number")
    return n


def constraints_from(args) -> Constraints:
    return Constraints(max_call_depth=args.depth, max_call_width=args.width,
                       width_includes_input=args.width_includes_input, write_once=args.write_once,
                       romeo_output_budget=args.romeo_budget, state_budget=args.state_budget)


# output -----------------------------------------------------------------------------

class Report:
    def __init__(self, command: str, as_json: bool, out):
        self.data: dict = {"command": command}
        self.lines: list[str] = []
        self.as_json = as_json
        self.out = out

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def finish(self, code: int) -> int:
        if self.as_json:
            self.data["exit_code"] = code
            json.dump(self.data, self.out, indent=2, sort_keys=True)
            self.out.write("\n")
        else:
            for line in self.lines:
                self.out.write(line + "\n")
        return code


# commands ---------------------------------------------------------------------------

def _kind_of(path: str) -> str:
    text = _read(path)
    head = _header(text)
    if head in ("nwa", "dnwa", "eps-nwa"):
        return "automaton"
    if head == "nwt":
        return "transducer"
    if head == "game":
        return "game"
    if head.startswith("strategy"):
        return "strategy"
    if head.startswith("<") or not head:
        return "word"
    raise CliError(f"{path}: unknown file kind (header {head!r})")


def cmd_validate(args, rep: Report) -> int:
    files = []
    bad = False
    for path in args.files:
        kind = _kind_of(path)
        defects = []
        try:
            if kind == "automaton":
                defects = N.validate(N.parse_nwa(_read(path), check=False))
            elif kind == "transducer":
                defects = validate_nwt(parse_nwt(_read(path), check=False))
            elif kind == "game":
                defects = validate_game(load_game(path))
            elif kind == "strategy":
                Strategy.from_text(_read(path))
            else:
                load_word(path)
        except (ValidationError, ValueError) as e:
            defects = list(getattr(e, "defects", None) or [str(e)])
        bad |= bool(defects)
        files.append({"path": path, "kind": kind, "ok": not defects, "defects": defects})
        rep.say(f"{path}: {kind} {'ok' if not defects else 'INVALID'}")
        for d in defects:
            rep.say(f"  - {d}")
    rep.data["files"] = files
    return USAGE if bad else OK


def cmd_accept(args, rep: Report) -> int:
    A = load_automaton(args.automaton)
    w = load_word(args.word)
    unknown = {t.label for t in w} - A.alphabet
    if unknown:
        raise CliError(f"word uses labels outside the automaton alphabet: {' '.join(sorted(unknown))}")
    ok = N.accepts(A, w)
    rep.data["accepted"] = ok
    rep.say("accepted" if ok else "rejected")
    return OK if ok else FALSE


def cmd_transduce(args, rep: Report) -> int:
    T = load_nwt(args.transducer)
    w = load_word(args.word)
    max_len = args.max_len
    if max_len is None and not T.internals and not any(r.label is None for r in (*T.opens, *T.closes)):
        outs = run_outputs(T, w)
        complete = True
    else:
        max_len = max_len if max_len is not None else len(w) + 8
        outs = enumerate_image(T, w, max_len)
        complete = image_is_total(T, w, max_len)
    words = sorted((tuple(u) for u in outs), key=word_sort_key)
    rep.data.update({"transducts": [format_word(u) for u in words], "complete": complete,
                     "max_len": max_len})
    for u in words:
        rep.say(format_word(u) or "(empty word)")
    if not complete:
        rep.say(f"# truncated at length {max_len}")
    return OK if words else FALSE


def cmd_compose(args, rep: Report) -> int:
    T = compose(load_nwt(args.first), load_nwt(args.second))
    text = format_nwt(T)
    rep.data.update({"states": len(T.linear), "rules": T.size, "output": args.output})
    if args.output:
        Path(args.output).write_text(text)
        rep.say(f"wrote {args.output} ({len(T.linear)} states, {T.size} rules)")
    else:
        rep.data["nwt"] = text
        rep.say(text.rstrip("\n"))
    return OK


def cmd_typecheck(args, rep: Report) -> int:
    T = load_nwt(args.transducer)
    A1, A2 = load_automaton(args.input_type), load_automaton(args.output_type)
    cex = typecheck_counterexample(T, A1, A2, budget=args.state_budget)
    rep.data["holds"] = cex is None
    rep.data["counterexample"] = None if cex is None else format_word(cex)
    if cex is None:
        rep.say("typechecks")
        return OK
    rep.say(f"fails: output {format_word(cex) or '(empty word)'} is not in the output type")
    return FALSE


_ALGORITHMS = ("generic", "replay-free", "single-call", "write-once")


def cmd_solve(args, rep: Report) -> int:
    g = load_game(args.game)
    w = load_word(args.word)
    _check_word(g, w)
    c = constraints_from(args)
    algo = args.algorithm
    if algo == "generic":
        res = solve(g, w, c)
    elif algo == "replay-free":
        res = check_win_replay_free(g, w)
    elif algo == "single-call":
        res = solve_single_call(g, w)
    else:
        res = solve_write_once(g, w)
    rep.data.update(res.as_dict())
    rep.data["algorithm"] = algo
    rep.data["constraints"] = {"depth": c.max_call_depth, "width": c.max_call_width,
                               "width_includes_input": c.width_includes_input,
                               "write_once": c.write_once, "romeo_budget": c.romeo_output_budget,
                               "state_budget": c.state_budget}
    rep.say(str(res.verdict))
    rep.say("stats: " + ", ".join(f"{k}={v}" for k, v in sorted(res.stats.items())))
    if res.witness is not None and args.witness_out:
        Path(args.witness_out).write_text(res.witness.to_text())
        rep.say(f"witness written to {args.witness_out}")
    if res.witness is not None and algo == "generic" and args.show_trace:
        _trace_lines(rep, play(g, w, c, juliet=res.witness if res.witness.player == JULIET else None,
                               romeo=res.witness if res.witness.player != JULIET else None,
                               seed=args.seed))
    return {Verdict.JULIET: OK, Verdict.ROMEO: FALSE, Verdict.BUDGET: BUDGET}[res.verdict]


def _check_word(g, w) -> None:
    unknown = {t.label for t in w} - g.alphabet
    if unknown:
        raise CliError(f"word uses labels outside the game alphabet: {' '.join(sorted(unknown))}")


def _trace_lines(rep: Report, trace) -> list:
    steps = []
    for i, (cfg, move) in enumerate(trace):
        steps.append({"step": i, "digest": cfg.digest(),
                      "player": "juliet" if cfg.player == JULIET else "romeo",
                      "u": format_word(t.tag for t in cfg.u), "v": format_word(t.tag for t in cfg.v),
                      "move": move})
        rep.say(f"{i:4d} {cfg.digest()} {cfg.text()}" + (f"  => {move}" if move else ""))
    return steps


def cmd_trace(args, rep: Report) -> int:
    g = load_game(args.game)
    w = load_word(args.word)
    _check_word(g, w)
    c = constraints_from(args)
    juliet = romeo = None
    if args.strategy:
        strat = Strategy.from_text(_read(args.strategy))
    else:
        res = solve(g, w, c)
        if res.verdict == Verdict.BUDGET:
            raise CliError("no strategy given and the game could not be decided", BUDGET)
        strat = res.witness
    if strat.player == JULIET:
        juliet = strat
    else:
        romeo = strat
    trace = play(g, w, c, juliet=juliet, romeo=romeo, seed=args.seed)
    rep.data["steps"] = _trace_lines(rep, trace)
    who = winner(g, trace, c)
    rep.data["final_word"] = format_word(final_word(trace))
    rep.data["winner"] = "juliet" if who == JULIET else "romeo"
    rep.say(f"winner: {'Juliet' if who == JULIET else 'Romeo'}")
    return OK if who == JULIET else FALSE


def cmd_gen_doubling(args, rep: Report) -> int:
    g, w = gen_doubling_game(args.k, args.n, size_limit=args.size_limit)
    expected = 2 * tower(args.k, args.n)
    rep.data.update({"k": args.k, "n": args.n, "input_length": len(w),
                     "expected_final_length": expected, "files": []})
    rep.say(f"doubling game k={args.k} n={args.n}: input length {len(w)}, "
            f"expected final length {expected}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        files = {"R.nwt": format_nwt(g.R), "T.nwa": N.format_nwa(g.target),
                 "game.g": format_game(g, "R.nwt", "T.nwa"), "word.nw": format_word(w) + "\n"}
        for name, text in files.items():
            (out / name).write_text(text)
            rep.data["files"].append(str(out / name))
        rep.say(f"wrote {', '.join(sorted(files))} to {out}")
    else:
        rep.say(f"input: {format_word(w)}")
    code = OK
    if args.run_script:
        trace = play(g, w, DOUBLING_CONSTRAINTS, juliet=doubling_strategy(args.k))
        final = final_word(trace)
        won = winner(g, trace, DOUBLING_CONSTRAINTS) == JULIET
        rep.data.update({"final_length": len(final), "script_wins": won,
                         "calls": sum(1 for _, m in trace if m == "call")})
        rep.say(f"scripted strategy: final length {len(final)}, "
                f"{'in' if won else 'not in'} the target")
        code = OK if won and len(final) == expected else FALSE
    return code


def cmd_enum(args, rep: Report) -> int:
    kind = _kind_of(args.file)
    if kind == "automaton":
        words = N.enumerate_language(load_automaton(args.file), args.max_len)
    elif kind == "transducer":
        if args.word is None:
            raise CliError("enum on a transducer needs --word")
        words = enumerate_image(load_nwt(args.file), load_word(args.word), args.max_len)
    else:
        raise CliError(f"enum expects an automaton or a transducer, got a {kind}")
    words = sorted((tuple(u) for u in words), key=word_sort_key)
    rep.data["words"] = [format_word(u) for u in words]
    rep.data["max_len"] = args.max_len
    for u in words:
        rep.say(format_word(u) or "(empty word)")
    return OK if words else FALSE


# parser -----------------------------------------------------------------------------

def _add_game_flags(p) -> None:
    p.add_argument("--depth", type=_bound, default=None, help="max Call depth (N or unbounded)")
    p.add_argument("--width", type=_bound, default=None, help="max Calls per replacement (N or unbounded)")
    p.add_argument("--width-includes-input", action="store_true",
                   help="also bound Calls on input positions")
    p.add_argument("--write-once", action="store_true", help="never call a rewritten part again")
    p.add_argument("--romeo-budget", type=_natural, default=None,
                   help="length cap when enumerating Romeo's replacements")
    p.add_argument("--state-budget", type=_natural, default=200_000,
                   help="max configurations to explore")
    p.add_argument("--seed", type=int, default=None, help="seed for Romeo's replies in traces")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nwgames", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check automata, transducers, games or words")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("accept", help="membership of a word in an automaton")
    p.add_argument("automaton")
    p.add_argument("word")

    p = sub.add_parser("transduce", help="transducts of a word")
    p.add_argument("transducer")
    p.add_argument("word")
    p.add_argument("--max-len", type=_natural, default=None)

    p = sub.add_parser("compose", help="compose two non-deleting transducers")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")

    p = sub.add_parser("typecheck", help="is T(L(A1)) contained in L(A2)?")
    p.add_argument("transducer")
    p.add_argument("input_type")
    p.add_argument("output_type")
    p.add_argument("--state-budget", type=_natural, default=N.DEFAULT_STATE_BUDGET)

    p = sub.add_parser("solve", help="decide who wins a game on a word")
    p.add_argument("game")
    p.add_argument("word")
    _add_game_flags(p)
    p.add_argument("--algorithm", choices=_ALGORITHMS, default="generic",
                   help="generic search, or one of the specialised solvers")
    p.add_argument("--witness-out", help="write the witness strategy to this file")
    p.add_argument("--show-trace", action="store_true", help="print one play following the witness")

    p = sub.add_parser("trace", help="play a game following a strategy")
    p.add_argument("game")
    p.add_argument("word")
    p.add_argument("--strategy", help="strategy file (default: the solver's witness)")
    _add_game_flags(p)

    p = sub.add_parser("gen-doubling", help="write the doubling game fixture")
    p.add_argument("--k", type=_natural, required=True)
    p.add_argument("--n", type=_natural, required=True)
    p.add_argument("--out", help="directory for game.g, R.nwt, T.nwa and word.nw")
    p.add_argument("--run-script", action="store_true", help="replay the scripted strategy")
    p.add_argument("--size-limit", type=_natural, default=1 << 16)

    p = sub.add_parser("enum", help="list words of an automaton or transducts of a word")
    p.add_argument("file")
    p.add_argument("--max-len", type=_natural, required=True)
    p.add_argument("--word")
    return parser


COMMANDS = {"validate": cmd_validate, "accept": cmd_accept, "transduce": cmd_transduce,
            "compose": cmd_compose, "typecheck": cmd_typecheck, "solve": cmd_solve,
            "trace": cmd_trace, "gen-doubling": cmd_gen_doubling, "enum": cmd_enum}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    if getattr(args, "write_once", False) and args.depth is None:
        args.depth = 1
    rep = Report(args.command, args.json, out)
    try:
        return rep.finish(COMMANDS[args.command](args, rep))
    except CliError as e:
        return _fail(rep, str(e), e.code)
    except BudgetExceeded as e:
        return _fail(rep, str(e), BUDGET)
    except ValidationError as e:
        return _fail(rep, "; ".join(e.defects) if e.defects else str(e), USAGE)
    except (DeletingTransducerError, FunctionalityViolation, ValueError) as e:
        return _fail(rep, str(e), USAGE)


def _fail(rep: Report, message: str, code: int) -> int:
    if rep.as_json:
        rep.data["error"] = message
        return rep.finish(code)
    print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
