"""Games, constraints, configurations, results and the game file format."""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

from .. import nwa as N
from ..errors import ValidationError
from ..nwt import Nwt, NwtClass, classify, parse_nwt, validate_nwt
from ..words import Tag, format_word


@dataclass(frozen=True)
class Game:
    alphabet: frozenset
    gamma: frozenset
    R: Nwt
    target: N.EpsNwa

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "gamma", frozenset(self.gamma))

    @property
    def cls(self) -> NwtClass:
        return classify(self.R)

    def accepts(self, word) -> bool:
        """Target membership; labels unknown to the target are rejected."""
        if {t.label for t in word} - self.target.alphabet:
            return False
        return N.accepts(self.target, word)


def validate_game(g: Game, check_nonempty: bool = True) -> list[str]:
    defects = []
    if not g.gamma <= g.alphabet:
        defects.append(f"function symbols {sorted(g.gamma - g.alphabet)} not in the alphabet")
    if not g.target.alphabet <= g.alphabet:
        defects.append(f"target labels {sorted(g.target.alphabet - g.alphabet)} not in the alphabet")
    if not g.R.alphabet <= g.alphabet:
        defects.append(f"transducer labels {sorted(g.R.alphabet - g.alphabet)} not in the alphabet")
    defects += [f"transducer: {d}" for d in validate_nwt(g.R)]
    defects += [f"target: {d}" for d in N.validate(g.target)]
    if not N.is_deterministic(g.target):
        defects.append("target must be deterministic")
    if check_nonempty and not defects and N.is_empty(g.target):
        defects.append("target language is empty")
    return defects


def require_valid_game(g: Game) -> Game:
    defects = validate_game(g)
    if defects:
        raise ValidationError("game", defects)
    return g


@dataclass(frozen=True)
class Constraints:
    max_call_depth: Optional[int] = None
    max_call_width: Optional[int] = None
    width_includes_input: bool = False
    write_once: bool = False
    romeo_output_budget: Optional[int] = None
    state_budget: int = 200_000

    def describe(self) -> str:
        def fmt(x):
            return "unbounded" if x is None else str(x)
        parts = [f"depth={fmt(self.max_call_depth)}", f"width={fmt(self.max_call_width)}"]
        if self.width_includes_input:
            parts.append("width-includes-input")
        if self.write_once:
            parts.append("write-once")
        return " ".join(parts)


class Verdict(str, enum.Enum):
    JULIET = "JulietWins"
    ROMEO = "RomeoWins"
    BUDGET = "BudgetExhausted"

    def __str__(self) -> str:
        return self.value


class ATag(NamedTuple):
    """A tag annotated with the Call depth that produced it and its origin.

    ``level`` is 0 for input tags; ``origin`` identifies the replacement
    string the tag belongs to (0 is the input).
    """
    label: str
    opening: bool
    level: int = 0
    origin: int = 0

    @property
    def tag(self) -> Tag:
        return Tag(self.label, self.opening)


JULIET, ROMEO = "J", "R"


class Configuration(NamedTuple):
    player: str
    u: tuple          # processed ATags
    v: tuple          # remaining ATags; v[0] is the current position
    used: tuple = ()  # (origin, calls played in it), sorted

    @property
    def word(self) -> tuple:
        return tuple(t.tag for t in self.u + self.v)

    def text(self) -> str:
        who = "Juliet" if self.player == JULIET else "Romeo"
        u = format_word(t.tag for t in self.u)
        v = format_word(t.tag for t in self.v)
        return f"{who}: {u} | {v}"

    def digest(self) -> str:
        payload = repr((self.player, tuple(tuple(t) for t in self.u),
                        tuple(tuple(t) for t in self.v), self.used))
        return hashlib.sha1(payload.encode()).hexdigest()[:12]


def annotate(w, level: int = 0, origin: int = 0) -> tuple:
    return tuple(ATag(t.label, t.opening, level, origin) for t in w)


def plain(tags) -> tuple:
    return tuple(Tag(t.label, t.opening) for t in tags)


def initial_configuration(w) -> Configuration:
    return Configuration(JULIET, (), annotate(w), ())


EMPTY_MOVE = '""'   # Romeo replacing with the empty word


@dataclass
class Strategy:
    """Memoryless strategy for one player: configuration digest -> move.

    Juliet's moves are "read" or "call"; Romeo's moves are replacement words
    in tag syntax.
    """
    player: str
    moves: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"strategy {'juliet' if self.player == JULIET else 'romeo'}"]
        for key in sorted(self.moves):
            lines.append(f"{key} {self.moves[key] or EMPTY_MOVE}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Strategy":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] not in ("strategy juliet", "strategy romeo"):
            raise ValidationError("strategy", ["expected header 'strategy juliet|romeo'"])
        player = JULIET if lines[0].endswith("juliet") else ROMEO
        moves = {}
        for n, ln in enumerate(lines[1:], 2):
            key, _, move = ln.partition(" ")
            if not move.strip():
                raise ValidationError("strategy", [f"line {n}: expected 'digest move'"])
            move = move.strip()
            moves[key] = "" if move == EMPTY_MOVE else move
        return cls(player, moves)


@dataclass
class SolveResult:
    verdict: Verdict
    witness: Optional[Strategy] = None
    stats: dict = field(default_factory=dict)

    @property
    def juliet_wins(self) -> bool:
        return self.verdict == Verdict.JULIET

    def as_dict(self) -> dict:
        out = {"verdict": str(self.verdict), "stats": dict(self.stats)}
        if self.witness is not None:
            out["witness"] = {"player": "juliet" if self.witness.player == JULIET else "romeo",
                              "moves": dict(sorted(self.witness.moves.items()))}
        return out


# game file format ------------------------------------------------------------------

def parse_game(text: str, base: Path | str = ".") -> Game:
    """Parse a game file; transducer and target paths are relative to ``base``."""
    base = Path(base)
    fields: dict = {}
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header:
            if line != "game":
                raise ValidationError("game", [f"line {lineno}: expected header 'game'"])
            header = True
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ValidationError("game", [f"line {lineno}: cannot parse {line!r}"])
        fields[key.strip()] = rest.strip()
    missing = [k for k in ("alphabet", "gamma", "transducer", "target") if k not in fields]
    if missing:
        raise ValidationError("game", [f"missing field {k!r}" for k in missing])
    R = parse_nwt((base / fields["transducer"]).read_text())
    hints = set(fields.get("class", "").replace(",", " ").split())
    if "functional" in hints or "deterministic" in hints:
        R = Nwt(R.alphabet, R.linear, R.hier, R.eps_hier, R.opens, R.closes, R.internals,
                R.initial, R.final, True, R.depth_bound)
    target = N.parse_nwa((base / fields["target"]).read_text())
    g = Game(frozenset(fields["alphabet"].replace(",", " ").split()),
             frozenset(fields["gamma"].replace(",", " ").split()), R, target)
    require_valid_game(g)
    _check_hints(g, hints)
    return g


def _check_hints(g: Game, hints: set) -> None:
    known = {"relabelling", "eps-free", "non-deleting", "deterministic", "functional"}
    bad = hints - known
    if bad:
        raise ValidationError("game", [f"unknown class hint {h!r}" for h in sorted(bad)])
    c = g.cls
    flags = {"relabelling": c.relabelling, "eps-free": c.eps_free,
             "non-deleting": c.non_deleting, "deterministic": c.deterministic}
    wrong = [h for h in hints if h in flags and not flags[h]]
    if wrong:
        raise ValidationError("game", [f"class hint {h!r} does not hold for the transducer" for h in sorted(wrong)])


def format_game(g: Game, transducer_path: str, target_path: str) -> str:
    cls = g.cls
    hints = [name for name, flag in (("eps-free", cls.eps_free), ("non-deleting", cls.non_deleting),
                                     ("relabelling", cls.relabelling),
                                     ("deterministic", cls.deterministic),
                                     ("functional", cls.functional_claimed)) if flag]
    lines = ["game",
             f"alphabet: {' '.join(sorted(g.alphabet))}",
             f"gamma: {' '.join(sorted(g.gamma))}",
             f"transducer: {transducer_path}",
             f"target: {target_path}"]
    if hints:
        lines.append(f"class: {' '.join(hints)}")
    return "\n".join(lines) + "\n"
