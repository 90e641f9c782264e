"""Nested word automata, nested word transducers and context-free games on nested words."""

from . import games, nwa, nwt, words
from .errors import BudgetExceeded, DeletingTransducerError, FunctionalityViolation, ValidationError
from .games import Constraints, Game, SolveResult, Verdict, solve
from .nwa import Dnwa, EpsNwa, Nwa, accepts, parse_nwa
from .nwt import Nwt, parse_nwt
from .words import NestedWord, Tag, format_word, parse_word

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "Constraints", "DeletingTransducerError", "Dnwa", "EpsNwa",
    "FunctionalityViolation", "Game", "NestedWord", "Nwa", "Nwt", "SolveResult", "Tag",
    "ValidationError", "Verdict", "accepts", "format_word", "games", "nwa", "nwt", "parse_nwa",
    "parse_nwt", "parse_word", "solve", "words",
]
