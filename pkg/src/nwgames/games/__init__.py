"""Context-free games on nested words."""

from .algorithms import (build_juliet_transducer, check_win_replay_free, make_non_deleting,
                         solve_single_call, solve_write_once, strip_struck)
from .engine import (CALL, READ, Arena, all_plays_won, final_word, play, solve, solve_naive,
                     successors, winner)
from .fixtures import (DOUBLING_CONSTRAINTS, a_to_b_game, doubling_strategy, gen_doubling_game,
                       relabel_game, swap_cycle_game, tower)
from .model import (JULIET, ROMEO, ATag, Configuration, Constraints, Game, SolveResult, Strategy,
                    Verdict, annotate, format_game, initial_configuration, parse_game, plain,
                    require_valid_game,
                    validate_game)

__all__ = [
    "ATag", "Arena", "CALL", "Configuration", "Constraints", "DOUBLING_CONSTRAINTS", "Game",
    "JULIET", "READ", "ROMEO", "SolveResult", "Strategy", "Verdict", "a_to_b_game",
    "all_plays_won", "annotate", "build_juliet_transducer", "check_win_replay_free",
    "doubling_strategy", "final_word", "format_game", "gen_doubling_game", "initial_configuration",
    "make_non_deleting", "parse_game", "plain", "play", "relabel_game", "require_valid_game",
    "solve", "solve_naive", "solve_single_call", "solve_write_once", "strip_struck",
    "successors", "swap_cycle_game", "tower", "validate_game", "winner",
]
