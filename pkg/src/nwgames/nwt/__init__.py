"""Nested word transducers."""

from .constructions import BOT, compose, identity, identity_nwt, normalize, restrict_domain
from .core import (EPS_LABEL, CloseRule, InternalRule, Nwt, NwtClass, OpenRule, classify,
                   format_nwt, is_deterministic_nwt, is_eps_free, is_non_deleting,
                   is_normal_form, is_relabelling, parse_nwt, renamed_nwt, require_valid_nwt,
                   validate_nwt)
from .decide import (enumerate_image, image_automaton, image_is_total, image_language_automaton,
                     is_nonempty, range_automaton, transduct_member, typecheck,
                     typecheck_counterexample)
from .runs import run_outputs

__all__ = [
    "BOT", "EPS_LABEL", "CloseRule", "InternalRule", "Nwt", "NwtClass", "OpenRule",
    "classify", "compose", "enumerate_image", "format_nwt", "identity", "identity_nwt",
    "image_automaton", "image_is_total", "image_language_automaton", "is_deterministic_nwt",
    "is_eps_free", "is_non_deleting", "is_nonempty", "is_normal_form", "is_relabelling",
    "normalize", "parse_nwt", "range_automaton", "renamed_nwt", "require_valid_nwt",
    "restrict_domain", "run_outputs", "transduct_member", "typecheck",
    "typecheck_counterexample", "validate_nwt",
]
