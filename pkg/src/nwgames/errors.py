"""Exception types shared across modules."""


class ValidationError(ValueError):
    """An artifact failed validation; ``defects`` lists every problem found."""

    def __init__(self, what: str, defects: list[str]):
        self.defects = list(defects)
        super().__init__(f"invalid {what}: " + "; ".join(self.defects))


class BudgetExceeded(RuntimeError):
    """A resource budget (states, outputs, configurations) was exhausted."""

    def __init__(self, what: str, budget: int):
        self.what = what
        self.budget = budget
        super().__init__(f"{what} budget of {budget} exceeded")


class DeletingTransducerError(ValueError):
    """Raised by constructions that require a non-deleting transducer.

    Games with deleting replacement can be converted with
    :func:`nwgames.games.make_non_deleting`.
    """


class FunctionalityViolation(RuntimeError):
    """A transducer claimed to be functional produced two distinct transducts."""
