"""Three-valued outcomes shared by the decision procedures."""

from __future__ import annotations

from dataclasses import dataclass


class CapExceeded(RuntimeError):
    """A configured computation cap was hit; the answer is unknown."""


class Cancelled(RuntimeError):
    pass


@dataclass(frozen=True)
class Undecided:
    """Returned instead of a boolean when a cap prevents a sound answer.

    Truth-testing raises so an undecided result can never pass as ``False``.
    """

    reason: str

    def __bool__(self):
        raise TypeError(f"undecided result used as a boolean: {self.reason}")


def is_undecided(x) -> bool:
    return isinstance(x, Undecided)


class CancelToken:
    """Cooperative cancellation flag polled by long computations."""

    def __init__(self):
        self.cancelled = False

    def cancel(self):
        self.cancelled = True

    def check(self):
        if self.cancelled:
            raise Cancelled("computation cancelled")
