"""Exception hierarchy; each class carries the CLI exit status it maps to."""


class IRVError(Exception):
    exit_code = 1


class ParseError(IRVError, ValueError):
    exit_code = 3


class ValidationError(IRVError, ValueError):
    exit_code = 4


class DomainMismatchError(ValidationError):
    """Two distributions with different bucket sizes were combined."""


class NumericalError(IRVError, ArithmeticError):
    exit_code = 5


class StateSpaceError(ValidationError):
    """Exhaustive enumeration would exceed the allowed number of joint states."""

    def __init__(self, n_states: int, max_states: int):
        super().__init__(f"joint state space has {n_states} states, exceeds max_states={max_states}")
        self.n_states = n_states
        self.max_states = max_states


class TieError(IRVError):
    exit_code = 6

    def __init__(self, tied, round_number: int | None = None):
        tied = tuple(sorted(tied))
        where = f" in round {round_number}" if round_number is not None else ""
        super().__init__(f"exact tie for last place{where} between candidates {tied}")
        self.tied = tied
        self.round_number = round_number
