# core/errors.py
"""Exception hierarchy shared by the game model, exact engine and simulator.

Every error carries a stable ``code`` (the name reported by the CLI) and an
``exit_code`` used by the command-line runner.
"""


class JankenError(Exception):
    """Base class for all engine errors."""

    code = "JankenError"
    exit_code = 1


# -------------------------
# GAME SPECIFICATION
# -------------------------
class GameSpecError(JankenError):
    """Raised when a game specification is invalid."""

    code = "GameSpecError"
    exit_code = 2


class ZeroProbabilityError(GameSpecError):
    """Raised when some hand has probability zero or less."""

    code = "ZeroProbability"


class ProbSumNotOneError(GameSpecError):
    """Raised when the hand probabilities do not sum to exactly one."""

    code = "ProbSumNotOne"


class EmptyWinnerOrLoserSideError(GameSpecError):
    """Raised when a WOD set has no winners or no losers."""

    code = "EmptyWinnerOrLoserSide"


class DuplicateSupportError(GameSpecError):
    """Raised when two WOD sets share the same support."""

    code = "DuplicateSupport"


class NoBinaryWodSetError(GameSpecError):
    """Raised when no WOD set has exactly two hands."""

    code = "NoBinaryWodSet"


class InvalidProbabilityError(GameSpecError):
    """Raised when a probability parameter is outside its admissible range."""

    code = "InvalidProbability"


class InvalidHandError(GameSpecError):
    """Raised when a hand index is outside 0..m-1 or m < 2."""

    code = "InvalidHand"


class HandLimitExceededError(GameSpecError):
    """Raised when m exceeds the configured enumeration cap."""

    code = "HandLimitExceeded"


class InvalidGraphError(GameSpecError):
    """Raised when a dominance graph has self-loops or two-way edges."""

    code = "InvalidGraph"


class UnknownBuiltinError(GameSpecError):
    """Raised when a built-in game name is not registered."""

    code = "UnknownBuiltin"


class SpecFileError(GameSpecError):
    """Raised when a game-spec file cannot be parsed."""

    code = "SpecFileError"


# -------------------------
# NUMERICS
# -------------------------
class NumericError(JankenError):
    """Raised when an exact computation cannot be carried out reliably."""

    code = "NumericError"
    exit_code = 3


class NumericOverflowError(NumericError):
    """Raised when float-mode results leave the representable range."""

    code = "NumericOverflow"


class NegativeVarianceError(NumericError):
    """Raised when a variance comes out clearly negative (cancellation)."""

    code = "NegativeVariance"


class WindowExceedsHorizonError(NumericError):
    """Raised when a Poisson window reaches beyond the computed horizon."""

    code = "WindowExceedsHorizon"


class BudgetExceededError(NumericError):
    """Raised when a requested table exceeds the configured cost budget."""

    code = "BudgetExceeded"


class EmptySupportError(NumericError):
    """Raised when a support probability is requested for the empty set."""

    code = "EmptySupport"


# -------------------------
# SIMULATION / ASYMPTOTICS
# -------------------------
class NonTerminatingError(JankenError):
    """Raised when a simulated trial exceeds the round cap."""

    code = "NonTerminating"
    exit_code = 4


class WrongKindError(JankenError):
    """Raised when a prediction does not apply to the game kind."""

    code = "WrongKind"
    exit_code = 2
