from enum import Enum, auto


class GamePhase(Enum):
    """
    The timeline of one match.

    The game moves FORWARD only:
    MAIN <-> GRAPH_ROUND -> FINISHED

    A graph move always returns to MAIN (or ends the match). The only way
    back from FINISHED is reset_session(), which starts over from the config.
    """
    MAIN = auto()          # Spoiler chooses an extension move or a graph move.
    GRAPH_ROUND = auto()   # Rounds on the quotient semi-graphs are running.
    FINISHED = auto()      # Outcome fixed; nothing more is accepted.


class Outcome(Enum):
    UNDECIDED = auto()
    SPOILER_WINS = auto()
    DUPLICATOR_WINS = auto()


class Actor(Enum):
    """The player a move (or a forfeit) belongs to."""
    SPOILER = "S"
    DUPLICATOR = "D"

    @property
    def opponent(self) -> "Actor":
        return Actor.DUPLICATOR if self is Actor.SPOILER else Actor.SPOILER


class Pending(Enum):
    """Sub-step reached inside the current main-phase move."""
    NONE = auto()
    EXTENSION_REQUESTED = auto()   # waiting for Duplicator's bijection
    BIJECTION_OFFERED = auto()     # waiting for Spoiler's pick
    ROUND_OPEN = auto()            # graph round waiting for Duplicator's maps
    ROUND_ANSWERED = auto()        # graph round waiting for Spoiler's step


class CheckStatus(Enum):
    """
    Granular status for individual property checks within a verify report.
    """
    PASS = auto()
    FAIL = auto()
    ERROR = auto()
