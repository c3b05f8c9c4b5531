"""Agent lookup by the names the CLI accepts."""
from engine.errors import ConfigError
from engine.game.agents import IdentityDuplicator, RandomDuplicator
from engine.logic.formulas import Formula
from engine.psp.instances import TreeGroupSpec
from engine.strategy.duplicator import OffsetDuplicator
from engine.strategy.spoiler import FormulaSpoiler, GreedySpoiler, RandomSpoiler

SPOILERS = ("random", "greedy", "formula")
DUPLICATORS = ("identity", "random", "paper", "offset")


def make_spoiler(name: str, formula: Formula | None = None, env: dict | None = None):
    """
    Raises:
        ConfigError: unknown name, or "formula" without a formula
    """
    match name:
        case "random":
            return RandomSpoiler()
        case "greedy":
            return GreedySpoiler()
        case "formula":
            if formula is None:
                raise ConfigError("the formula spoiler needs a formula")
            return FormulaSpoiler(formula, env)
    raise ConfigError(f"unknown spoiler {name!r}; choose from {', '.join(SPOILERS)}")


def make_duplicator(name: str, spec: TreeGroupSpec | None = None):
    """
    Raises:
        ConfigError: unknown name, or "paper" / "offset" without a tree spec
    """
    match name:
        case "identity":
            return IdentityDuplicator()
        case "random":
            return RandomDuplicator()
        case "paper" | "offset":
            if spec is None:
                raise ConfigError(f"the {name} duplicator needs the tree spec of structure A")
            return OffsetDuplicator(spec)
    raise ConfigError(f"unknown duplicator {name!r}; choose from {', '.join(DUPLICATORS)}")
