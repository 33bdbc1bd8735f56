"""Exception hierarchy shared across the package."""


class PoliteplanError(Exception):
    """Base class for all domain errors raised by this package."""


class LexiconError(PoliteplanError):
    """Lexicon file failed to parse or validate."""


class UnknownStrategyError(PoliteplanError):
    """A strategy id is not covered by the model/lexicon in use."""

    def __init__(self, strategy_id):
        super().__init__(f"unknown strategy: {strategy_id!r}")
        self.strategy_id = strategy_id


class InsufficientDataError(PoliteplanError):
    """Too few annotated utterances to fit a perception model."""


class EmptyPairsError(PoliteplanError):
    """Channel profiling requires at least one round-trip pair."""


class TranslatorError(PoliteplanError):
    """Translator client is missing or misconfigured."""


class InfeasiblePlanError(PoliteplanError):
    """The active constraint set admits no strategy combination."""


class NoSafeStrategyError(PoliteplanError):
    """Greedy replacement found no safe candidate strategy."""


class EmptyPoolError(PoliteplanError):
    """Retrieval found no corpus message with matching polarity."""


class UniverseTooLargeError(PoliteplanError):
    """Exhaustive planning is only supported for small strategy universes."""


class NoApplicableTemplateError(PoliteplanError):
    """No insertion template of the strategy fits the given context."""


class ConfigError(PoliteplanError):
    """Invalid service/experiment configuration."""
