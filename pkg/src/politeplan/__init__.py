"""politeplan: politeness-preserving paraphrase planning.

Pipeline: extract the politeness strategies a message uses, estimate the
level the sender intends, plan a channel-safe strategy combination whose
receiver-perceived level matches that intention, then rewrite the message
accordingly (delete unplanned markers, insert planned ones).
"""

from ._kernel import BACKEND as solver_backend
from .channel import (
    ChannelSpec,
    RoundTripPair,
    all_safe_channel,
    fetch_round_trips,
    mt_lossy_channel,
    profile_channel,
    simulate_channel,
    simulate_channel_text,
)
from .errors import (
    ConfigError,
    EmptyPairsError,
    EmptyPoolError,
    InfeasiblePlanError,
    InsufficientDataError,
    LexiconError,
    NoApplicableTemplateError,
    NoSafeStrategyError,
    PoliteplanError,
    TranslatorError,
    UniverseTooLargeError,
    UnknownStrategyError,
)
from .evaluation import bleu, run_experiment
from .extraction import ExtractionResult, Message, extract_strategies, extract_text, tokenize
from .lexicon import StrategyLexicon, default_lexicon, load_lexicon, save_lexicon
from .perception import (
    AnnotatedUtterance,
    PerceptionModel,
    average_model,
    fit_individual_model,
    fit_model,
    perceive,
    polarity,
)
from .planner import (
    Circumstance,
    ConstraintSet,
    Plan,
    PlanProblem,
    build_problem,
    plan_greedy,
    plan_ilp,
    plan_none,
    plan_oracle,
    plan_retrieval,
)
from .realizer import (
    PostDeletionContext,
    RealizationCandidate,
    delete_markers,
    insert_strategy,
    realize,
    realize_alternatives,
)

__version__ = "0.1.0"
