from .campaign import (
    DEFAULT_SIZES,
    DEFAULT_TRIALS,
    INHERITANCE_SIZES,
    REFUTED,
    THEOREM_CONSTRAINTS,
    CampaignReport,
    run_campaign,
    run_reverse_campaign,
    trial_seed,
)
from .fixtures import Fact, FactResult, Fixture, worked_examples, printed_claims, replay_fixtures
from .generators import CONSTRAINTS, GenerationError, GeneratorSpec, generate, random_block, random_ep
from .theorems import (
    THEOREMS,
    Classification,
    FieldMismatchError,
    TheoremReport,
    UnknownTheoremError,
    check_theorem,
    theorem_ids,
)
