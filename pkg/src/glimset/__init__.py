"""glimset: a laboratory for generic limit sets of one-dimensional CA.

Symbolic-dynamics algorithms (words, SFTs, Rauzy graphs, gluing,
periodic points), arithmetical-hierarchy approximation schedules, a fast
layered CA engine, the walls/cleaning, halting-encoding, and
subshift-realization constructions, and an empirical census harness.
"""

from .walls import (
    CleaningFragment,
    CleaningState,
    FORMATTING_TIME_FACTOR,
    STATE_CHART,
    Segment,
    build_cleaning_rule,
    clock_component,
    clock_predictor,
    extract_segments,
    is_formatted,
    parse_seed,
    walls_alphabet,
    walls_rule,
)
from .words import (
    Alphabet,
    Word,
    fine_wilf_implies,
    has_period,
    is_primitive,
    is_unbordered,
    least_period,
    local_periodicity_witness,
    lyndon_conjugate,
    periods,
)
from .approx import (
    ApproxTriple,
    Delta02Spec,
    Pi02Spec,
    builtin_delta02,
    builtin_pi02,
    delta02_enumerate,
    delta02_predicate,
    pi02_enumerate,
    slowdown,
)
from .engine import (
    CompiledRule,
    LayeredAlphabet,
    LayeredConfiguration,
    LightConeError,
    NonQuiescentBackgroundError,
    Trace,
    configuration,
    render,
    run,
    set_thread_count,
    step,
    trace_dump,
    trace_load,
)
from .sigma1 import (
    PAIRING_RANGE,
    PairingFn,
    SIGMA1_TIME_FACTOR,
    TmEnumeration,
    TmMachine,
    bin_word,
    build_sigma1_rule,
    demo_enumeration,
    eventual_segment_content,
    format_tm_file,
    pairing,
    parse_tm_file,
    read_segments,
    settled_segments,
    sigma1_alphabet,
    sigma1_budget,
    sigma1_seed,
    stabilize,
    unpairing,
)
from .sft import (
    EmptySftError,
    GluingError,
    NotMixingError,
    PeriodicPoint,
    RauzyGraph,
    Sft,
    format_sft,
    glue,
    is_mixing,
    is_transitive,
    language,
    mixing_distance,
    parse_sft,
    periodic_point_with_subwords,
    sft_approximation,
    unbordered_word_in,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "ApproxTriple",
    "CleaningFragment",
    "CleaningState",
    "CompiledRule",
    "Delta02Spec",
    "EmptySftError",
    "FORMATTING_TIME_FACTOR",
    "GluingError",
    "LayeredAlphabet",
    "LayeredConfiguration",
    "LightConeError",
    "NonQuiescentBackgroundError",
    "NotMixingError",
    "PAIRING_RANGE",
    "PairingFn",
    "PeriodicPoint",
    "Pi02Spec",
    "RauzyGraph",
    "SIGMA1_TIME_FACTOR",
    "STATE_CHART",
    "Segment",
    "Sft",
    "TmEnumeration",
    "TmMachine",
    "Trace",
    "Word",
    "__version__",
    "bin_word",
    "build_cleaning_rule",
    "build_sigma1_rule",
    "builtin_delta02",
    "builtin_pi02",
    "clock_component",
    "clock_predictor",
    "configuration",
    "delta02_enumerate",
    "delta02_predicate",
    "demo_enumeration",
    "eventual_segment_content",
    "extract_segments",
    "fine_wilf_implies",
    "format_sft",
    "format_tm_file",
    "glue",
    "has_period",
    "is_formatted",
    "is_mixing",
    "is_primitive",
    "is_transitive",
    "is_unbordered",
    "language",
    "least_period",
    "local_periodicity_witness",
    "lyndon_conjugate",
    "mixing_distance",
    "pairing",
    "parse_seed",
    "parse_sft",
    "parse_tm_file",
    "periodic_point_with_subwords",
    "periods",
    "pi02_enumerate",
    "read_segments",
    "render",
    "run",
    "set_thread_count",
    "settled_segments",
    "sft_approximation",
    "sigma1_alphabet",
    "sigma1_budget",
    "sigma1_seed",
    "slowdown",
    "stabilize",
    "step",
    "trace_dump",
    "trace_load",
    "unbordered_word_in",
    "unpairing",
    "walls_alphabet",
    "walls_rule",
]
