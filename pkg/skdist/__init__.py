from skdist.common import (
    CommonBlock,
    CommonPartition,
    ConditionalCommonPartition,
    UnionFind,
    common_variable_entropy,
    common_variable_joint,
    conditional_common_partition,
    connecting_path,
    helper_no_comm_key_rate,
    maximal_common_partition,
    no_comm_key_rate,
)
from skdist.config import CORPUS_DIR_ENV, SolverOptions, corpus_directory
from skdist.corpus import (
    CorpusEntry,
    Predicate,
    PredicateOutcome,
    get_entry,
    load_corpus,
    verify_corpus,
)
from skdist.dist import (
    NORMALIZATION_TOL,
    SUPPORT_TOL,
    ZERO_INFO_TOL,
    Alphabet,
    BipartiteDistribution,
    Channel,
    Marginal,
    TripartiteDistribution,
    ValidationResult,
    apply_channel_to_z,
    condition_on_z,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    entropy_of,
    information_of,
    marginal,
    marginal_xy,
    mutual_information,
    restrict_z,
    slices,
    swap_xy,
    validate,
)
from skdist.distill import (
    RandomHash,
    SimConfig,
    SimResult,
    leakage_oracle,
    simulate_privacy_amplification,
)
from skdist.errors import (
    AlphabetMismatchError,
    ChannelError,
    CorpusError,
    DistributionError,
    DistributionFileError,
    EmptySupportError,
    NegativeProbabilityError,
    NormalizationError,
    PreconditionError,
    ProductAlphabetError,
    ReductionFailedError,
    SimulationSizeError,
    ZeroWeightError,
)
from skdist.fileformat import DistributionFile, load, parse, save, serialize
from skdist.rates import (
    MARKOV_CHAINS,
    AuxiliarySystem,
    CertificateScan,
    IntrinsicBound,
    Lemma4Report,
    OneWayBound,
    RateReport,
    ac_rate_optimize,
    check_lemma4_certificate,
    deterministic_certificate_scan,
    double_markov_residual,
    intrinsic_information_upper,
    join_product_z,
    oneway_lower_bounds,
    rate_report,
    split_product_z,
)
from skdist.structure import (
    Dominance,
    MixingCurve,
    ReducingChannel,
    StructureReport,
    Theorem3Violation,
    Theorem4Result,
    Theorem4Witness,
    UniformBlockCheck,
    check_theorem3,
    check_theorem4,
    classify,
    construct_reducing_channel,
    dominates,
    is_ubi,
    is_uniform_block,
    mixing_curve,
    within_block_information,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AlphabetMismatchError",
    "AuxiliarySystem",
    "BipartiteDistribution",
    "CORPUS_DIR_ENV",
    "CertificateScan",
    "Channel",
    "ChannelError",
    "CommonBlock",
    "CommonPartition",
    "ConditionalCommonPartition",
    "CorpusEntry",
    "CorpusError",
    "DistributionError",
    "DistributionFile",
    "DistributionFileError",
    "Dominance",
    "EmptySupportError",
    "IntrinsicBound",
    "Lemma4Report",
    "MARKOV_CHAINS",
    "Marginal",
    "MixingCurve",
    "NORMALIZATION_TOL",
    "NegativeProbabilityError",
    "NormalizationError",
    "OneWayBound",
    "PreconditionError",
    "Predicate",
    "PredicateOutcome",
    "ProductAlphabetError",
    "RandomHash",
    "RateReport",
    "ReducingChannel",
    "ReductionFailedError",
    "SUPPORT_TOL",
    "SimConfig",
    "SimResult",
    "SimulationSizeError",
    "SolverOptions",
    "StructureReport",
    "Theorem3Violation",
    "Theorem4Result",
    "Theorem4Witness",
    "TripartiteDistribution",
    "UniformBlockCheck",
    "UnionFind",
    "ValidationResult",
    "ZERO_INFO_TOL",
    "ZeroWeightError",
    "ac_rate_optimize",
    "apply_channel_to_z",
    "check_lemma4_certificate",
    "check_theorem3",
    "check_theorem4",
    "classify",
    "common_variable_entropy",
    "common_variable_joint",
    "condition_on_z",
    "conditional_common_partition",
    "conditional_entropy",
    "conditional_mutual_information",
    "connecting_path",
    "construct_reducing_channel",
    "corpus_directory",
    "deterministic_certificate_scan",
    "dominates",
    "double_markov_residual",
    "entropy",
    "entropy_of",
    "get_entry",
    "helper_no_comm_key_rate",
    "information_of",
    "intrinsic_information_upper",
    "is_ubi",
    "is_uniform_block",
    "join_product_z",
    "leakage_oracle",
    "load",
    "load_corpus",
    "marginal",
    "marginal_xy",
    "maximal_common_partition",
    "mixing_curve",
    "mutual_information",
    "no_comm_key_rate",
    "oneway_lower_bounds",
    "parse",
    "rate_report",
    "restrict_z",
    "save",
    "serialize",
    "simulate_privacy_amplification",
    "slices",
    "split_product_z",
    "swap_xy",
    "validate",
    "verify_corpus",
    "within_block_information",
]
