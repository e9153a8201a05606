"""Exact lumpability and information-preservation analysis for discrete MRFs."""

__version__ = "0.1.0"

from .dist import AlphabetSpec, JointTable, MrfVerdict, conditional, conditional_entropy, entropy, is_mrf, marginal, support
from .gibbs import (
    AssignmentFailure,
    DependencyAssignment,
    PotentialFamily,
    assign_cliques,
    depends_only_via,
    fit_canonical_potentials,
    partition_function,
    synthesize_pmf,
)
from .graph import EliminationOrder, Graph, enumerate_cliques, is_chordal, mcs_orderings, neighbors
from .info import (
    InfoReport,
    analyze_information,
    chordal_entropy_decomposition,
    is_information_preserving,
    necessary_condition,
    necessary_residuals,
    proof_chain_prop2,
    prop2_condition,
    prop3_check,
    sufficient_condition_chordal,
)
from .lump import (
    LumpabilityReport,
    Lumping,
    check_lumpable,
    constant_on_preimages,
    is_nontrivial,
    lumped_potentials,
    minimal_graphs,
    pushforward,
)

__all__ = [
    "AlphabetSpec",
    "AssignmentFailure",
    "DependencyAssignment",
    "EliminationOrder",
    "Graph",
    "InfoReport",
    "JointTable",
    "LumpabilityReport",
    "Lumping",
    "MrfVerdict",
    "PotentialFamily",
    "analyze_information",
    "assign_cliques",
    "check_lumpable",
    "chordal_entropy_decomposition",
    "conditional",
    "conditional_entropy",
    "constant_on_preimages",
    "depends_only_via",
    "entropy",
    "enumerate_cliques",
    "fit_canonical_potentials",
    "is_chordal",
    "is_information_preserving",
    "is_mrf",
    "is_nontrivial",
    "lumped_potentials",
    "marginal",
    "mcs_orderings",
    "minimal_graphs",
    "necessary_condition",
    "necessary_residuals",
    "neighbors",
    "partition_function",
    "proof_chain_prop2",
    "prop2_condition",
    "prop3_check",
    "pushforward",
    "sufficient_condition_chordal",
    "support",
    "synthesize_pmf",
]
