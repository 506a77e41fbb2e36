"""Shortest directed networks: exact solving, rewriting, and certification."""

from .analyzer import (Certificate, JumpRecord, PathDecomposition, certify,
                       canonicalize_path, cover_size_bound, decompose,
                       first_reach, improve_by_reversal, last_reach,
                       longest_ab_path, minimal_jump_cover, path_vertex_bound)
from .errors import (BudgetError, CorruptionError, CoverageError, DinetError,
                     InvalidPointError, InvalidTerminalError, ParseError,
                     PreconditionError)
from .instance import Instance, Terminal
from .metric import (MetricReport, Space, SteinerDomain, Violation,
                     candidate_steiner_locations, validate_metric)
from .network import (Network, Vertex, contract_zero_edges,
                      prune_redundant_edges, simplify)
from .solver import (SolveConfig, Solution, Topology, brute_force_oracle,
                     enumerate_topologies, optimize_positions, solve,
                     solve_point_to_point, steiner_count_bound)

__all__ = [
    "Certificate", "JumpRecord", "PathDecomposition", "certify",
    "canonicalize_path", "cover_size_bound", "decompose", "first_reach",
    "improve_by_reversal", "last_reach", "longest_ab_path",
    "minimal_jump_cover", "path_vertex_bound",
    "BudgetError", "CorruptionError", "CoverageError", "DinetError",
    "InvalidPointError", "InvalidTerminalError", "ParseError",
    "PreconditionError",
    "Instance", "Terminal",
    "MetricReport", "Space", "SteinerDomain", "Violation",
    "candidate_steiner_locations", "validate_metric",
    "Network", "Vertex", "contract_zero_edges", "prune_redundant_edges",
    "simplify",
    "SolveConfig", "Solution", "Topology", "brute_force_oracle",
    "enumerate_topologies", "optimize_positions", "solve",
    "solve_point_to_point", "steiner_count_bound",
]
