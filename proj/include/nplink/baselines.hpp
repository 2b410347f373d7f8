#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nplink/graph.hpp"

namespace nplink {

/// Score given to pairs that were never linked by score_last_link.
inline constexpr double kNeverLinked = -1e9;

// Heuristic link scores for (i, j) at snapshot T, reading snapshots < T only.
// All use the undirected view; higher means more likely.

/// Minus the number of steps since i~j was last linked in snapshots 0..T-1.
double score_last_link(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T);
/// Common neighbors in snapshot T-1.
double score_common_neighbors(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T);
/// Sum of 1 / ln(deg z) over common neighbors z of degree > 1 in snapshot T-1.
double score_adamic_adar(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T);
/// Truncated Katz: sum_{l=1..L} beta^l * (#walks of length l from i to j) in
/// snapshot T-1.
double score_katz(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T, double beta,
                  int max_length);
/// Deterministic pseudo-random score in [0, 1).
double score_random(NodeId i, NodeId j, std::uint64_t seed);

/// Katz scores from i to every node at once.
std::vector<double> katz_row(const Snapshot& snap, NodeId i, double beta, int max_length);

enum class Method { NonParametric, LastLink, CommonNeighbors, AdamicAdar, Katz, Random };

/// np | ll | cn | aa | katz | rnd
Method parse_method(const std::string& name);
std::string method_name(Method m);
/// Column label used in report tables (NP, LL, CN, AA, KZ, RND).
std::string method_label(Method m);
const std::vector<Method>& all_methods();

struct BaselineParams {
  double katz_beta = 0.005;
  int katz_length = 4;
  std::uint64_t seed = 42;
};

/// Scores every candidate of node i with a heuristic method (not NP).
std::vector<double> baseline_scores(Method m, const GraphSequence& seq, NodeId i,
                                    std::span<const NodeId> candidates, TimeStep T,
                                    const BaselineParams& params);

}  // namespace nplink
