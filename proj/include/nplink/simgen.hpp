#pragma once

#include <cstdint>
#include <vector>

#include "nplink/graph.hpp"

namespace nplink {

/// Seasonal block model. Every node holds one latent feature; feature f is
/// active in season f mod seasons, and timestep t belongs to season
/// t mod seasons. An ordered pair whose endpoints share a feature that is
/// active at t links with probability phi, every other pair with eps.
/// seasons == 1 gives the stationary variant.
struct SimConfig {
  std::size_t n = 50;
  TimeStep T = 10;
  double phi = 0.5;
  int seasons = 3;
  int features = 6;
  double eps = 0.0075;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Latent feature of every node, as drawn by generate() for this config.
std::vector<int> draw_features(const SimConfig& cfg);

GraphSequence generate(const SimConfig& cfg);

/// Expected number of directed edges in snapshot t, averaged over the
/// feature draw.
double expected_edges(const SimConfig& cfg, TimeStep t);

}  // namespace nplink
