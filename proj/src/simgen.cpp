#include "nplink/simgen.hpp"

#include <random>
#include <stdexcept>

namespace nplink {

namespace {

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

int active_feature_count(const SimConfig& cfg, int season) {
  int count = 0;
  for (int f = 0; f < cfg.features; ++f) count += (f % cfg.seasons == season);
  return count;
}

}  // namespace

void SimConfig::validate() const {
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0, 1]");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0, 1]");
  if (seasons < 1) throw std::invalid_argument("seasons must be >= 1");
  if (features < seasons) throw std::invalid_argument("need at least one feature per season");
  if (n < 1) throw std::invalid_argument("need at least one node");
  if (T < 1) throw std::invalid_argument("need at least one timestep");
}

std::vector<int> draw_features(const SimConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> feature(cfg.n);
  for (auto& f : feature) f = static_cast<int>(uniform01(rng) * cfg.features);
  return feature;
}

GraphSequence generate(const SimConfig& cfg) {
  const auto feature = draw_features(cfg);
  // Edge draws use their own stream so features do not shift with T.
  std::mt19937_64 rng(cfg.seed ^ 0x5eed5eed5eed5eedULL);
  std::vector<Snapshot> snaps;
  snaps.reserve(static_cast<std::size_t>(cfg.T));
  for (TimeStep t = 0; t < cfg.T; ++t) {
    const int season = t % cfg.seasons;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < cfg.n; ++i) {
      for (NodeId j = 0; j < cfg.n; ++j) {
        if (i == j) continue;
        const bool in_block = feature[i] == feature[j] && feature[i] % cfg.seasons == season;
        if (uniform01(rng) < (in_block ? cfg.phi : cfg.eps)) edges.emplace_back(i, j);
      }
    }
    snaps.emplace_back(t, cfg.n, std::move(edges));
  }
  return GraphSequence(cfg.n, std::move(snaps));
}

double expected_edges(const SimConfig& cfg, TimeStep t) {
  cfg.validate();
  const double pairs = double(cfg.n) * double(cfg.n - 1);
  const double f2 = double(cfg.features) * cfg.features;
  const double block_share = active_feature_count(cfg, t % cfg.seasons) / f2;
  return pairs * (block_share * cfg.phi + (1.0 - block_share) * cfg.eps);
}

}  // namespace nplink
