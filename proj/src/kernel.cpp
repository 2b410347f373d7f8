#include "nplink/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace nplink {

void KernelConfig::validate() const {
  if (!(bandwidth > 0.0 && bandwidth < 1.0)) throw std::invalid_argument("bandwidth b must lie in (0, 1)");
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
}

double kernel_weight(const KernelConfig& cfg, double distance) {
  if (distance < 0.0) throw std::invalid_argument("distance must be >= 0");
  return std::pow(cfg.bandwidth, distance);
}

std::optional<double> weighted_cell_rate(std::span<const WeightedCube> terms, const PairFeature& s,
                                         double lambda) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& term : terms) {
    const auto c = smooth_cell(*term.target, s, lambda);
    num += term.weight * c.n_plus;
    den += term.weight * c.n;
  }
  if (!(den > 0.0)) return std::nullopt;
  return std::clamp(num / den, 0.0, 1.0);
}

namespace {

TimeStep checked_length(const GraphSequence& observed) {
  // d_1 and d_2 form the smallest training pair; the query cube d_{T-1} must exist.
  if (observed.length() < 3) {
    throw std::invalid_argument("need at least 3 observed snapshots to predict, got " +
                                std::to_string(observed.length()));
  }
  return observed.length();
}

}  // namespace

LinkPredictor::LinkPredictor(const GraphSequence& observed, const PredictorConfig& cfg)
    : observed_(observed),
      cfg_(cfg),
      cubes_((cfg.kernel.validate(), observed), 1, checked_length(observed) - 1, cfg.cube) {
  const TimeStep last_train = observed_.length() - 2;
  first_train_ = std::max<TimeStep>(1, std::min<TimeStep>(cfg_.cube.lag, last_train));
  const auto n = observed_.num_nodes();
  auto training = std::make_shared<std::vector<Datacube>>();
  training->reserve(static_cast<std::size_t>(last_train - first_train_ + 1) * n);
  for (TimeStep t = first_train_; t <= last_train; ++t) {
    for (NodeId i = 0; i < n; ++i) training->push_back(cubes_.at(i, t));
  }
  training_ = std::move(training);

  std::map<std::uint32_t, PooledCell> pooled;
  for (const auto& cube : cubes_.all()) {
    for (const auto& cell : cube.cells()) {
      auto& acc = pooled[cell.s.key()];
      acc.s = cell.s;
      acc.n += cell.counts.n;
      acc.n_plus += cell.counts.n_plus;
    }
  }
  for (const auto& [key, c] : pooled) {
    pooled_.push_back({PairFeature::from_key(key), c.n, c.n_plus});
  }

  if (cfg_.kernel.use_lsh) {
    index_ = std::make_shared<const LshIndex>(LshIndex::build(training_, cfg_.lsh, cfg_.kernel.lambda));
  }
}

void LinkPredictor::set_index(std::shared_ptr<const LshIndex> index) {
  if (index && index->size() != training_->size()) {
    throw std::invalid_argument("index does not cover the training cubes");
  }
  index_ = std::move(index);
}

const Datacube& LinkPredictor::target_cube(std::size_t train_index) const {
  const auto& src = training_->at(train_index);
  return cubes_.at(src.center(), src.time() + 1);
}

NodeQuery LinkPredictor::query(NodeId i) const {
  if (i >= observed_.num_nodes()) throw std::out_of_range("query node out of range");
  const Datacube& q = query_cube(i);
  const double lambda = cfg_.kernel.lambda;
  NodeQuery result;
  result.node = i;

  if (cfg_.kernel.use_lsh) {
    if (!index_) throw std::logic_error("use_lsh is set but no index is available");
    auto found = index_->query(q, cfg_.kernel.top_k);
    result.lsh_fallback = found.fallback;
    for (const auto& m : found.matches) result.neighbors.push_back({m.entry, m.distance, 0.0});
    std::sort(result.neighbors.begin(), result.neighbors.end(),
              [](const auto& a, const auto& b) { return a.train_index < b.train_index; });
  } else {
    result.neighbors.reserve(training_->size());
    for (std::size_t e = 0; e < training_->size(); ++e) {
      result.neighbors.push_back({e, datacube_distance(q, (*training_)[e], lambda), 0.0});
    }
  }

  double d_min = std::numeric_limits<double>::infinity();
  for (const auto& nb : result.neighbors) d_min = std::min(d_min, nb.distance);
  for (auto& nb : result.neighbors) nb.weight = kernel_weight(cfg_.kernel, nb.distance - d_min);
  return result;
}

double LinkPredictor::predict(const NodeQuery& q, NodeId j) const {
  if (j >= observed_.num_nodes()) throw std::out_of_range("candidate node out of range");
  const auto s = pair_features(observed_, q.node, j, observed_.length() - 1, cfg_.cube.lag);
  std::vector<WeightedCube> terms;
  terms.reserve(q.neighbors.size());
  for (const auto& nb : q.neighbors) terms.push_back({nb.weight, &target_cube(nb.train_index)});
  const auto rate = weighted_cell_rate(terms, s, cfg_.kernel.lambda);
  return rate ? *rate : prior(s);
}

double LinkPredictor::prior(const PairFeature& s) const {
  auto it = std::lower_bound(pooled_.begin(), pooled_.end(), s,
                             [](const PooledCell& c, const PairFeature& key) { return c.s < key; });
  if (it == pooled_.end() || it->s != s || it->n == 0) return 0.5;
  return double(it->n_plus) / double(it->n);
}

double predict_link(const GraphSequence& seq, NodeId i, NodeId j, TimeStep target,
                    const PredictorConfig& cfg) {
  if (target < 0 || target > seq.length()) throw std::out_of_range("target timestep out of range");
  if (i == j) throw std::invalid_argument("cannot predict a self-loop");
  LinkPredictor predictor(seq.prefix(target), cfg);
  return predictor.predict(i, j);
}

}  // namespace nplink
