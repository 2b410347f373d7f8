#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nplink/datacube.hpp"
#include "nplink/distance.hpp"
#include "nplink/graph.hpp"
#include "nplink/lsh.hpp"

namespace nplink {

struct KernelConfig {
  double bandwidth = 0.3;
  std::size_t top_k = 100;
  double lambda = 0.5;
  bool use_lsh = false;

  void validate() const;
};

/// bandwidth^distance.
double kernel_weight(const KernelConfig& cfg, double distance);

struct WeightedCube {
  double weight;
  const Datacube* target;
};

/// sum w * n_plus(s) / sum w * n(s), reading each target's cell s through
/// smooth_cell. nullopt when the denominator is zero.
std::optional<double> weighted_cell_rate(std::span<const WeightedCube> terms, const PairFeature& s,
                                         double lambda);

struct PredictorConfig {
  CubeParams cube;
  KernelConfig kernel;
  LshParams lsh;
};

/// Neighboring training cubes for one query node, with kernel weights already
/// evaluated. Weights are scaled by b^-D_min so that distant candidates do not
/// underflow; the scale cancels in the estimate.
struct NodeQuery {
  NodeId node = 0;
  struct Neighbor {
    std::size_t train_index;  // index into the training cube list
    double distance;
    double weight;
  };
  std::vector<Neighbor> neighbors;  // ascending train_index
  bool lsh_fallback = false;
};

/// Kernel link predictor for the snapshot right after the observed sequence.
///
/// Training pairs are (d_t(i'), d_{t+1}(i')) for every node and t in
/// [p, T-2], where T is the observed length and p the lag; the start is pulled
/// down to keep at least one pair when T - 2 < p. The query cube for node i is
/// d_{T-1}(i) and pair features come from snapshot T-1. Nothing beyond the
/// observed snapshots is read.
class LinkPredictor {
 public:
  LinkPredictor(const GraphSequence& observed, const PredictorConfig& cfg);

  const PredictorConfig& config() const { return cfg_; }
  TimeStep target_time() const { return observed_.length(); }
  /// Earliest t of a training pair (d_t, d_{t+1}).
  TimeStep first_training_time() const { return first_train_; }
  std::size_t num_training_cubes() const { return training_->size(); }
  const std::vector<Datacube>& training_cubes() const { return *training_; }
  std::shared_ptr<const std::vector<Datacube>> shared_training_cubes() const { return training_; }
  const Datacube& query_cube(NodeId i) const { return cubes_.at(i, observed_.length() - 1); }
  const Datacube& target_cube(std::size_t train_index) const;
  const LshIndex* index() const { return index_.get(); }

  /// Replaces the index used when use_lsh is set; the index must cover
  /// exactly training_cubes().
  void set_index(std::shared_ptr<const LshIndex> index);

  NodeQuery query(NodeId i) const;
  double predict(const NodeQuery& q, NodeId j) const;
  double predict(NodeId i, NodeId j) const { return predict(query(i), j); }

  /// Pooled n_plus / n of cell s over every cube, or 0.5 without data.
  double prior(const PairFeature& s) const;

 private:
  GraphSequence observed_;
  PredictorConfig cfg_;
  TimeStep first_train_ = 1;
  DatacubeTable cubes_;
  std::shared_ptr<const std::vector<Datacube>> training_;
  std::shared_ptr<const LshIndex> index_;
  struct PooledCell {
    PairFeature s;
    std::uint64_t n = 0;
    std::uint64_t n_plus = 0;
  };
  std::vector<PooledCell> pooled_;  // sorted by cell
};

/// One-shot prediction of i->j at snapshot `target` using snapshots
/// [0, target) of seq.
double predict_link(const GraphSequence& seq, NodeId i, NodeId j, TimeStep target,
                    const PredictorConfig& cfg);

}  // namespace nplink
