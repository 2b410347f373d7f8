#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nplink/baselines.hpp"
#include "nplink/graph.hpp"
#include "nplink/kernel.hpp"

namespace nplink {

/// Every j != i within two undirected hops of i in some snapshot 0..T-1,
/// sorted ascending.
std::vector<NodeId> candidate_set(const GraphSequence& seq, NodeId i, TimeStep T);

/// Mann-Whitney AUC with half credit for ties; a nonzero label is positive.
/// nullopt when the labels are all positive or all negative.
std::optional<double> auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Scores candidates for the snapshot after `observed`, using only `observed`.
class CandidateScorer {
 public:
  CandidateScorer(const GraphSequence& observed, Method method, const PredictorConfig& np,
                  const BaselineParams& baseline);

  Method method() const { return method_; }
  std::vector<double> score(NodeId i, std::span<const NodeId> candidates) const;

 private:
  const GraphSequence* observed_;
  Method method_;
  BaselineParams baseline_;
  std::optional<LinkPredictor> predictor_;
};

struct EvalTask {
  GraphSequence seq;  // the last snapshot is the test snapshot
  std::vector<Method> methods = all_methods();
  PredictorConfig np;
  BaselineParams baseline;
};

struct NodeResult {
  Method method;
  NodeId node;
  double auc;
  std::size_t n_candidates;
  std::size_t n_pos;
};

struct MethodSummary {
  Method method;
  double mean_auc = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // nodes of S_>0 without candidates or with one-class labels
  double seconds = 0.0;
};

struct EvalReport {
  TimeStep test_time = 0;
  std::size_t num_nodes = 0;
  std::size_t active_nodes = 0;  // |S_>0|
  std::vector<MethodSummary> methods;
  std::vector<NodeResult> nodes;
  std::vector<std::pair<std::string, std::string>> config;

  const MethodSummary& summary(Method m) const;
};

/// Test snapshot T = seq.length() - 1. Scorers see snapshots 0..T-1 only;
/// snapshot T supplies S_>0 and the labels (i->j for NP, i~j for the
/// undirected baselines).
EvalReport evaluate(const EvalTask& task);

void write_report_text(std::ostream& out, const EvalReport& report);
/// Columns: method,node,auc,n_candidates,n_pos
void write_report_csv(std::ostream& out, const EvalReport& report);

}  // namespace nplink
