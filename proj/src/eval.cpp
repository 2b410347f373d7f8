#include "nplink/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "nplink/parallel.hpp"

namespace nplink {

std::vector<NodeId> candidate_set(const GraphSequence& seq, NodeId i, TimeStep T) {
  if (i >= seq.num_nodes()) throw std::out_of_range("node id out of range");
  if (T < 0 || T > seq.length()) throw std::out_of_range("timestep out of range");
  std::vector<bool> mark(seq.num_nodes(), false);
  for (TimeStep t = 0; t < T; ++t) {
    const Snapshot& snap = seq[t];
    for (NodeId u : snap.undirected(i)) {
      mark[u] = true;
      for (NodeId v : snap.undirected(u)) mark[v] = true;
    }
  }
  mark[i] = false;
  std::vector<NodeId> result;
  for (NodeId v = 0; v < mark.size(); ++v) {
    if (mark[v]) result.push_back(v);
  }
  return result;
}

std::optional<double> auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in size");
  const std::size_t m = scores.size();
  const auto pos = static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](std::uint8_t l) { return l != 0; }));
  const std::size_t neg = m - pos;
  if (pos == 0 || neg == 0) return std::nullopt;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // Rank sums are kept doubled so that midranks stay integral.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t lo = 0; lo < m;) {
    std::size_t hi = lo;
    while (hi + 1 < m && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    const std::uint64_t twice_midrank = (lo + 1) + (hi + 1);
    for (std::size_t k = lo; k <= hi; ++k) {
      if (labels[order[k]]) twice_rank_sum += twice_midrank;
    }
    lo = hi + 1;
  }
  // Twice the Mann-Whitney U: favorable pairs count 2, ties count 1.
  const std::uint64_t twice_u = twice_rank_sum - std::uint64_t{pos} * (pos + 1);
  return (double(twice_u) / 2.0) / (double(pos) * double(neg));
}

CandidateScorer::CandidateScorer(const GraphSequence& observed, Method method,
                                 const PredictorConfig& np, const BaselineParams& baseline)
    : observed_(&observed), method_(method), baseline_(baseline) {
  if (method == Method::NonParametric) predictor_.emplace(observed, np);
}

std::vector<double> CandidateScorer::score(NodeId i, std::span<const NodeId> candidates) const {
  if (method_ != Method::NonParametric) {
    return baseline_scores(method_, *observed_, i, candidates, observed_->length(), baseline_);
  }
  const auto q = predictor_->query(i);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (NodeId j : candidates) scores.push_back(predictor_->predict(q, j));
  return scores;
}

const MethodSummary& EvalReport::summary(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return s;
  }
  throw std::out_of_range("method " + method_name(m) + " not in report");
}

EvalReport evaluate(const EvalTask& task) {
  const TimeStep T = task.seq.length() - 1;
  if (T < 1) throw std::invalid_argument("evaluation needs at least two snapshots");
  if (task.methods.empty()) throw std::invalid_argument("no methods to evaluate");
  const GraphSequence observed = task.seq.prefix(T);
  const Snapshot& test = task.seq[T];

  EvalReport report;
  report.test_time = T;
  report.num_nodes = task.seq.num_nodes();
  report.config = {{"test_time", std::to_string(T)},
                   {"lag", std::to_string(task.np.cube.lag)},
                   {"r_max", std::to_string(task.np.cube.r_max)},
                   {"b", std::to_string(task.np.kernel.bandwidth)},
                   {"top_k", std::to_string(task.np.kernel.top_k)},
                   {"lambda", std::to_string(task.np.kernel.lambda)},
                   {"lsh", task.np.kernel.use_lsh ? "on" : "off"},
                   {"k_bits", std::to_string(task.np.lsh.k_bits)},
                   {"tables", std::to_string(task.np.lsh.tables)},
                   {"b1", std::to_string(task.np.lsh.b1)},
                   {"b2", std::to_string(task.np.lsh.b2)},
                   {"seed", std::to_string(task.baseline.seed)},
                   {"katz_beta", std::to_string(task.baseline.katz_beta)},
                   {"katz_length", std::to_string(task.baseline.katz_length)}};

  std::vector<NodeId> active;
  for (NodeId i = 0; i < task.seq.num_nodes(); ++i) {
    if (!test.undirected(i).empty()) active.push_back(i);
  }
  report.active_nodes = active.size();
  if (active.empty()) throw std::runtime_error("no node has an edge in the test snapshot");

  std::vector<std::vector<NodeId>> candidates(active.size());
  parallel_for(active.size(), [&](std::size_t k) {
    candidates[k] = candidate_set(observed, active[k], T);
  });

  for (Method m : task.methods) {
    const auto start = std::chrono::steady_clock::now();
    const CandidateScorer scorer(observed, m, task.np, task.baseline);
    const bool directed = m == Method::NonParametric;
    std::vector<std::optional<NodeResult>> per_node(active.size());
    parallel_for(active.size(), [&](std::size_t k) {
      const NodeId i = active[k];
      const auto& cand = candidates[k];
      if (cand.empty()) return;
      std::vector<std::uint8_t> labels(cand.size());
      std::size_t n_pos = 0;
      for (std::size_t c = 0; c < cand.size(); ++c) {
        labels[c] = directed ? test.has_edge(i, cand[c]) : test.has_undirected_edge(i, cand[c]);
        n_pos += labels[c];
      }
      if (n_pos == 0 || n_pos == cand.size()) return;
      const auto scores = scorer.score(i, cand);
      const auto value = auc(scores, labels);
      per_node[k] = NodeResult{m, i, *value, cand.size(), n_pos};
    });

    MethodSummary summary{m};
    double total = 0.0;
    for (const auto& r : per_node) {
      if (!r) {
        ++summary.skipped;
        continue;
      }
      ++summary.evaluated;
      total += r->auc;
      report.nodes.push_back(*r);
    }
    if (summary.evaluated == 0) {
      throw std::runtime_error("no evaluable nodes for method " + method_name(m));
    }
    summary.mean_auc = total / double(summary.evaluated);
    summary.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.methods.push_back(summary);
  }
  return report;
}

void write_report_text(std::ostream& out, const EvalReport& report) {
  out << "# test snapshot " << report.test_time << ", " << report.num_nodes << " nodes, |S>0| = "
      << report.active_nodes << '\n';
  for (const auto& [key, value] : report.config) out << "# " << key << " = " << value << '\n';
  char line[128];
  std::snprintf(line, sizeof(line), "%-6s %9s %10s %8s %9s\n", "method", "mean_auc", "evaluated",
                "skipped", "seconds");
  out << line;
  for (const auto& s : report.methods) {
    std::snprintf(line, sizeof(line), "%-6s %9.4f %10zu %8zu %9.3f\n", method_label(s.method).c_str(),
                  s.mean_auc, s.evaluated, s.skipped, s.seconds);
    out << line;
  }
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "method,node,auc,n_candidates,n_pos\n";
  char buf[32];
  for (const auto& r : report.nodes) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.auc);
    out << method_name(r.method) << ',' << r.node << ',' << buf << ',' << r.n_candidates << ','
        << r.n_pos << '\n';
  }
}

}  // namespace nplink
