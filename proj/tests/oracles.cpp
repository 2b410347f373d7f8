#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

namespace oracle {

using nplink::CellPosterior;
using nplink::GraphSequence;
using nplink::NodeId;
using nplink::TimeStep;

namespace {

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double tv_trapezoid(const CellPosterior& a, const CellPosterior& b, double lo, double hi,
                    double step) {
  const double sa = std::sqrt(a.variance());
  const double sb = std::sqrt(b.variance());
  if (!(sa > 0.0 && sb > 0.0)) throw std::invalid_argument("trapezoid oracle needs sd > 0");
  const auto steps = static_cast<long>(std::llround((hi - lo) / step));
  auto g = [&](double x) { return std::abs(normal_pdf(x, a.p_hat, sa) - normal_pdf(x, b.p_hat, sb)); };
  double sum = 0.5 * (g(lo) + g(hi));
  for (long k = 1; k < steps; ++k) sum += g(lo + double(k) * step);
  return 0.5 * sum * step;
}

double normal_mass_trapezoid(double mean, double sd, double lo, double hi, double step) {
  if (hi <= lo) return 0.0;
  const auto steps = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / step)));
  const double h = (hi - lo) / double(steps);
  double sum = 0.5 * (normal_pdf(lo, mean, sd) + normal_pdf(hi, mean, sd));
  for (long k = 1; k < steps; ++k) sum += normal_pdf(lo + double(k) * h, mean, sd);
  return sum * h;
}

double katz_matrix_power(const nplink::Snapshot& snap, NodeId i, NodeId j, double beta, int L) {
  const std::size_t n = snap.num_nodes();
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (auto [u, v] : snap.edges()) {
    A[u][v] = 1.0;
    A[v][u] = 1.0;
  }
  auto P = A;
  double score = beta * P[i][j];
  double w = beta;
  for (int l = 2; l <= L; ++l) {
    std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t c = 0; c < n; ++c) next[r][c] += P[r][k] * A[k][c];
    P = std::move(next);
    w *= beta;
    score += w * P[i][j];
  }
  return score;
}

std::optional<double> auc_pairs(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::uint64_t twice = 0, pos = 0, neg = 0;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (labels[a]) ++pos; else ++neg;
  }
  if (pos == 0 || neg == 0) return std::nullopt;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (!labels[a]) continue;
    for (std::size_t b = 0; b < scores.size(); ++b) {
      if (labels[b]) continue;
      if (scores[a] > scores[b]) twice += 2;
      else if (scores[a] == scores[b]) twice += 1;
    }
  }
  return double(twice) / (2.0 * double(pos) * double(neg));
}

// ---------------------------------------------------------------------------
// Straight-line estimator

namespace {

using Key = std::array<int, 4>;
using Cube = std::map<Key, std::pair<double, double>>;

struct Model {
  const GraphSequence& seq;
  int p;
  std::size_t r_max;
  double lambda;
  std::vector<std::vector<std::set<NodeId>>> adj;  // [t][u], undirected

  Model(const GraphSequence& s, int lag, std::size_t cap, double lam)
      : seq(s), p(lag), r_max(cap), lambda(lam) {
    for (TimeStep t = 0; t < s.length(); ++t) {
      adj.emplace_back(s.num_nodes());
      for (auto [a, b] : s[t].edges()) {
        adj[t][a].insert(b);
        adj[t][b].insert(a);
      }
    }
  }

  const std::set<NodeId>& nbrs(TimeStep t, NodeId u) const { return adj[t][u]; }

  static int lbin(std::size_t x) {
    int b = 0;
    for (std::size_t y = x + 1; y > 1; y >>= 1) ++b;
    return b;
  }

  int ll(NodeId u, NodeId v, TimeStep t) const {
    for (int a = 0; a <= std::min<int>(p, t); ++a) {
      if (seq[t - a].has_edge(u, v)) return a;
    }
    return p;
  }

  std::set<NodeId> members(TimeStep t, NodeId i) const {
    std::set<NodeId> first = nbrs(t, i);
    if (first.empty()) {
      for (int a = 1; a <= p && t - a >= 0; ++a) {
        for (NodeId v : nbrs(t - a, i)) first.insert(v);
      }
    }
    std::set<NodeId> all{i};
    for (NodeId u : first) {
      all.insert(u);
      for (NodeId v : nbrs(t, u)) all.insert(v);
    }
    if (all.size() > r_max) throw std::logic_error("oracle does not truncate neighborhoods");
    return all;
  }

  Key features(NodeId u, NodeId v, TimeStep t) const {
    const auto& nu = nbrs(t, u);
    const auto& nv = nbrs(t, v);
    std::size_t cn = 0;
    for (NodeId z : nu) cn += (z != u && z != v && nv.count(z));
    return {lbin(nu.size()), lbin(nv.size()), lbin(cn), ll(u, v, t)};
  }

  Cube cube(TimeStep t, NodeId i) const {
    Cube c;
    const auto m = members(t - 1, i);
    for (NodeId u : m) {
      for (NodeId v : m) {
        if (u == v) continue;
        auto& cell = c[features(u, v, t - 1)];
        cell.first += 1.0;
        cell.second += seq[t].has_edge(u, v) ? 1.0 : 0.0;
      }
    }
    return c;
  }

  std::pair<double, double> smoothed(const Cube& c, const Key& s) const {
    if (auto it = c.find(s); it != c.end()) return it->second;
    std::pair<double, double> acc{0.0, 0.0};
    for (const auto& [key, counts] : c) {
      int l1 = 0;
      for (int k = 0; k < 4; ++k) l1 += std::abs(key[k] - s[k]);
      if (l1 > 2) continue;
      const double w = std::pow(lambda, l1);
      acc.first += w * counts.first;
      acc.second += w * counts.second;
    }
    return acc;
  }

  double distance(const Cube& a, const Cube& b) const {
    std::set<Key> keys;
    for (const auto& [k, v] : a) keys.insert(k);
    for (const auto& [k, v] : b) keys.insert(k);
    double d = 0.0;
    for (const auto& k : keys) {
      const auto x = smoothed(a, k);
      const auto y = smoothed(b, k);
      const CellPosterior px{x.first > 0 ? x.second / x.first : 0.0, x.first};
      const CellPosterior py{y.first > 0 ? y.second / y.first : 0.0, y.first};
      d += nplink::tv_normal(px, py);
    }
    return d;
  }
};

}  // namespace

struct StraightLineEstimator::State {
  Model m;
  nplink::PredictorConfig cfg;
  std::vector<std::vector<Cube>> cubes;  // [t][u], t >= 1
};

StraightLineEstimator::StraightLineEstimator(const GraphSequence& observed,
                                             const nplink::PredictorConfig& cfg)
    : state_(new State{Model(observed, cfg.cube.lag, cfg.cube.r_max, cfg.kernel.lambda), cfg, {}}) {
  const TimeStep T = observed.length();
  state_->cubes.resize(static_cast<std::size_t>(T));
  for (TimeStep t = 1; t < T; ++t) {
    for (NodeId u = 0; u < observed.num_nodes(); ++u) state_->cubes[t].push_back(state_->m.cube(t, u));
  }
}

StraightLineEstimator::~StraightLineEstimator() = default;

double StraightLineEstimator::predict(NodeId i, NodeId j) const {
  const Model& m = state_->m;
  const auto& cubes = state_->cubes;
  const TimeStep T = m.seq.length();
  const TimeStep first = std::max<TimeStep>(1, std::min<TimeStep>(m.p, T - 2));
  const Cube& query = cubes[T - 1][i];
  const Key s = m.features(i, j, T - 1);

  double num = 0.0, den = 0.0;
  for (TimeStep t = first; t <= T - 2; ++t) {
    for (NodeId u = 0; u < m.seq.num_nodes(); ++u) {
      const double w = std::pow(state_->cfg.kernel.bandwidth, m.distance(query, cubes[t][u]));
      const auto c = m.smoothed(cubes[t + 1][u], s);
      num += w * c.second;
      den += w * c.first;
    }
  }
  if (den > 0.0) return std::clamp(num / den, 0.0, 1.0);

  double pn = 0.0, pp = 0.0;
  for (TimeStep t = 1; t < T; ++t) {
    for (const auto& c : cubes[t]) {
      if (auto it = c.find(s); it != c.end()) {
        pn += it->second.first;
        pp += it->second.second;
      }
    }
  }
  return pn > 0.0 ? pp / pn : 0.5;
}

}  // namespace oracle
