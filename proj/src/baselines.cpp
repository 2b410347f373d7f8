#include "nplink/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nplink {

namespace {

const Snapshot& last_observed(const GraphSequence& seq, TimeStep T) {
  if (T < 1) throw std::invalid_argument("scoring needs T >= 1");
  return seq.at(T - 1);
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double score_last_link(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T) {
  last_observed(seq, T);
  for (TimeStep t = T - 1; t >= 0; --t) {
    if (seq[t].has_undirected_edge(i, j)) return -double(T - 1 - t);
  }
  return kNeverLinked;
}

double score_common_neighbors(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T) {
  return double(common_neighbors(last_observed(seq, T), i, j));
}

double score_adamic_adar(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T) {
  const Snapshot& snap = last_observed(seq, T);
  auto a = snap.undirected(i);
  auto b = snap.undirected(j);
  double score = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      const NodeId z = *ia;
      const auto deg = snap.undirected(z).size();
      if (z != i && z != j && deg > 1) score += 1.0 / std::log(double(deg));
      ++ia;
      ++ib;
    }
  }
  return score;
}

std::vector<double> katz_row(const Snapshot& snap, NodeId i, double beta, int max_length) {
  if (!(beta > 0.0)) throw std::invalid_argument("Katz beta must be > 0");
  if (max_length < 1) throw std::invalid_argument("Katz path length must be >= 1");
  const auto n = snap.num_nodes();
  if (i >= n) throw std::out_of_range("node id out of range");
  std::vector<double> walks(n, 0.0), next(n), score(n, 0.0);
  walks[i] = 1.0;
  double weight = 1.0;
  for (int len = 1; len <= max_length; ++len) {
    std::fill(next.begin(), next.end(), 0.0);
    for (NodeId u = 0; u < n; ++u) {
      if (walks[u] == 0.0) continue;
      for (NodeId v : snap.undirected(u)) next[v] += walks[u];
    }
    walks.swap(next);
    weight *= beta;
    for (NodeId v = 0; v < n; ++v) score[v] += weight * walks[v];
  }
  return score;
}

double score_katz(const GraphSequence& seq, NodeId i, NodeId j, TimeStep T, double beta,
                  int max_length) {
  const auto row = katz_row(last_observed(seq, T), i, beta, max_length);
  if (j >= row.size()) throw std::out_of_range("node id out of range");
  return row[j];
}

double score_random(NodeId i, NodeId j, std::uint64_t seed) {
  const std::uint64_t h = mix(mix(seed) ^ mix((std::uint64_t{i} << 32) | j));
  return double(h >> 11) * 0x1.0p-53;
}

Method parse_method(const std::string& name) {
  if (name == "np") return Method::NonParametric;
  if (name == "ll") return Method::LastLink;
  if (name == "cn") return Method::CommonNeighbors;
  if (name == "aa") return Method::AdamicAdar;
  if (name == "katz" || name == "kz") return Method::Katz;
  if (name == "rnd") return Method::Random;
  throw std::invalid_argument("unknown method '" + name + "' (expected np|ll|cn|aa|katz|rnd)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::NonParametric: return "np";
    case Method::LastLink: return "ll";
    case Method::CommonNeighbors: return "cn";
    case Method::AdamicAdar: return "aa";
    case Method::Katz: return "katz";
    case Method::Random: return "rnd";
  }
  return "?";
}

std::string method_label(Method m) {
  switch (m) {
    case Method::NonParametric: return "NP";
    case Method::LastLink: return "LL";
    case Method::CommonNeighbors: return "CN";
    case Method::AdamicAdar: return "AA";
    case Method::Katz: return "KZ";
    case Method::Random: return "RND";
  }
  return "?";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::NonParametric,   Method::LastLink,
                                           Method::CommonNeighbors, Method::AdamicAdar,
                                           Method::Katz,            Method::Random};
  return methods;
}

std::vector<double> baseline_scores(Method m, const GraphSequence& seq, NodeId i,
                                    std::span<const NodeId> candidates, TimeStep T,
                                    const BaselineParams& params) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  switch (m) {
    case Method::LastLink:
      for (NodeId j : candidates) scores.push_back(score_last_link(seq, i, j, T));
      break;
    case Method::CommonNeighbors:
      for (NodeId j : candidates) scores.push_back(score_common_neighbors(seq, i, j, T));
      break;
    case Method::AdamicAdar:
      for (NodeId j : candidates) scores.push_back(score_adamic_adar(seq, i, j, T));
      break;
    case Method::Katz: {
      const auto row = katz_row(last_observed(seq, T), i, params.katz_beta, params.katz_length);
      for (NodeId j : candidates) scores.push_back(row.at(j));
      break;
    }
    case Method::Random:
      for (NodeId j : candidates) scores.push_back(score_random(i, j, params.seed));
      break;
    case Method::NonParametric:
      throw std::invalid_argument("NP is not a heuristic baseline");
  }
  return scores;
}

}  // namespace nplink
