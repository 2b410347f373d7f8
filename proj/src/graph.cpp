#include "nplink/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

namespace nplink {

namespace {

bool sorted_contains(std::span<const NodeId> list, NodeId v) {
  return std::binary_search(list.begin(), list.end(), v);
}

void check_node(const Snapshot& snap, NodeId u) {
  if (u >= snap.num_nodes()) {
    throw std::out_of_range("node id " + std::to_string(u) + " out of range");
  }
}

}  // namespace

Snapshot::Snapshot(TimeStep t, std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges)
    : t_(t), out_(n), in_(n), und_(n) {
  std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
    out_[u].push_back(v);
    in_[v].push_back(u);
  }
  num_edges_ = edges.size();
  for (std::size_t u = 0; u < n; ++u) {
    // out_ is filled in sorted order by construction; in_ needs a sort.
    std::sort(in_[u].begin(), in_[u].end());
    auto& und = und_[u];
    und.reserve(out_[u].size() + in_[u].size());
    std::set_union(out_[u].begin(), out_[u].end(), in_[u].begin(), in_[u].end(),
                   std::back_inserter(und));
  }
}

bool Snapshot::has_edge(NodeId u, NodeId v) const {
  return u < out_.size() && sorted_contains(out_[u], v);
}

bool Snapshot::has_undirected_edge(NodeId u, NodeId v) const {
  return u < und_.size() && sorted_contains(und_[u], v);
}

std::vector<std::pair<NodeId, NodeId>> Snapshot::edges() const {
  std::vector<std::pair<NodeId, NodeId>> result;
  result.reserve(num_edges_);
  for (NodeId u = 0; u < out_.size(); ++u) {
    for (NodeId v : out_[u]) result.emplace_back(u, v);
  }
  return result;
}

GraphSequence::GraphSequence(std::size_t n, std::vector<Snapshot> snapshots)
    : n_(n), snaps_(std::move(snapshots)) {
  for (std::size_t t = 0; t < snaps_.size(); ++t) {
    if (snaps_[t].num_nodes() != n_) throw std::invalid_argument("snapshot node count mismatch");
    if (snaps_[t].time() != static_cast<TimeStep>(t)) {
      throw std::invalid_argument("snapshot timesteps must be consecutive from 0");
    }
  }
}

const Snapshot& GraphSequence::at(TimeStep t) const {
  if (t < 0 || t >= length()) {
    throw std::out_of_range("timestep " + std::to_string(t) + " outside [0, " +
                            std::to_string(length()) + ")");
  }
  return snaps_[static_cast<std::size_t>(t)];
}

GraphSequence GraphSequence::prefix(TimeStep len) const {
  if (len < 0 || len > length()) throw std::out_of_range("prefix length out of range");
  return GraphSequence(n_, std::vector<Snapshot>(snaps_.begin(), snaps_.begin() + len));
}

GraphSequence GraphSequence::with_snapshot(TimeStep t,
                                           std::vector<std::pair<NodeId, NodeId>> edges) const {
  at(t);
  auto copy = snaps_;
  copy[static_cast<std::size_t>(t)] = Snapshot(t, n_, std::move(edges));
  return GraphSequence(n_, std::move(copy));
}

bool operator==(const GraphSequence& a, const GraphSequence& b) {
  if (a.n_ != b.n_ || a.snaps_.size() != b.snaps_.size()) return false;
  for (std::size_t t = 0; t < a.snaps_.size(); ++t) {
    if (a.snaps_[t].edges() != b.snaps_[t].edges()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Edge-list I/O

namespace {

template <typename T>
bool parse_field(std::string_view& rest, T& value) {
  auto first = rest.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return false;
  rest.remove_prefix(first);
  auto end = rest.find_first_of(" \t\r");
  auto token = rest.substr(0, end);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return false;
  rest.remove_prefix(token.size());
  return true;
}

}  // namespace

GraphSequence load_edge_list(std::istream& in, const LoadOptions& opts) {
  struct RawEdge {
    std::uint64_t t, src, dst;
  };
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    if (view.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    RawEdge e{};
    if (!parse_field(view, e.t) || !parse_field(view, e.src) || !parse_field(view, e.dst) ||
        view.find_first_not_of(" \t\r") != std::string_view::npos) {
      throw ParseError("expected 't src dst' with non-negative integers", lineno);
    }
    if (e.t >= static_cast<std::uint64_t>(opts.max_timesteps)) {
      throw ParseError("timestep " + std::to_string(e.t) + " exceeds maximum of " +
                           std::to_string(opts.max_timesteps),
                       lineno);
    }
    raw.push_back(e);
  }
  if (raw.empty()) throw ParseError("edge list is empty", 0);

  std::map<std::uint64_t, NodeId> ids;
  for (const auto& e : raw) {
    ids.emplace(e.src, 0);
    ids.emplace(e.dst, 0);
  }
  NodeId next = 0;
  for (auto& [orig, dense] : ids) dense = next++;

  std::uint64_t max_t = 0;
  for (const auto& e : raw) max_t = std::max(max_t, e.t);
  std::vector<std::vector<std::pair<NodeId, NodeId>>> per_t(max_t + 1);
  for (const auto& e : raw) {
    NodeId u = ids[e.src], v = ids[e.dst];
    per_t[e.t].emplace_back(u, v);
    if (opts.undirected) per_t[e.t].emplace_back(v, u);
  }
  std::vector<Snapshot> snaps;
  snaps.reserve(per_t.size());
  for (std::size_t t = 0; t < per_t.size(); ++t) {
    snaps.emplace_back(static_cast<TimeStep>(t), ids.size(), std::move(per_t[t]));
  }
  return GraphSequence(ids.size(), std::move(snaps));
}

GraphSequence load_edge_list_file(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_edge_list(in, opts);
}

void write_edge_list(std::ostream& out, const GraphSequence& seq) {
  const auto n = seq.num_nodes();
  std::vector<bool> seen(n, false);
  for (TimeStep t = 0; t < seq.length(); ++t) {
    for (NodeId u = 0; u < n; ++u) {
      if (!seq[t].undirected(u).empty()) seen[u] = true;
    }
  }
  out << "# t src dst\n";
  for (NodeId u = 0; u < n; ++u) {
    if (!seen[u]) out << 0 << ' ' << u << ' ' << u << '\n';
  }
  for (TimeStep t = 0; t < seq.length(); ++t) {
    for (const auto& [u, v] : seq[t].edges()) out << t << ' ' << u << ' ' << v << '\n';
  }
  if (seq.length() > 0 && seq[seq.length() - 1].num_edges() == 0 && n > 0) {
    out << seq.length() - 1 << " 0 0\n";
  }
}

void write_edge_list_file(const std::string& path, const GraphSequence& seq) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_edge_list(out, seq);
}

// ---------------------------------------------------------------------------
// Local structure

std::size_t degree(const Snapshot& snap, NodeId i) {
  check_node(snap, i);
  return snap.undirected(i).size();
}

std::size_t common_neighbors(const Snapshot& snap, NodeId i, NodeId j) {
  check_node(snap, i);
  check_node(snap, j);
  auto a = snap.undirected(i);
  auto b = snap.undirected(j);
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      if (*ia != i && *ia != j) ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

int last_link_age(const GraphSequence& seq, NodeId i, NodeId j, TimeStep t, int p) {
  seq.at(t);
  const int horizon = std::min<int>(p, t);
  for (int a = 0; a <= horizon; ++a) {
    if (seq[t - a].has_edge(i, j)) return a;
  }
  return p;
}

NeighborhoodSubgraph neighborhood(const GraphSequence& seq, NodeId i, TimeStep t, int p,
                                  std::size_t r_max) {
  const Snapshot& snap = seq.at(t);
  check_node(snap, i);
  if (p < 1) throw std::invalid_argument("lag must be >= 1");
  if (r_max < 1) throw std::invalid_argument("r_max must be >= 1");

  constexpr std::uint8_t kUnseen = 0xff;
  std::vector<std::uint8_t> layer(snap.num_nodes(), kUnseen);
  std::vector<NodeId> frontier{i};
  layer[i] = 0;

  auto expand = [&](std::span<const NodeId> from, std::uint8_t next_layer) {
    std::vector<NodeId> next;
    for (NodeId u : from) {
      for (NodeId v : snap.undirected(u)) {
        if (layer[v] == kUnseen) {
          layer[v] = next_layer;
          next.push_back(v);
        }
      }
    }
    return next;
  };

  std::vector<NodeId> first;
  if (!snap.undirected(i).empty()) {
    first = expand(frontier, 1);
  } else {
    // Sparse fallback: partners of i over the previous p snapshots.
    for (int a = 1; a <= p && t - a >= 0; ++a) {
      for (NodeId v : seq[t - a].undirected(i)) {
        if (layer[v] == kUnseen) {
          layer[v] = 1;
          first.push_back(v);
        }
      }
    }
  }
  expand(first, 2);

  std::vector<NodeId> members;
  for (NodeId v = 0; v < layer.size(); ++v) {
    if (layer[v] != kUnseen) members.push_back(v);
  }
  if (members.size() > r_max) {
    std::stable_sort(members.begin(), members.end(),
                     [&](NodeId a, NodeId b) { return layer[a] < layer[b]; });
    members.resize(r_max);
    std::sort(members.begin(), members.end());
  }

  NeighborhoodSubgraph result{i, t, std::move(members), {}};
  for (NodeId u : result.members) {
    for (NodeId v : snap.out(u)) {
      if (std::binary_search(result.members.begin(), result.members.end(), v)) {
        result.edges.emplace_back(u, v);
      }
    }
  }
  return result;
}

}  // namespace nplink
