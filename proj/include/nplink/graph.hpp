#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nplink {

using NodeId = std::uint32_t;
using TimeStep = std::int32_t;

/// Raised by the edge-list reader; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One directed graph G_t over the node universe [0, n).
///
/// Adjacency lists are sorted and duplicate-free, self-loops are never stored,
/// and `in` is the exact transpose of `out`. `undirected` is the sorted union of
/// both lists and backs every hop-based computation.
class Snapshot {
 public:
  Snapshot() = default;
  /// Builds from an arbitrary edge list. Duplicates and self-loops are dropped.
  Snapshot(TimeStep t, std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges);

  TimeStep time() const { return t_; }
  std::size_t num_nodes() const { return out_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  std::span<const NodeId> out(NodeId u) const { return out_[u]; }
  std::span<const NodeId> in(NodeId u) const { return in_[u]; }
  std::span<const NodeId> undirected(NodeId u) const { return und_[u]; }

  bool has_edge(NodeId u, NodeId v) const;
  bool has_undirected_edge(NodeId u, NodeId v) const;

  /// All edges in (src, dst) lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

 private:
  TimeStep t_ = 0;
  std::size_t num_edges_ = 0;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> und_;
};

/// Ordered snapshots 0..T-1 sharing a node count. Immutable once built.
class GraphSequence {
 public:
  GraphSequence() = default;
  GraphSequence(std::size_t n, std::vector<Snapshot> snapshots);

  std::size_t num_nodes() const { return n_; }
  TimeStep length() const { return static_cast<TimeStep>(snaps_.size()); }
  const Snapshot& at(TimeStep t) const;
  const Snapshot& operator[](TimeStep t) const { return snaps_[static_cast<std::size_t>(t)]; }

  /// Copy holding only snapshots [0, len).
  GraphSequence prefix(TimeStep len) const;

  /// Copy with snapshot t replaced.
  GraphSequence with_snapshot(TimeStep t, std::vector<std::pair<NodeId, NodeId>> edges) const;

  friend bool operator==(const GraphSequence& a, const GraphSequence& b);

 private:
  std::size_t n_ = 0;
  std::vector<Snapshot> snaps_;
};

struct LoadOptions {
  bool undirected = false;
  TimeStep max_timesteps = 1 << 20;
};

/// Reads "t src dst" lines. '#' starts a comment. Node ids are compacted to a
/// dense range in ascending order of their original value; empty timesteps in
/// between are materialized.
GraphSequence load_edge_list(std::istream& in, const LoadOptions& opts = {});
GraphSequence load_edge_list_file(const std::string& path, const LoadOptions& opts = {});

/// Writes a sequence so that load_edge_list reproduces it exactly. Nodes that
/// never touch an edge and a trailing empty snapshot are pinned with
/// self-loop lines, which the reader strips but still registers.
void write_edge_list(std::ostream& out, const GraphSequence& seq);
void write_edge_list_file(const std::string& path, const GraphSequence& seq);

/// Subgraph of snapshot t around a center node.
struct NeighborhoodSubgraph {
  NodeId center = 0;
  TimeStep t = 0;
  std::vector<NodeId> members;  // sorted ascending
  std::vector<std::pair<NodeId, NodeId>> edges;
};

/// Nodes within two undirected hops of i in snapshot t, capped at r_max by
/// (hop layer, node id). When i is isolated at t, nodes linked to i during
/// t-1..t-p and their one-hop closure at t are used instead.
NeighborhoodSubgraph neighborhood(const GraphSequence& seq, NodeId i, TimeStep t, int p,
                                  std::size_t r_max);

/// Number of distinct neighbors of i, ignoring direction.
std::size_t degree(const Snapshot& snap, NodeId i);
/// |N(i) ∩ N(j)| over undirected one-hop sets, i and j themselves excluded.
std::size_t common_neighbors(const Snapshot& snap, NodeId i, NodeId j);
/// Steps since i->j last appeared in snapshots t, t-1, ..., t-p; p if never.
int last_link_age(const GraphSequence& seq, NodeId i, NodeId j, TimeStep t, int p);

}  // namespace nplink
