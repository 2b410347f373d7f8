#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nplink/graph.hpp"

namespace nplink {

/// floor(log2(x + 1)).
int log_bin(std::size_t x);

/// Binned pair feature; one cell of the datacube.
struct PairFeature {
  std::uint8_t deg_i = 0;
  std::uint8_t deg_j = 0;
  std::uint8_t cn = 0;
  std::uint8_t ll = 0;  // raw last-link age in [0, p]

  std::uint32_t key() const {
    return (std::uint32_t{deg_i} << 24) | (std::uint32_t{deg_j} << 16) |
           (std::uint32_t{cn} << 8) | std::uint32_t{ll};
  }
  static PairFeature from_key(std::uint32_t k) {
    return {static_cast<std::uint8_t>(k >> 24), static_cast<std::uint8_t>(k >> 16),
            static_cast<std::uint8_t>(k >> 8), static_cast<std::uint8_t>(k)};
  }
  friend auto operator<=>(const PairFeature& a, const PairFeature& b) { return a.key() <=> b.key(); }
  friend bool operator==(const PairFeature& a, const PairFeature& b) = default;
};

/// L1 distance between two cells in bin space.
int cell_l1(const PairFeature& a, const PairFeature& b);

PairFeature pair_features(const GraphSequence& seq, NodeId i, NodeId j, TimeStep t, int p);

struct CellCounts {
  std::uint32_t n = 0;
  std::uint32_t n_plus = 0;
  friend bool operator==(const CellCounts&, const CellCounts&) = default;
};

struct Cell {
  PairFeature s;
  CellCounts counts;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Smoothed (possibly fractional) counts.
struct SmoothedCounts {
  double n = 0.0;
  double n_plus = 0.0;
};

/// Evolution of the neighborhood of `center` from t-1 to t: for every cell,
/// how many ordered pairs of N_{t-1}(center) had that feature at t-1 and how
/// many of them were linked at t. Cells are sorted by key; empty cells absent.
class Datacube {
 public:
  Datacube() = default;
  Datacube(NodeId center, TimeStep t, std::vector<Cell> cells);

  NodeId center() const { return center_; }
  TimeStep time() const { return t_; }
  const std::vector<Cell>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

  const CellCounts* find(const PairFeature& s) const;

  friend bool operator==(const Datacube&, const Datacube&) = default;

 private:
  NodeId center_ = 0;
  TimeStep t_ = 0;
  std::vector<Cell> cells_;
};

struct CubeParams {
  int lag = 3;
  std::size_t r_max = 400;
};

Datacube build_datacube(const GraphSequence& seq, NodeId i, TimeStep t, const CubeParams& params);

/// Stored counts for s when present, else a lambda^L1-weighted sum over
/// stored cells within L1 distance 2. (0, 0) when nothing is in range.
SmoothedCounts smooth_cell(const Datacube& cube, const PairFeature& s, double lambda);

/// "i t deg_i deg_j cn ll n n_plus", one line per cell.
void dump_datacube(std::ostream& out, const Datacube& cube);

/// Datacubes d_t(i) for every node and every t in [first, last].
class DatacubeTable {
 public:
  DatacubeTable(const GraphSequence& seq, TimeStep first, TimeStep last, const CubeParams& params);

  TimeStep first_time() const { return first_; }
  TimeStep last_time() const { return last_; }
  std::size_t num_nodes() const { return num_nodes_; }
  const CubeParams& params() const { return params_; }

  const Datacube& at(NodeId i, TimeStep t) const;
  const std::vector<Datacube>& all() const { return cubes_; }

 private:
  TimeStep first_;
  TimeStep last_;
  std::size_t num_nodes_;
  CubeParams params_;
  std::vector<Datacube> cubes_;  // time-major
};

}  // namespace nplink
