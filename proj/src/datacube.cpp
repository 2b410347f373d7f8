#include "nplink/datacube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "nplink/parallel.hpp"

namespace nplink {

int log_bin(std::size_t x) {
  // floor(log2(x + 1)) == bit width of (x + 1) minus one.
  return static_cast<int>(std::bit_width(x + 1)) - 1;
}

int cell_l1(const PairFeature& a, const PairFeature& b) {
  return std::abs(int{a.deg_i} - int{b.deg_i}) + std::abs(int{a.deg_j} - int{b.deg_j}) +
         std::abs(int{a.cn} - int{b.cn}) + std::abs(int{a.ll} - int{b.ll});
}

PairFeature pair_features(const GraphSequence& seq, NodeId i, NodeId j, TimeStep t, int p) {
  if (i == j) throw std::invalid_argument("pair_features requires i != j");
  if (p < 0 || p > 255) throw std::invalid_argument("lag must lie in [0, 255]");
  const Snapshot& snap = seq.at(t);
  return {static_cast<std::uint8_t>(log_bin(degree(snap, i))),
          static_cast<std::uint8_t>(log_bin(degree(snap, j))),
          static_cast<std::uint8_t>(log_bin(common_neighbors(snap, i, j))),
          static_cast<std::uint8_t>(last_link_age(seq, i, j, t, p))};
}

Datacube::Datacube(NodeId center, TimeStep t, std::vector<Cell> cells)
    : center_(center), t_(t), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) { return a.s < b.s; });
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const auto& c = cells_[k];
    if (c.counts.n == 0 || c.counts.n_plus > c.counts.n) {
      throw std::invalid_argument("datacube cells need 0 <= n_plus <= n and n >= 1");
    }
    if (k > 0 && cells_[k - 1].s == c.s) throw std::invalid_argument("duplicate datacube cell");
  }
}

const CellCounts* Datacube::find(const PairFeature& s) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), s,
                             [](const Cell& c, const PairFeature& key) { return c.s < key; });
  if (it == cells_.end() || it->s != s) return nullptr;
  return &it->counts;
}

Datacube build_datacube(const GraphSequence& seq, NodeId i, TimeStep t, const CubeParams& params) {
  if (t < 1 || t >= seq.length()) {
    throw std::out_of_range("datacube time " + std::to_string(t) + " outside [1, " +
                            std::to_string(seq.length()) + ")");
  }
  const TimeStep prev = t - 1;
  const auto nb = neighborhood(seq, i, prev, params.lag, params.r_max);
  const Snapshot& before = seq[prev];
  const Snapshot& after = seq[t];

  std::vector<std::uint8_t> deg_bin(nb.members.size());
  for (std::size_t a = 0; a < nb.members.size(); ++a) {
    deg_bin[a] = static_cast<std::uint8_t>(log_bin(degree(before, nb.members[a])));
  }

  std::unordered_map<std::uint32_t, CellCounts> counts;
  for (std::size_t a = 0; a < nb.members.size(); ++a) {
    const NodeId u = nb.members[a];
    for (std::size_t b = 0; b < nb.members.size(); ++b) {
      if (a == b) continue;
      const NodeId v = nb.members[b];
      const PairFeature s{deg_bin[a], deg_bin[b],
                          static_cast<std::uint8_t>(log_bin(common_neighbors(before, u, v))),
                          static_cast<std::uint8_t>(last_link_age(seq, u, v, prev, params.lag))};
      auto& cell = counts[s.key()];
      ++cell.n;
      if (after.has_edge(u, v)) ++cell.n_plus;
    }
  }

  std::vector<Cell> cells;
  cells.reserve(counts.size());
  for (const auto& [key, c] : counts) cells.push_back({PairFeature::from_key(key), c});
  return Datacube(i, t, std::move(cells));
}

SmoothedCounts smooth_cell(const Datacube& cube, const PairFeature& s, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (const auto* c = cube.find(s)) return {double(c->n), double(c->n_plus)};
  SmoothedCounts acc;
  for (const auto& cell : cube.cells()) {
    const int d = cell_l1(cell.s, s);
    if (d > 2) continue;
    const double w = d == 1 ? lambda : lambda * lambda;
    acc.n += w * cell.counts.n;
    acc.n_plus += w * cell.counts.n_plus;
  }
  return acc;
}

void dump_datacube(std::ostream& out, const Datacube& cube) {
  for (const auto& c : cube.cells()) {
    out << cube.center() << ' ' << cube.time() << ' ' << int{c.s.deg_i} << ' ' << int{c.s.deg_j}
        << ' ' << int{c.s.cn} << ' ' << int{c.s.ll} << ' ' << c.counts.n << ' '
        << c.counts.n_plus << '\n';
  }
}

DatacubeTable::DatacubeTable(const GraphSequence& seq, TimeStep first, TimeStep last,
                             const CubeParams& params)
    : first_(first), last_(last), num_nodes_(seq.num_nodes()), params_(params) {
  if (first < 1 || last >= seq.length() || first > last) {
    throw std::out_of_range("datacube time range invalid for this sequence");
  }
  const std::size_t steps = static_cast<std::size_t>(last - first + 1);
  cubes_.resize(steps * num_nodes_);
  parallel_for(cubes_.size(), [&](std::size_t k) {
    const auto t = first + static_cast<TimeStep>(k / num_nodes_);
    const auto i = static_cast<NodeId>(k % num_nodes_);
    cubes_[k] = build_datacube(seq, i, t, params_);
  });
}

const Datacube& DatacubeTable::at(NodeId i, TimeStep t) const {
  if (i >= num_nodes_ || t < first_ || t > last_) throw std::out_of_range("no datacube for (i, t)");
  return cubes_[static_cast<std::size_t>(t - first_) * num_nodes_ + i];
}

}  // namespace nplink
