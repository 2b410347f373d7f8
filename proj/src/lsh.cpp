#include "nplink/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_set>

namespace nplink {

namespace {

constexpr char kMagic[8] = {'N', 'P', 'L', 'S', 'H', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw in [0, bound) that does not depend on the standard library's
// distribution implementation, so indexes are identical across toolchains.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated LSH index file");
  return v;
}

}  // namespace

std::vector<double> histogram_masses(const CellPosterior& post, std::uint32_t b1) {
  if (b1 < 2) throw std::invalid_argument("B1 must be >= 2");
  std::vector<double> masses(b1, 0.0);
  if (post.empty()) return masses;
  const double var = post.variance();
  if (var <= 0.0) {
    const auto m = std::min<std::uint32_t>(static_cast<std::uint32_t>(post.p_hat * b1), b1 - 1);
    masses[m] = 1.0;
    return masses;
  }
  const double sd = std::sqrt(var);
  const double inf = std::numeric_limits<double>::infinity();
  for (std::uint32_t m = 0; m < b1; ++m) {
    const double lo = m == 0 ? -inf : double(m) / b1;
    const double hi = m + 1 == b1 ? inf : double(m + 1) / b1;
    masses[m] = normal_interval_mass(post.p_hat, sd, lo, hi);
  }
  return masses;
}

std::vector<std::uint8_t> bucket_fill(std::span<const double> masses, std::uint32_t b2) {
  if (b2 < 1 || b2 > 255) throw std::invalid_argument("B2 must lie in [1, 255]");
  std::vector<std::uint8_t> fill(masses.size());
  for (std::size_t m = 0; m < masses.size(); ++m) {
    const double bits = std::floor(masses[m] * b2 + 1e-12);
    fill[m] = static_cast<std::uint8_t>(std::clamp(bits, 0.0, double(b2)));
  }
  return fill;
}

CellCode encode_cell(const CellPosterior& post, std::uint32_t b1, std::uint32_t b2) {
  const auto fill = bucket_fill(histogram_masses(post, b1), b2);
  CellCode code;
  code.bits.assign(std::size_t{b1} * b2, 0);
  for (std::uint32_t m = 0; m < b1; ++m) {
    std::fill_n(code.bits.begin() + std::size_t{m} * b2, fill[m], std::uint8_t{1});
  }
  return code;
}

std::size_t LshIndex::KeyHash::operator()(const std::vector<std::uint64_t>& k) const {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (auto w : k) h = splitmix64(h ^ w);
  return static_cast<std::size_t>(h);
}

std::uint64_t LshIndex::num_bits() const {
  return std::uint64_t{vocab_.size()} * params_.b1 * params_.b2;
}

LshIndex::SparseCode LshIndex::sparse_code(const Datacube& cube) const {
  SparseCode code;
  for (const auto& cell : cube.cells()) {
    auto it = std::lower_bound(vocab_.begin(), vocab_.end(), cell.s.key());
    if (it == vocab_.end() || *it != cell.s.key()) continue;
    code.cells.push_back(static_cast<std::uint32_t>(it - vocab_.begin()));
    const auto post = CellPosterior::from_counts(cell.counts.n, cell.counts.n_plus);
    const auto fill = bucket_fill(histogram_masses(post, params_.b1), params_.b2);
    code.fills.insert(code.fills.end(), fill.begin(), fill.end());
  }
  return code;
}

std::vector<std::uint64_t> LshIndex::key(const SparseCode& code, std::size_t table) const {
  const auto& positions = specs_.at(table);
  const std::uint64_t per_cell = std::uint64_t{params_.b1} * params_.b2;
  std::vector<std::uint64_t> words((positions.size() + 63) / 64, 0);
  for (std::size_t b = 0; b < positions.size(); ++b) {
    const std::uint64_t pos = positions[b];
    const auto cell = static_cast<std::uint32_t>(pos / per_cell);
    auto it = std::lower_bound(code.cells.begin(), code.cells.end(), cell);
    if (it == code.cells.end() || *it != cell) continue;
    const std::uint64_t within = pos % per_cell;
    const std::size_t slot = static_cast<std::size_t>(it - code.cells.begin());
    const auto bucket = static_cast<std::size_t>(within / params_.b2);
    const auto bit = static_cast<std::uint8_t>(within % params_.b2);
    if (bit < code.fills[slot * params_.b1 + bucket]) words[b / 64] |= std::uint64_t{1} << (b % 64);
  }
  return words;
}

std::vector<std::uint64_t> LshIndex::key(const Datacube& cube, std::size_t table) const {
  return key(sparse_code(cube), table);
}

std::vector<std::uint8_t> LshIndex::materialize(const Datacube& cube) const {
  std::vector<std::uint8_t> bits(num_bits(), 0);
  const auto code = sparse_code(cube);
  const std::size_t per_cell = std::size_t{params_.b1} * params_.b2;
  for (std::size_t c = 0; c < code.cells.size(); ++c) {
    for (std::uint32_t m = 0; m < params_.b1; ++m) {
      auto first = bits.begin() + code.cells[c] * per_cell + std::size_t{m} * params_.b2;
      std::fill_n(first, code.fills[c * params_.b1 + m], std::uint8_t{1});
    }
  }
  return bits;
}

std::uint64_t LshIndex::hamming(const Datacube& a, const Datacube& b) const {
  const auto ca = sparse_code(a);
  const auto cb = sparse_code(b);
  const std::uint32_t b1 = params_.b1;
  std::uint64_t total = 0;
  auto add_all = [&](const SparseCode& c, std::size_t slot) {
    for (std::uint32_t m = 0; m < b1; ++m) total += c.fills[slot * b1 + m];
  };
  std::size_t ia = 0, ib = 0;
  while (ia < ca.cells.size() || ib < cb.cells.size()) {
    if (ib == cb.cells.size() || (ia < ca.cells.size() && ca.cells[ia] < cb.cells[ib])) {
      add_all(ca, ia++);
    } else if (ia == ca.cells.size() || cb.cells[ib] < ca.cells[ia]) {
      add_all(cb, ib++);
    } else {
      for (std::uint32_t m = 0; m < b1; ++m) {
        total += static_cast<std::uint64_t>(
            std::abs(int{ca.fills[ia * b1 + m]} - int{cb.fills[ib * b1 + m]}));
      }
      ++ia;
      ++ib;
    }
  }
  return total;
}

LshIndex LshIndex::build(Cubes cubes, const LshParams& params, double lambda) {
  if (!cubes || cubes->empty()) throw std::invalid_argument("cannot index an empty cube set");
  if (params.k_bits < 1) throw std::invalid_argument("k must be >= 1");
  if (params.tables < 1) throw std::invalid_argument("number of tables must be >= 1");
  if (params.b1 < 2) throw std::invalid_argument("B1 must be >= 2");
  if (params.b2 < 1 || params.b2 > 255) throw std::invalid_argument("B2 must lie in [1, 255]");
  if (cubes->size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("too many cubes for one index");
  }

  LshIndex index;
  index.params_ = params;
  index.lambda_ = lambda;
  index.cubes_ = std::move(cubes);
  for (const auto& cube : *index.cubes_) {
    for (const auto& cell : cube.cells()) index.vocab_.push_back(cell.s.key());
  }
  std::sort(index.vocab_.begin(), index.vocab_.end());
  index.vocab_.erase(std::unique(index.vocab_.begin(), index.vocab_.end()), index.vocab_.end());

  const std::uint64_t total_bits = index.num_bits();
  if (params.k_bits > total_bits) {
    throw std::invalid_argument("k = " + std::to_string(params.k_bits) + " exceeds the " +
                                std::to_string(total_bits) + "-bit layout");
  }

  // Floyd's sampling: k distinct positions per table.
  std::mt19937_64 rng(params.seed);
  index.specs_.resize(params.tables);
  for (auto& spec : index.specs_) {
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = total_bits - params.k_bits; j < total_bits; ++j) {
      const std::uint64_t r = draw_below(rng, j + 1);
      if (!chosen.insert(r).second) chosen.insert(j);
    }
    spec.assign(chosen.begin(), chosen.end());
    std::sort(spec.begin(), spec.end());
  }

  index.tables_.resize(params.tables);
  for (std::uint32_t e = 0; e < index.cubes_->size(); ++e) {
    const auto code = index.sparse_code((*index.cubes_)[e]);
    for (std::size_t tb = 0; tb < params.tables; ++tb) {
      index.tables_[tb][index.key(code, tb)].push_back(e);
    }
  }
  return index;
}

LshIndex::QueryResult LshIndex::query(const Datacube& q, std::size_t top_k) const {
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  QueryResult result;
  const std::size_t cap = std::max<std::size_t>(params_.tables, top_k);
  std::vector<std::uint32_t> candidates;
  std::unordered_set<std::uint32_t> seen;
  const auto code = sparse_code(q);
  for (std::size_t tb = 0; tb < tables_.size() && candidates.size() < cap; ++tb) {
    auto it = tables_[tb].find(key(code, tb));
    if (it == tables_[tb].end()) continue;
    for (std::uint32_t e : it->second) {
      if (candidates.size() >= cap) break;
      if (seen.insert(e).second) candidates.push_back(e);
    }
  }

  if (candidates.empty()) {
    result.fallback = true;
    const std::size_t want = std::min(cubes_->size(), 4 * top_k);
    std::mt19937_64 rng(splitmix64(params_.seed ^ splitmix64((std::uint64_t{q.center()} << 32) ^
                                                             static_cast<std::uint32_t>(q.time()))));
    std::vector<std::uint32_t> all(cubes_->size());
    for (std::uint32_t e = 0; e < all.size(); ++e) all[e] = e;
    for (std::size_t a = 0; a < want; ++a) {
      std::swap(all[a], all[a + draw_below(rng, all.size() - a)]);
    }
    candidates.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(want));
  }

  result.candidates = candidates.size();
  result.matches.reserve(candidates.size());
  for (std::uint32_t e : candidates) {
    result.matches.push_back({e, datacube_distance(q, (*cubes_)[e], lambda_)});
  }
  std::sort(result.matches.begin(), result.matches.end(), [](const Match& a, const Match& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.entry < b.entry;
  });
  if (result.matches.size() > top_k) result.matches.resize(top_k);
  return result;
}

// ---------------------------------------------------------------------------
// Persistence

void LshIndex::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, params_.k_bits);
  put(out, params_.tables);
  put(out, params_.b1);
  put(out, params_.b2);
  put(out, params_.seed);

  put(out, std::uint64_t{vocab_.size()});
  for (auto key : vocab_) put(out, key);
  for (const auto& spec : specs_) {
    for (auto pos : spec) put(out, pos);
  }
  put(out, std::uint64_t{cubes_->size()});
  for (const auto& cube : *cubes_) {
    put(out, std::uint32_t{cube.center()});
    put(out, std::int32_t{cube.time()});
  }
  for (const auto& table : tables_) {
    std::vector<const Table::value_type*> buckets;
    buckets.reserve(table.size());
    for (const auto& kv : table) buckets.push_back(&kv);
    std::sort(buckets.begin(), buckets.end(), [](auto* a, auto* b) { return a->first < b->first; });
    put(out, std::uint64_t{buckets.size()});
    for (const auto* bucket : buckets) {
      for (auto w : bucket->first) put(out, w);
      put(out, std::uint64_t{bucket->second.size()});
      for (auto e : bucket->second) put(out, e);
    }
  }
  if (!out) throw std::runtime_error("failed to write LSH index");
}

void LshIndex::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  save(out);
}

LshIndex LshIndex::load(std::istream& in, Cubes cubes, double lambda, const LshParams* expected) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not an LSH index file");
  }
  if (const auto version = get<std::uint32_t>(in); version != kVersion) {
    throw std::runtime_error("unsupported LSH index version " + std::to_string(version));
  }
  LshIndex index;
  index.lambda_ = lambda;
  index.params_.k_bits = get<std::uint32_t>(in);
  index.params_.tables = get<std::uint32_t>(in);
  index.params_.b1 = get<std::uint32_t>(in);
  index.params_.b2 = get<std::uint32_t>(in);
  index.params_.seed = get<std::uint64_t>(in);
  if (expected && !(*expected == index.params_)) {
    throw std::runtime_error("LSH index parameters do not match the requested configuration");
  }
  if (!cubes) throw std::invalid_argument("LSH index needs its training cubes");
  index.cubes_ = std::move(cubes);

  index.vocab_.resize(get<std::uint64_t>(in));
  for (auto& key : index.vocab_) key = get<std::uint32_t>(in);
  const std::uint64_t total_bits = index.num_bits();
  index.specs_.assign(index.params_.tables, std::vector<std::uint64_t>(index.params_.k_bits));
  for (auto& spec : index.specs_) {
    for (auto& pos : spec) {
      pos = get<std::uint64_t>(in);
      if (pos >= total_bits) throw std::runtime_error("LSH index bit position out of range");
    }
  }
  const auto entries = get<std::uint64_t>(in);
  if (entries != index.cubes_->size()) {
    throw std::runtime_error("LSH index covers " + std::to_string(entries) + " cubes, but " +
                             std::to_string(index.cubes_->size()) + " were supplied");
  }
  for (const auto& cube : *index.cubes_) {
    const auto center = get<std::uint32_t>(in);
    const auto t = get<std::int32_t>(in);
    if (center != cube.center() || t != cube.time()) {
      throw std::runtime_error("LSH index entries do not match the supplied cubes");
    }
  }
  const std::size_t words = (index.params_.k_bits + 63) / 64;
  index.tables_.resize(index.params_.tables);
  for (auto& table : index.tables_) {
    const auto buckets = get<std::uint64_t>(in);
    for (std::uint64_t b = 0; b < buckets; ++b) {
      std::vector<std::uint64_t> key(words);
      for (auto& w : key) w = get<std::uint64_t>(in);
      std::vector<std::uint32_t> members(get<std::uint64_t>(in));
      for (auto& e : members) {
        e = get<std::uint32_t>(in);
        if (e >= entries) throw std::runtime_error("LSH index entry out of range");
      }
      table.emplace(std::move(key), std::move(members));
    }
  }
  return index;
}

LshIndex LshIndex::load_file(const std::string& path, Cubes cubes, double lambda,
                             const LshParams* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in, std::move(cubes), lambda, expected);
}

}  // namespace nplink
