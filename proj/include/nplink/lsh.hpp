#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nplink/datacube.hpp"
#include "nplink/distance.hpp"

namespace nplink {

struct LshParams {
  std::uint32_t k_bits = 16;
  std::uint32_t tables = 8;
  std::uint32_t b1 = 8;  // histogram buckets per cell
  std::uint32_t b2 = 8;  // bits per bucket
  std::uint64_t seed = 42;

  friend bool operator==(const LshParams&, const LshParams&) = default;
};

/// Probability mass of the posterior on each of b1 equal buckets of [0, 1].
/// Tails outside [0, 1] fold into the end buckets; a point mass fills its
/// bucket entirely.
std::vector<double> histogram_masses(const CellPosterior& post, std::uint32_t b1);

/// Number of leading 1-bits in each bucket: floor(mass * b2).
std::vector<std::uint8_t> bucket_fill(std::span<const double> masses, std::uint32_t b2);

/// b1 * b2 bits of one cell, bucket-major.
struct CellCode {
  std::vector<std::uint8_t> bits;
};

CellCode encode_cell(const CellPosterior& post, std::uint32_t b1, std::uint32_t b2);

/// Bit-sampling LSH over histogram-encoded datacubes.
///
/// The bit layout is cell_vocab.size() * b1 * b2 long. Cells of a cube that
/// are absent from the vocabulary, and vocabulary cells absent from a cube,
/// read as zero bits. Keys are computed from the sampled positions only.
class LshIndex {
 public:
  using Cubes = std::shared_ptr<const std::vector<Datacube>>;

  struct Match {
    std::size_t entry;  // position in the indexed cube list
    double distance;
  };
  struct QueryResult {
    std::vector<Match> matches;  // ascending distance, ties by entry
    std::size_t candidates = 0;
    bool fallback = false;
  };

  static LshIndex build(Cubes cubes, const LshParams& params, double lambda);

  const LshParams& params() const { return params_; }
  double lambda() const { return lambda_; }
  const std::vector<std::uint32_t>& cell_vocab() const { return vocab_; }
  const std::vector<std::vector<std::uint64_t>>& hash_specs() const { return specs_; }
  const std::vector<Datacube>& cubes() const { return *cubes_; }
  std::size_t size() const { return cubes_->size(); }
  std::uint64_t num_bits() const;

  /// Hash key of an arbitrary cube in table `table`.
  std::vector<std::uint64_t> key(const Datacube& cube, std::size_t table) const;
  /// Full bit vector of a cube (tests and debugging only).
  std::vector<std::uint8_t> materialize(const Datacube& cube) const;
  /// Hamming distance between the full codes of two cubes, computed sparsely.
  std::uint64_t hamming(const Datacube& a, const Datacube& b) const;

  /// Candidates sharing any key with q, capped at max(tables, top_k) in
  /// first-found order, re-ranked by exact datacube distance.
  QueryResult query(const Datacube& q, std::size_t top_k) const;

  /// Binary persistence. load() checks magic, version and that the stored
  /// parameters and entry keys match the given cubes.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static LshIndex load(std::istream& in, Cubes cubes, double lambda,
                       const LshParams* expected = nullptr);
  static LshIndex load_file(const std::string& path, Cubes cubes, double lambda,
                            const LshParams* expected = nullptr);

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const;
  };
  using Table = std::unordered_map<std::vector<std::uint64_t>, std::vector<std::uint32_t>, KeyHash>;

  // Per-cube sparse code: sorted vocabulary indices and their bucket fills.
  struct SparseCode {
    std::vector<std::uint32_t> cells;
    std::vector<std::uint8_t> fills;  // cells.size() * b1
  };

  SparseCode sparse_code(const Datacube& cube) const;
  std::vector<std::uint64_t> key(const SparseCode& code, std::size_t table) const;

  LshParams params_;
  double lambda_ = 0.5;
  Cubes cubes_;
  std::vector<std::uint32_t> vocab_;
  std::vector<std::vector<std::uint64_t>> specs_;
  std::vector<Table> tables_;
};

}  // namespace nplink
