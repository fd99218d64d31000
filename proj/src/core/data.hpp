#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace dro {

// One observation: dense or sparse features plus an optional real label
// (NaN marks a label-free example, e.g. location problems).
struct Example {
  std::vector<std::uint32_t> idx;  // sparse indices (strictly increasing); empty => dense
  std::vector<double> val;
  double label = std::numeric_limits<double>::quiet_NaN();

  bool sparse() const { return !idx.empty() || val.empty(); }
  bool has_label() const { return label == label; }

  double dot(const std::vector<double>& theta) const;
  // out += a * x
  void axpy(double a, std::vector<double>& out) const;
};

// Immutable sample; the support of the empirical distribution.
struct Dataset {
  std::vector<Example> examples;
  std::int64_t d = 0;
  std::string source;

  std::int64_t n() const { return static_cast<std::int64_t>(examples.size()); }
};

// Sparse classification text ("svmlight"): `<label> <index>:<value> ...`,
// 1-based strictly increasing indices, `#` starts a comment.
Dataset parse_sparse(std::string_view text, std::int64_t d_override = 0);
std::string serialize_sparse(const Dataset& data);

// Dense CSV with a header row. If the first header cell is "label" or "y"
// that column holds labels; otherwise every column is a feature.
Dataset parse_csv(std::string_view text);
std::string serialize_csv(const Dataset& data);

Dataset load_dataset(const std::string& path, const std::string& format,
                     bool add_bias);

// Appends a constant-1 feature to every example.
Dataset with_bias(const Dataset& data);

// i.i.d. scalar draws from {-1, 0, +1} with P(0) = delta and the rest split
// evenly.
Dataset gen_median_data(std::int64_t n, double delta, std::uint64_t seed);

// Feature vectors uniform on the two-point cube {-B, +B}^d.
Dataset gen_uniform_cube(std::int64_t n, std::int64_t d, double B,
                         std::uint64_t seed);

// Disjoint, exhaustive, seed-deterministic index partitions.
std::vector<std::vector<std::int64_t>> split_fractions(
    std::int64_t n, const std::vector<double>& fractions, std::uint64_t seed);
std::vector<std::vector<std::int64_t>> split_kfold(std::int64_t n,
                                                   std::int64_t k,
                                                   std::uint64_t seed);

Dataset subset(const Dataset& data, const std::vector<std::int64_t>& rows);

}  // namespace dro
