#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nmm {

/// Sparse rows over features 1..num_features with labels in {-1, +1}.
struct LibsvmDataset {
  using Row = std::vector<std::pair<int, double>>;  // (1-based index, value)

  std::string name;
  int num_features = 0;
  std::vector<Row> rows;
  std::vector<int> labels;
  // Filled by scale_features: per-feature minimum and maximum before scaling.
  std::vector<double> feature_min;
  std::vector<double> feature_max;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  double positive_fraction() const;
  /// Keeps the first `count` rows (all rows when count >= size()).
  LibsvmDataset head(std::size_t count) const;
};

class LibsvmParseError : public std::runtime_error {
 public:
  LibsvmParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads "label idx:val idx:val ..." lines. Positive labels map to +1, all
/// others to -1. Indices must be >= 1 and strictly increasing within a line.
/// Blank lines and text after '#' are ignored.
LibsvmDataset parse_libsvm(const std::string& path);
LibsvmDataset parse_libsvm_text(const std::string& text, const std::string& name = "inline");

/// Min-max scales every feature column into [0, 1]; absent entries count as 0
/// and constant columns map to 0.
LibsvmDataset scale_features(const LibsvmDataset& ds);

void write_libsvm(const LibsvmDataset& ds, const std::string& path);
/// JSON metadata next to a scaled file: N, n, p_hat, feature mins and maxes.
void write_libsvm_sidecar(const LibsvmDataset& ds, const std::string& path);

/// Deterministic stand-in shaped like a9a: 123 binary features split into 14
/// one-hot groups and roughly 24% positive labels.
LibsvmDataset make_a9a_like(std::size_t rows, std::uint64_t seed);

}  // namespace nmm
