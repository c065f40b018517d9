#include "nmm/libsvm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <numeric>
#include <sstream>

#include "nmm/rng.hpp"

namespace nmm {

double LibsvmDataset::positive_fraction() const {
  if (labels.empty()) return 0.0;
  const auto pos = std::count_if(labels.begin(), labels.end(), [](int l) { return l > 0; });
  return static_cast<double>(pos) / static_cast<double>(labels.size());
}

LibsvmDataset LibsvmDataset::head(std::size_t count) const {
  LibsvmDataset out = *this;
  if (count < rows.size()) {
    out.rows.resize(count);
    out.labels.resize(count);
  }
  return out;
}

namespace {

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

bool parse_int(std::string_view tok, int& out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& msg) {
  throw LibsvmParseError(name + ":" + std::to_string(line) + ": " + msg, line);
}

}  // namespace

LibsvmDataset parse_libsvm_text(const std::string& text, const std::string& name) {
  LibsvmDataset ds;
  ds.name = name;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;

    double label = 0.0;
    if (!parse_double(tok, label)) fail(name, lineno, "malformed label '" + tok + "'");
    LibsvmDataset::Row row;
    int last = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail(name, lineno, "expected idx:val, got '" + tok + "'");
      int idx = 0;
      double val = 0.0;
      if (!parse_int(std::string_view(tok).substr(0, colon), idx) || idx < 1)
        fail(name, lineno, "malformed feature index in '" + tok + "'");
      if (!parse_double(std::string_view(tok).substr(colon + 1), val))
        fail(name, lineno, "malformed feature value in '" + tok + "'");
      if (idx <= last) fail(name, lineno, "feature indices must be strictly increasing");
      last = idx;
      row.emplace_back(idx, val);
    }
    ds.num_features = std::max(ds.num_features, last);
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(label > 0.0 ? 1 : -1);
  }
  return ds;
}

LibsvmDataset parse_libsvm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read dataset file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_libsvm_text(buf.str(), path);
}

LibsvmDataset scale_features(const LibsvmDataset& ds) {
  if (ds.empty()) throw std::invalid_argument("scale_features: dataset has no rows");
  const int n = ds.num_features;
  std::vector<double> lo(n, INFINITY), hi(n, -INFINITY);
  std::vector<std::size_t> present(n, 0);
  for (const auto& row : ds.rows) {
    for (const auto& [idx, val] : row) {
      lo[idx - 1] = std::min(lo[idx - 1], val);
      hi[idx - 1] = std::max(hi[idx - 1], val);
      ++present[idx - 1];
    }
  }
  for (int j = 0; j < n; ++j) {
    if (present[j] < ds.size()) {
      lo[j] = std::min(lo[j], 0.0);
      hi[j] = std::max(hi[j], 0.0);
    }
  }

  LibsvmDataset out;
  out.name = ds.name;
  out.num_features = n;
  out.labels = ds.labels;
  out.feature_min = lo;
  out.feature_max = hi;
  out.rows.reserve(ds.size());
  std::vector<double> dense(n);
  for (const auto& row : ds.rows) {
    std::fill(dense.begin(), dense.end(), 0.0);
    for (const auto& [idx, val] : row) dense[idx - 1] = val;
    LibsvmDataset::Row scaled;
    for (int j = 0; j < n; ++j) {
      const double span = hi[j] - lo[j];
      const double v = span > 0.0 ? (dense[j] - lo[j]) / span : 0.0;
      if (v != 0.0) scaled.emplace_back(j + 1, v);
    }
    out.rows.push_back(std::move(scaled));
  }
  return out;
}

void write_libsvm(const LibsvmDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << (ds.labels[i] > 0 ? "+1" : "-1");
    for (const auto& [idx, val] : ds.rows[i]) {
      std::snprintf(buf, sizeof buf, " %d:%.17g", idx, val);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed while writing dataset file: " + path);
}

void write_libsvm_sidecar(const LibsvmDataset& ds, const std::string& path) {
  nlohmann::json meta;
  meta["name"] = ds.name;
  meta["N"] = ds.size();
  meta["n"] = ds.num_features;
  meta["p_hat"] = ds.positive_fraction();
  meta["feature_min"] = ds.feature_min;
  meta["feature_max"] = ds.feature_max;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sidecar file: " + path);
  out << meta.dump(2) << '\n';
}

LibsvmDataset make_a9a_like(std::size_t rows, std::uint64_t seed) {
  static constexpr int kGroups[] = {5, 8, 5, 16, 5, 7, 14, 6, 5, 2, 3, 3, 3, 41};
  Rng rng(seed);

  // Per-group category popularity and per-feature label weight.
  std::vector<std::vector<double>> cumulative;
  std::vector<double> weight;
  for (int size : kGroups) {
    std::vector<double> p(size);
    for (double& v : p) v = std::pow(rng.uniform(0.05, 1.0), 2.0);
    std::partial_sum(p.begin(), p.end(), p.begin());
    for (double& v : p) v /= p.back();
    cumulative.push_back(std::move(p));
    for (int j = 0; j < size; ++j) weight.push_back(rng.normal());
  }

  LibsvmDataset ds;
  ds.name = "a9a-like";
  ds.num_features = static_cast<int>(weight.size());
  std::vector<double> score(rows);
  ds.rows.assign(rows, {});
  for (std::size_t i = 0; i < rows; ++i) {
    int offset = 0;
    double s = 0.0;
    for (const auto& cum : cumulative) {
      const double u = rng.uniform();
      const int pick =
          static_cast<int>(std::upper_bound(cum.begin(), cum.end() - 1, u) - cum.begin());
      ds.rows[i].emplace_back(offset + pick + 1, 1.0);
      s += weight[offset + pick];
      offset += static_cast<int>(cum.size());
    }
    score[i] = s + 0.5 * rng.normal();
  }
  std::vector<double> sorted = score;
  std::sort(sorted.begin(), sorted.end());
  const double threshold =
      sorted.empty() ? 0.0 : sorted[static_cast<std::size_t>(0.76 * static_cast<double>(rows))];
  ds.labels.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) ds.labels[i] = score[i] >= threshold ? 1 : -1;
  return ds;
}

}  // namespace nmm
