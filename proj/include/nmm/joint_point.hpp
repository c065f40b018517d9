#pragma once

#include "nmm/numerics.hpp"

namespace nmm {

/// A point z = [x; y] in R^{m+n} that remembers where the x-block ends.
class JointPoint {
 public:
  JointPoint(Eigen::Index m, Eigen::Index n) : JointPoint(m, n, Vec::Zero(m + n)) {}

  JointPoint(Eigen::Index m, Eigen::Index n, Vec coords) : m_(m), n_(n), coords_(std::move(coords)) {
    require(m >= 1 && n >= 1, "JointPoint: block dimensions must be >= 1");
    require(coords_.size() == m + n, "JointPoint: coords length must equal m + n");
  }

  static JointPoint from_blocks(const Vec& x, const Vec& y) {
    Vec c(x.size() + y.size());
    c << x, y;
    return JointPoint(x.size(), y.size(), std::move(c));
  }

  Eigen::Index m() const { return m_; }
  Eigen::Index n() const { return n_; }
  Eigen::Index dim() const { return m_ + n_; }

  const Vec& coords() const { return coords_; }
  Vec& coords() { return coords_; }

  auto x() const { return coords_.head(m_); }
  auto y() const { return coords_.tail(n_); }
  auto x() { return coords_.head(m_); }
  auto y() { return coords_.tail(n_); }

  bool same_shape(const JointPoint& o) const { return m_ == o.m_ && n_ == o.n_; }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  Vec coords_;
};

}  // namespace nmm
