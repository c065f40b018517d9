#include "nmm/problem.hpp"

namespace nmm {

double FiniteSumProblem::sum_value(const Vec& z) const {
  check_point(z);
  const std::size_t count = num_components();
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) total += component_value(i, z);
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

Vec FiniteSumProblem::sum_gradient(const Vec& z) const {
  check_point(z);
  Vec out = Vec::Zero(dim());
  const std::size_t count = num_components();
  if (count == 0) return out;
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) add_component_gradient(i, z, w, out);
  return out;
}

Mat FiniteSumProblem::sum_hessian(const Vec& z) const {
  check_point(z);
  Mat out = Mat::Zero(dim(), dim());
  const std::size_t count = num_components();
  if (count == 0) return out;
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) add_component_hessian(i, z, w, out);
  return out;
}

}  // namespace nmm
