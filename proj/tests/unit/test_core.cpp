#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

#include "nmm/core.hpp"
#include "nmm/problems.hpp"

using namespace nmm;

namespace {

// f(x, y) = x y on scalars.
QuadraticSaddle bilinear_scalar() {
  return QuadraticSaddle(Mat::Zero(1, 1), Mat::Identity(1, 1), Mat::Zero(1, 1), Vec::Zero(1), Vec::Zero(1));
}

// f(x, y) = x^2/2 - y^2/2 on scalars.
QuadraticSaddle toy() {
  return QuadraticSaddle(Mat::Identity(1, 1), Mat::Zero(1, 1), Mat::Identity(1, 1), Vec::Zero(1), Vec::Zero(1));
}

// Hides any closed-form inner solves of the wrapped problem.
class Forwarding : public Problem {
 public:
  explicit Forwarding(const Problem& p) : p_(p) {}
  Eigen::Index dim_x() const override { return p_.dim_x(); }
  Eigen::Index dim_y() const override { return p_.dim_y(); }
  double value(const Vec& z) const override { return p_.value(z); }
  Vec gradient(const Vec& z) const override { return p_.gradient(z); }
  Mat hessian(const Vec& z) const override { return p_.hessian(z); }
  std::string name() const override { return "forwarding"; }

 private:
  const Problem& p_;
};

JointPoint pt(double x, double y) { return JointPoint(1, 1, Vec(Eigen::Vector2d(x, y))); }

}  // namespace

TEST_CASE("JointPoint") {
  const JointPoint z = JointPoint::from_blocks(Vec::LinSpaced(3, 1, 3), Vec::LinSpaced(2, 4, 5));
  CHECK(z.m() == 3);
  CHECK(z.n() == 2);
  Vec cat(5);
  cat << z.x(), z.y();
  CHECK(cat == z.coords());
  CHECK_THROWS_AS(JointPoint(0, 1), ContractError);
  CHECK_THROWS_AS(JointPoint(1, 1, Vec::Zero(3)), ContractError);
}

TEST_CASE("operator_value") {
  SUBCASE("bilinear xy at (2, 3)") {
    const Vec f = operator_value(bilinear_scalar(), pt(2, 3));
    CHECK(f(0) == 3.0);
    CHECK(f(1) == -2.0);
  }
  SUBCASE("quadratic toy at (1, 1)") {
    const Vec f = operator_value(toy(), pt(1, 1));
    CHECK(f(0) == 1.0);
    CHECK(f(1) == 1.0);
  }
  SUBCASE("vanishes at the cubic-bilinear saddle") {
    const CubicBilinear cb = make_cubic_bilinear(20, 0.05, 7);
    CHECK(operator_value(cb, cubic_bilinear_saddle(cb)).norm() <= 1e-10 * (1.0 + cb.b().norm()));
  }
  SUBCASE("same norm as the gradient, exactly") {
    oracle::Random r(11);
    const CubicBilinear cb = make_cubic_bilinear(6, 0.3, 1);
    const QuadraticSaddle q = make_random_cc_quadratic(4, 3, 2);
    for (int t = 0; t < 20; ++t) {
      const Vec z = r.normal_vec(12);
      CHECK(operator_value(cb, z).norm() == cb.gradient(z).norm());
      const Vec w = r.normal_vec(7);
      CHECK(operator_value(q, w).norm() == q.gradient(w).norm());
    }
  }
  SUBCASE("dimension mismatch") { CHECK_THROWS_AS(operator_value(toy(), Vec::Zero(3)), ContractError); }
}

TEST_CASE("operator_jacobian") {
  SUBCASE("bilinear") {
    const Mat j = operator_jacobian(bilinear_scalar(), pt(0.3, -2));
    CHECK(j(0, 0) == 0.0);
    CHECK(j(0, 1) == 1.0);
    CHECK(j(1, 0) == -1.0);
    CHECK(j(1, 1) == 0.0);
  }
  SUBCASE("quadratic toy is the identity") {
    CHECK(operator_jacobian(toy(), pt(5, 7)) == Mat::Identity(2, 2));
  }
  SUBCASE("cubic-bilinear matches finite differences of F") {
    oracle::Random r(12);
    const CubicBilinear cb = make_cubic_bilinear(8, 0.2, 3);
    for (int t = 0; t < 5; ++t) {
      const Vec z = r.normal_vec(16);
      const Mat fd = finite_diff_jacobian([&](const Vec& w) { return operator_value(cb, w); }, z, 1e-5);
      const Mat j = operator_jacobian(cb, z);
      CHECK((fd - j).norm() <= 1e-5 * j.norm());
      // Diagonal blocks are symmetric.
      CHECK((j.topLeftCorner(8, 8) - j.topLeftCorner(8, 8).transpose()).norm() <= 1e-14);
      CHECK((j.bottomRightCorner(8, 8) - j.bottomRightCorner(8, 8).transpose()).norm() <= 1e-14);
    }
  }
}

TEST_CASE("average_iterates and RunningAverage") {
  SUBCASE("single point") {
    const std::vector<JointPoint> p{pt(3, -1)};
    const std::vector<double> w{0.7};
    CHECK((average_iterates(p, w).coords() - p[0].coords()).norm() <= 1e-15 * p[0].coords().norm());
  }
  SUBCASE("midpoint") {
    const std::vector<JointPoint> p{pt(0, 0), pt(2, 2)};
    const std::vector<double> w{1, 1};
    CHECK(average_iterates(p, w).coords() == Vec(Eigen::Vector2d(1, 1)));
  }
  SUBCASE("weighted sum") {
    const std::vector<JointPoint> p{pt(1, 0), pt(0, 1), pt(1, 1)};
    const std::vector<double> w{1, 2, 3};
    const JointPoint a = average_iterates(p, w);
    CHECK(a.coords()(0) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    CHECK(a.coords()(1) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(average_iterates(std::vector<JointPoint>{}, std::vector<double>{}), ContractError);
    CHECK_THROWS_AS(average_iterates(std::vector<JointPoint>{pt(1, 1)}, std::vector<double>{0.0}), ContractError);
    CHECK_THROWS_AS(average_iterates(std::vector<JointPoint>{pt(1, 1)}, std::vector<double>{1.0, 2.0}),
                    ContractError);
  }
  SUBCASE("running average is bitwise identical") {
    oracle::Random r(13);
    std::vector<JointPoint> p;
    std::vector<double> w;
    RunningAverage ra(2, 3);
    for (int i = 0; i < 50; ++i) {
      p.emplace_back(2, 3, r.normal_vec(5));
      w.push_back(r.uniform(0.01, 3.0));
      ra.add(p.back().coords(), w.back());
    }
    CHECK(ra.value().coords() == average_iterates(p, w).coords());
  }
}

TEST_CASE("restricted_gap") {
  SUBCASE("zero at the saddle") {
    const QuadraticSaddle q = make_random_cc_quadratic(3, 2, 5);
    const JointPoint s = q.saddle();
    GapConfig cfg;
    cfg.beta = 1.5;
    const GapResult g = restricted_gap(q, s, s, cfg);
    CHECK(g.value >= -cfg.inner_tol);
    CHECK(std::abs(g.value) <= 1e-8);
  }
  SUBCASE("quadratic toy, candidate (1, 0), beta 2") {
    GapConfig cfg;
    cfg.beta = 2.0;
    CHECK(restricted_gap(toy(), pt(1, 0), pt(0, 0), cfg).value == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("cubic-bilinear with x at x*: max term equals f(x*, y*) = 0") {
    oracle::Random r(14);
    const CubicBilinear cb = make_cubic_bilinear(10, 0.01, 9);
    const JointPoint s = cubic_bilinear_saddle(cb);
    const Vec xs = oracle::bidiagonal_solve(cb.b());
    const double beta = 3.0;
    // y^T (A x* - b) vanishes for every y, so the max over y is rho/6 ||x*||^3.
    const double expected_max = cb.rho() / 6.0 * std::pow(xs.norm(), 3);
    const std::optional<double> closed = cb.max_over_y_ball(xs, s.y(), beta);
    REQUIRE(closed.has_value());
    CHECK(*closed == doctest::Approx(expected_max).epsilon(1e-10));
    // The projected-gradient inner solve (no closed form registered) agrees.
    const Forwarding plain(cb);
    Vec cand(20);
    cand << xs, r.normal_vec(10);
    const GapResult g = restricted_gap(plain, JointPoint(10, 10, cand), s, GapConfig{beta, 2000, 1e-9});
    CHECK(g.max_term == doctest::Approx(expected_max).epsilon(1e-8));
  }
  SUBCASE("nonnegative on random candidates") {
    oracle::Random r(15);
    const QuadraticSaddle q = make_random_cc_quadratic(3, 3, 6);
    const JointPoint s = q.saddle();
    for (int t = 0; t < 10; ++t) {
      const JointPoint c(3, 3, s.coords() + r.normal_vec(6, 0.5));
      GapConfig cfg;
      cfg.beta = 2.0;
      CHECK(restricted_gap(q, c, s, cfg).value >= -cfg.inner_tol);
    }
  }
}

TEST_CASE("weighted_regret") {
  SUBCASE("all points equal to the comparator") {
    const std::vector<JointPoint> p{pt(1, 2), pt(1, 2)};
    CHECK(weighted_regret(toy(), p, std::vector<double>{1, 4}, pt(1, 2)) == 0.0);
  }
  SUBCASE("single point is the definition") {
    const JointPoint z1 = pt(2, -1);
    const JointPoint z = pt(0.5, 0.25);
    const Vec f = operator_value(toy(), z1);
    CHECK(weighted_regret(toy(), std::vector<JointPoint>{z1}, std::vector<double>{1.0}, z) ==
          doctest::Approx((z1.coords() - z.coords()).dot(f)));
  }
  SUBCASE("bounds the duality gap of the average on random quadratics") {
    oracle::Random r(16);
    for (int inst = 0; inst < 5; ++inst) {
      const QuadraticSaddle q = make_random_cc_quadratic(3, 2, 100 + inst);
      std::vector<JointPoint> p;
      std::vector<double> w;
      for (int i = 0; i < 8; ++i) {
        p.emplace_back(3, 2, r.normal_vec(5));
        w.push_back(r.uniform(0.1, 2.0));
      }
      const JointPoint avg = average_iterates(p, w);
      for (int c = 0; c < 10; ++c) {
        const JointPoint z(3, 2, r.normal_vec(5, 2.0));
        Vec xbar_y(5), x_ybar(5);
        xbar_y << avg.x(), z.y();
        x_ybar << z.x(), avg.y();
        const double lhs = q.value(xbar_y) - q.value(x_ybar);
        CHECK(lhs <= weighted_regret(q, p, w, z) + 1e-8);
      }
    }
  }
}

TEST_CASE("monotonicity of F on implemented problems") {
  oracle::Random r(17);
  const CubicBilinear cb = make_cubic_bilinear(5, 0.4, 2);
  const QuadraticSaddle q = make_random_cc_quadratic(3, 4, 8);
  for (int t = 0; t < 200; ++t) {
    const Vec z = r.normal_vec(10, 3.0), w = r.normal_vec(10, 3.0);
    CHECK((z - w).dot(operator_value(cb, z) - operator_value(cb, w)) >= -1e-10 * (z - w).squaredNorm());
    const Vec a = r.normal_vec(7, 3.0), b = r.normal_vec(7, 3.0);
    CHECK((a - b).dot(operator_value(q, a) - operator_value(q, b)) >= -1e-10 * (a - b).squaredNorm());
  }
}

TEST_CASE("DF is rho-Lipschitz on the cubic-bilinear problem") {
  oracle::Random r(18);
  const double rho = 0.3;
  const CubicBilinear cb = make_cubic_bilinear(6, rho, 4);
  for (int t = 0; t < 100; ++t) {
    const Vec z = r.normal_vec(12, 2.0), w = r.normal_vec(12, 2.0);
    const Mat d = operator_jacobian(cb, z) - operator_jacobian(cb, w);
    CHECK(spectral_norm(d, 100) <= rho * (z - w).norm() + 1e-8);
  }
}

TEST_CASE("project_ball") {
  const Vec c = Vec::Ones(3);
  const Vec inside = c + Vec::Constant(3, 0.1);
  CHECK(project_ball(inside, c, 1.0) == inside);
  const Vec far = c + Vec::Constant(3, 10.0);
  const Vec p = project_ball(far, c, 2.0);
  CHECK((p - c).norm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(((p - c).normalized() - (far - c).normalized()).norm() <= 1e-14);
}
