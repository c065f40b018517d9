#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

#include "nmm/subproblem.hpp"

using namespace nmm;

namespace {

// m = n = 1, g = (-1, 1), H = 0, rho = 1/6: saddle at (1, -1).
CubicSubproblem scalar_instance() {
  // -1 + dx|dx| = 0 and -1 - dy|dy| = 0 give the saddle (1, -1).
  return CubicSubproblem(Vec(Eigen::Vector2d(-1.0, -1.0)), Mat::Zero(2, 2), 1.0 / 6.0, 1, 1);
}

// Random subproblem whose Hessian has a convex x-block and concave y-block.
CubicSubproblem random_instance(oracle::Random& r, Eigen::Index m, Eigen::Index n, double rho) {
  const Mat bx = r.normal_mat(m, m, 0.5), by = r.normal_mat(n, n, 0.5);
  Mat h = Mat::Zero(m + n, m + n);
  h.topLeftCorner(m, m) = bx * bx.transpose();
  h.bottomRightCorner(n, n) = -by * by.transpose();
  const Mat q = r.normal_mat(m, n, 0.5);
  h.topRightCorner(m, n) = q;
  h.bottomLeftCorner(n, m) = q.transpose();
  return CubicSubproblem(r.normal_vec(m + n), h, rho, m, n);
}

Vec reference_saddle(const CubicSubproblem& sp) {
  const SubproblemSolution s = solve_cubic_subproblem(sp, SsnTarget::exact());
  return oracle::polish_model_saddle(sp.g, sp.h, sp.rho, sp.m, s.dz);
}

double cubed_distance(const Vec& a, const Vec& b, Eigen::Index m) {
  const Vec d = a - b;
  return std::pow(d.head(m).norm(), 3) + std::pow(d.tail(d.size() - m).norm(), 3);
}

}  // namespace

TEST_CASE("model_gradient") {
  oracle::Random r(31);
  SUBCASE("dz = 0 gives g") {
    const CubicSubproblem sp = random_instance(r, 3, 2, 0.4);
    CHECK(model_gradient(sp, Vec::Zero(5)) == sp.g);
  }
  SUBCASE("g = 0, H = 0") {
    const CubicSubproblem sp(Vec::Zero(5), Mat::Zero(5, 5), 0.3, 3, 2);
    const Vec dz = r.normal_vec(5);
    Vec expected(5);
    expected << 6 * 0.3 * dz.head(3).norm() * dz.head(3), -6 * 0.3 * dz.tail(2).norm() * dz.tail(2);
    CHECK((model_gradient(sp, dz) - expected).norm() <= 1e-15);
  }
  SUBCASE("scalar instance root") {
    CHECK(model_gradient(scalar_instance(), Vec(Eigen::Vector2d(1, -1))).norm() == 0.0);
  }
  SUBCASE("matches the written-out oracle and the gradient of the model") {
    const CubicSubproblem sp = random_instance(r, 4, 3, 0.2);
    for (int t = 0; t < 5; ++t) {
      const Vec dz = r.normal_vec(7);
      const Vec mg = model_gradient(sp, dz);
      CHECK((mg - oracle::cubic_model_gradient(sp.g, sp.h, sp.rho, 4, dz)).norm() <= 1e-12 * (1 + mg.norm()));
      const Vec fd = finite_diff_gradient([&](const Vec& v) { return sp.value(v); }, dz, 1e-5);
      CHECK((fd - mg).norm() <= 1e-6 * (1 + mg.norm()));
    }
  }
}

TEST_CASE("cubic_prox") {
  CHECK(cubic_prox(Vec::Zero(3), 1.0, 0.5).norm() == 0.0);
  SUBCASE("golden ratio case") {
    const Vec v = Vec::Unit(3, 1);
    const Vec x = cubic_prox(v, 1.0, 1.0 / 6.0);
    const double lambda = x(1);
    CHECK(lambda == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));
    CHECK(std::abs(lambda * lambda + lambda - 1.0) <= 1e-12);
  }
  SUBCASE("stationarity of the prox objective") {
    oracle::Random r(32);
    for (int t = 0; t < 50; ++t) {
      const Vec v = r.normal_vec(4, 3.0);
      const double ell = r.uniform(0.1, 10.0), rho = r.uniform(0.01, 2.0);
      const Vec x = cubic_prox(v, ell, rho);
      const Vec grad = -ell * v + ell * x + 6.0 * rho * x.norm() * x;
      CHECK(grad.norm() <= 1e-12 * ell * (1.0 + v.norm()));
    }
  }
  SUBCASE("vanishing rho gives the identity") {
    const Vec v = Vec::LinSpaced(3, -1, 2);
    CHECK((cubic_prox(v, 2.0, 1e-14) - v).norm() <= 1e-12);
  }
}

TEST_CASE("cone projection") {
  SUBCASE("inside the cone is unchanged") {
    const Vec w(Eigen::Vector3d(0.3, -0.4, 0.6));
    CHECK(soc_project_cone(w) == w);
  }
  SUBCASE("middle case") {
    const Vec p = soc_project_cone(Vec(Eigen::Vector3d(1, 0, 0)));
    CHECK((p - Vec(Eigen::Vector3d(0.5, 0, 0.5))).norm() <= 1e-15);
    CHECK((p - oracle::cone_nearest_point(Vec(Eigen::Vector3d(1, 0, 0)))).norm() <= 1e-15);
  }
  SUBCASE("polar cone maps to zero") {
    CHECK(soc_project_cone(Vec(Eigen::Vector3d(1, 0, -2))).norm() == 0.0);
  }
  SUBCASE("properties on random points") {
    oracle::Random r(33);
    for (int t = 0; t < 500; ++t) {
      const Vec w = r.normal_vec(4, 2.0), w2 = r.normal_vec(4, 2.0);
      const Vec p = soc_project_cone(w);
      CHECK(p.head(3).norm() <= p(3) + 1e-15);
      CHECK((soc_project_cone(p) - p).norm() <= 1e-14 * (1.0 + p.norm()));
      CHECK((p - soc_project_cone(w2)).norm() <= (w - w2).norm() + 1e-14);
      Vec q = r.normal_vec(4);
      q(3) = q.head(3).norm() + std::abs(r.normal());
      CHECK((w - p).dot(q - p) <= 1e-12 * (1.0 + q.norm() * w.norm()));
      CHECK((p - oracle::cone_nearest_point(w)).norm() <= 1e-12 * (1.0 + w.norm()));
    }
  }
}

TEST_CASE("projection Jacobian") {
  SUBCASE("interior of the cone is the identity") {
    CHECK(soc_projection_jacobian_cone(Vec(Eigen::Vector3d(0.1, 0.1, 1.0))) == Mat::Identity(3, 3));
  }
  SUBCASE("interior of the polar cone is zero") {
    CHECK(soc_projection_jacobian_cone(Vec(Eigen::Vector3d(0.1, 0.1, -1.0))).norm() == 0.0);
  }
  SUBCASE("w_x = (1, 0), w_u = 0") {
    Mat expected(3, 3);
    expected << 1, 0, 1, 0, 1, 0, 1, 0, 1;
    expected *= 0.5;
    const Vec w(Eigen::Vector3d(1, 0, 0));
    CHECK((soc_projection_jacobian_cone(w) - expected).norm() <= 1e-15);
    const Mat fd = finite_diff_jacobian([](const Vec& v) { return soc_project_cone(v); }, w, 1e-6);
    CHECK((fd - expected).norm() <= 1e-8);
  }
  SUBCASE("finite differences off case boundaries") {
    oracle::Random r(34);
    int tested = 0;
    while (tested < 200) {
      const Vec w = r.normal_vec(7, 2.0);
      const double a = w.head(3).norm(), b = w(3), c = w.segment(4, 2).norm(), d = w(6);
      if (std::abs(std::abs(b) - a) < 1e-3 || std::abs(std::abs(d) - c) < 1e-3) continue;
      ++tested;
      const Mat fd = finite_diff_jacobian([](const Vec& v) { return soc_project(v, 3, 2); }, w, 1e-7);
      CHECK((fd - soc_projection_jacobian(w, 3, 2)).norm() <= 1e-5);
    }
  }
}

TEST_CASE("SOCPoint") {
  const Vec dz(Eigen::Vector3d(3, 4, -2));
  const SOCPoint p = SOCPoint::lift(dz, 2);
  CHECK(p.u == 5.0);
  CHECK(p.v == 2.0);
  CHECK(p.feasible());
  CHECK(p.dz() == dz);
  CHECK(SOCPoint::from_vector(p.to_vector(), 2, 1).to_vector() == p.to_vector());
  SOCPoint bad = p;
  bad.u = 4.0;
  CHECK_FALSE(bad.feasible());
}

TEST_CASE("residual_E and its Jacobian") {
  oracle::Random r(35);
  SUBCASE("zero at the lifted solution") {
    for (int t = 0; t < 5; ++t) {
      const CubicSubproblem sp = random_instance(r, 4, 3, 0.3);
      const Vec dz = reference_saddle(sp);
      CHECK(residual_E(sp, SOCPoint::lift(dz, 4).to_vector()).norm() <= 1e-10);
    }
  }
  SUBCASE("g = 0 and p = 0") {
    const CubicSubproblem sp(Vec::Zero(4), Mat::Identity(4, 4), 0.2, 2, 2);
    CHECK(residual_E(sp, Vec::Zero(6)).norm() == 0.0);
  }
  SUBCASE("very negative cone coordinates give E(p) = p") {
    const CubicSubproblem sp(Vec::Zero(4), Mat::Zero(4, 4), 0.0, 2, 2);
    Vec p(6);
    p << 0.1, 0.2, -100.0, 0.1, -0.3, -100.0;
    CHECK((residual_E(sp, p) - p).norm() <= 1e-12);
    CHECK((residual_jacobian(sp, p) - Mat::Identity(6, 6)).norm() <= 1e-12);
  }
  SUBCASE("G' = 0 in the identity region gives a zero Jacobian") {
    const CubicSubproblem sp(Vec::Zero(4), Mat::Zero(4, 4), 0.0, 2, 2);
    Vec p(6);
    p << 0.1, 0.2, 5.0, 0.1, -0.3, 5.0;
    CHECK(residual_jacobian(sp, p).norm() <= 1e-15);
  }
  SUBCASE("finite differences off case boundaries") {
    int tested = 0;
    while (tested < 60) {
      const CubicSubproblem sp = random_instance(r, 3, 2, r.uniform(0.05, 1.0));
      const Vec p = r.normal_vec(7);
      const Vec w = p - lifted_operator(sp, p);
      const double a = w.head(3).norm(), b = w(3), c = w.segment(4, 2).norm(), d = w(6);
      if (std::abs(std::abs(b) - a) < 1e-3 || std::abs(std::abs(d) - c) < 1e-3) continue;
      ++tested;
      const Mat fd = finite_diff_jacobian([&](const Vec& v) { return residual_E(sp, v); }, p, 1e-7);
      const Mat j = residual_jacobian(sp, p);
      CHECK((fd - j).norm() <= 1e-5 * (1.0 + j.norm()));
      const Mat gfd = finite_diff_jacobian([&](const Vec& v) { return lifted_operator(sp, v); }, p, 1e-6);
      CHECK((gfd - lifted_operator_jacobian(sp, p)).norm() <= 1e-5 * (1.0 + gfd.norm()));
    }
  }
}

TEST_CASE("generalized mirror prox") {
  oracle::Random r(36);
  SUBCASE("fixed point at the saddle") {
    const CubicSubproblem sp = random_instance(r, 3, 3, 0.4);
    const Vec s = reference_saddle(sp);
    const GmpStep st = gmp_iterate(sp, s, gmp_smoothness(sp));
    CHECK((st.half - s).norm() <= 1e-10);
    CHECK((st.full - s).norm() <= 1e-10);
    const GmpResult res = gmp_solve(sp, s, 50, 1e-6);
    CHECK(res.iterations == 1);
    CHECK((res.average - s).norm() <= 1e-10);
  }
  SUBCASE("g = 0 stays at zero") {
    const CubicSubproblem sp(Vec::Zero(4), Mat::Identity(4, 4), 0.2, 2, 2);
    const GmpStep st = gmp_iterate(sp, Vec::Zero(4), 1.0);
    CHECK(st.half.norm() == 0.0);
    CHECK(st.full.norm() == 0.0);
  }
  SUBCASE("scalar instance approaches (1, -1) within the cubed-distance bound") {
    const CubicSubproblem sp = scalar_instance();
    const Vec star(Eigen::Vector2d(1, -1));
    const double ell = 1.0;
    const int j = 1000;
    const GmpResult res = gmp_solve(sp, Vec::Zero(2), j, 1e-300, ell);
    CHECK(res.iterations == j);
    CHECK(cubed_distance(res.average, star, 1) <= ell * star.squaredNorm() / (2.0 * sp.rho * j));
    CHECK((res.average - star).norm() <= 0.05);
  }
  SUBCASE("cubed-distance bound on random instances") {
    for (int t = 0; t < 20; ++t) {
      const CubicSubproblem sp = random_instance(r, 3, 2, r.uniform(0.05, 1.0));
      const Vec star = reference_saddle(sp);
      for (int j : {1, 10, 100}) {
        const GmpResult res = gmp_solve(sp, Vec::Zero(5), j, 1e-300);
        CHECK(cubed_distance(res.average, star, 3) <= res.ell * star.squaredNorm() / (2.0 * sp.rho * j));
      }
    }
  }
}

TEST_CASE("semismooth Newton") {
  oracle::Random r(37);
  SUBCASE("start at the solution returns immediately") {
    const CubicSubproblem sp = random_instance(r, 4, 4, 0.3);
    const Vec s = reference_saddle(sp);
    const SubproblemSolution sol = ssn_solve(sp, SOCPoint::lift(s, 4).to_vector(), SsnTarget::exact());
    CHECK(sol.ssn_iters == 0);
    CHECK(sol.status == SubproblemStatus::exact);
  }
  SUBCASE("scalar instance") {
    const CubicSubproblem sp = scalar_instance();
    const SubproblemSolution sol = solve_cubic_subproblem(sp, SsnTarget::exact());
    CHECK(sol.status == SubproblemStatus::exact);
    CHECK((sol.dz - Vec(Eigen::Vector2d(1, -1))).norm() <= 1e-9);
    CHECK(sol.model_grad_norm <= 1e-10 * 2.0);
  }
  SUBCASE("g = 0 returns zero without Newton steps") {
    const CubicSubproblem sp(Vec::Zero(5), Mat::Identity(5, 5), 0.2, 3, 2);
    const SubproblemSolution sol = solve_cubic_subproblem(sp, SsnTarget::exact());
    CHECK(sol.dz.norm() == 0.0);
    CHECK(sol.ssn_iters == 0);
  }
  SUBCASE("Condition 2 holds verbatim in condition2 mode") {
    for (int t = 0; t < 30; ++t) {
      const CubicSubproblem sp = random_instance(r, 6, 4, r.uniform(0.05, 1.0));
      const double kappa = 0.1;
      const SubproblemSolution sol = solve_cubic_subproblem(sp, SsnTarget::condition2(kappa, sp.g.norm()));
      REQUIRE(sol.status == SubproblemStatus::condition2);
      const double lhs = oracle::cubic_model_gradient(sp.g, sp.h, sp.rho, 6, sol.dz).norm();
      CHECK(lhs <= kappa * std::min(sol.dz.squaredNorm(), sp.g.norm()));
    }
  }
  SUBCASE("exact mode tolerance and residual") {
    for (int t = 0; t < 10; ++t) {
      const CubicSubproblem sp = random_instance(r, 5, 5, r.uniform(0.05, 1.0));
      const SubproblemSolution sol = solve_cubic_subproblem(sp, SsnTarget::exact());
      REQUIRE(sol.status == SubproblemStatus::exact);
      CHECK(sol.model_grad_norm <= 1e-10 * (1.0 + sp.g.norm()));
      CHECK(residual_E(sp, SOCPoint::lift(sol.dz, 5).to_vector()).norm() <= 10.0 * 1e-10 * (1.0 + sp.g.norm()));
    }
  }
  SUBCASE("unique saddle from two starts") {
    for (int t = 0; t < 10; ++t) {
      const CubicSubproblem sp = random_instance(r, 4, 3, 0.5);
      const SubproblemSolution a = ssn_solve(sp, Vec::Zero(9), SsnTarget::exact());
      const SubproblemSolution b = ssn_solve(sp, SOCPoint::lift(r.normal_vec(7, 2.0), 4).to_vector(), SsnTarget::exact());
      REQUIRE(a.status == SubproblemStatus::exact);
      REQUIRE(b.status == SubproblemStatus::exact);
      CHECK((a.dz - b.dz).norm() <= 1e-8);
    }
  }
  SUBCASE("budget exhaustion is reported") {
    const CubicSubproblem sp = random_instance(r, 4, 3, 0.5);
    SsnOptions opts;
    opts.budget = 1;
    opts.gmp_max_iters = 1;
    const SubproblemSolution sol = ssn_solve(sp, SOCPoint::lift(r.normal_vec(7, 50.0), 4).to_vector(),
                                             SsnTarget::exact(), opts);
    CHECK(sol.status == SubproblemStatus::budget_exhausted);
  }
  SUBCASE("large system goes through the Krylov path") {
    const CubicSubproblem sp = random_instance(r, 120, 100, 0.05);
    const SubproblemSolution sol = solve_cubic_subproblem(sp, SsnTarget::exact());
    CHECK(sol.status == SubproblemStatus::exact);
    CHECK(oracle::cubic_model_gradient(sp.g, sp.h, sp.rho, 120, sol.dz).norm() <= 1e-10 * (1.0 + sp.g.norm()) * 1.01);
  }
}
