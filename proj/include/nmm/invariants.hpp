#pragma once

#include <string>
#include <vector>

#include "nmm/solvers.hpp"

namespace nmm {

struct InvariantCheck {
  std::string name;
  bool ok = true;
  std::string detail;
};

/// What the convergence theory needs to know about a Newton-type run.
struct TheoryContext {
  double rho = 1.0;
  double dist0 = 0.0;  // ||z_0 - z*||
  bool inexact = false;
  double gap_slack = 1e-8;
};

/// Gap bound C rho ||z_0 - z*||^3 / T^{3/2} with C = 960 sqrt(3) (exact) or
/// 1215 sqrt(5) (inexact).
double gap_bound(const TheoryContext& ctx, int t);
/// T^{3/2} / (30 sqrt(3) rho ||z_0 - z*||)
double lambda_mass_bound(const TheoryContext& ctx, int t);

/// Checks that only need the persisted trace columns: the lambda window, the
/// anchor drift (exact runs), the step energy, the lambda mass (exact runs)
/// and the gap bound on rows that carry a gap.
std::vector<InvariantCheck> check_trace_invariants(const std::vector<IterateTrace>& trace,
                                                   const TheoryContext& ctx);

/// Trace checks plus those that need the iterates: the distance of every
/// leading point to z*, the weighted regret bound at z*, z_0 and the given
/// extra comparators, and that `averaged` is the lambda-weighted mean of the
/// leading points.
std::vector<InvariantCheck> check_result_invariants(const SolverResult& result,
                                                    const Problem& problem, const JointPoint& z0,
                                                    const JointPoint& z_star,
                                                    const TheoryContext& ctx,
                                                    const std::vector<JointPoint>& comparators = {});

bool all_ok(const std::vector<InvariantCheck>& checks);

}  // namespace nmm
