#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ampo {

// One named property suite: randomized trials of an identity, inequality,
// or cross-implementation agreement, with the worst observed slack
// (positive slack = violation beyond tolerance).
struct SuiteReport {
  std::string name;
  long trials = 0;
  long failures = 0;
  long skipped = 0;
  double worst_slack = 0.0;
  double elapsed_ms = 0.0;
  bool passed() const { return trials > 0 && failures == 0; }
};

struct TheoryCheckOptions {
  std::uint64_t seed = 20250822;
  double trial_scale = 1.0;        // multiplies every suite's trial count
  double projection_precision = 1e-10;
  bool break_projection = false;   // falsifiability hook: perturbs projections
};

SuiteReport suite_three_point_identity(const TheoryCheckOptions& opt);
SuiteReport suite_bregman_basics(const TheoryCheckOptions& opt);
SuiteReport suite_generalized_pythagorean(const TheoryCheckOptions& opt);
SuiteReport suite_three_point_descent(const TheoryCheckOptions& opt);
SuiteReport suite_performance_difference(const TheoryCheckOptions& opt);
SuiteReport suite_pgt_finite_difference(const TheoryCheckOptions& opt);
SuiteReport suite_projection_oracles(const TheoryCheckOptions& opt);
SuiteReport suite_projection_fixed_point(const TheoryCheckOptions& opt);
SuiteReport suite_quasi_monotonicity(const TheoryCheckOptions& opt);
SuiteReport suite_npg_equivalence(const TheoryCheckOptions& opt);
SuiteReport suite_pqd_equivalence(const TheoryCheckOptions& opt);
SuiteReport suite_md_grid_consistency(const TheoryCheckOptions& opt);
SuiteReport suite_mc_sampler(const TheoryCheckOptions& opt);
SuiteReport suite_sgd_gradient(const TheoryCheckOptions& opt);
SuiteReport suite_gae_oracle(const TheoryCheckOptions& opt);

// All of the above, in a stable order.
std::vector<SuiteReport> run_theory_suites(const TheoryCheckOptions& opt);

}  // namespace ampo
