#pragma once

// Acceptance criteria as library checks. Each returns the measured headline
// value next to the threshold it is judged against; `detail` carries the
// secondary numbers. Regression constants were computed once by independent
// scipy oracles (tests/oracles) and are frozen here.

#include <cstdint>
#include <string>
#include <vector>

namespace hqc::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

// Max over t in [0, 10] of the observable covariance gap, (3, 2, 1).
inline constexpr double kNoveltyDeviation = 4.49999384558;
// (1, 1.01, 1) over t in [0, 200], dt = 0.01.
inline constexpr double kExtremeMinDxdk = 4.0855603214e-4;
inline constexpr double kExtremeMaxDqdp = 2.03085105427;
// Max trace distance, default divergence scenario, t = 0..10 step 0.1.
inline constexpr double kDivergenceMax = 0.586467720018;

CriterionResult equation_reproduction(std::uint64_t seed);
CriterionResult first_moment_benchmark(std::uint64_t seed);
CriterionResult constraint_closure();
CriterionResult interaction_uniqueness();
CriterionResult second_moment_infeasibility();
CriterionResult second_moment_novelty();
CriterionResult energy_conservation();
CriterionResult uncertainty_sum_bound();
CriterionResult extreme_transfer();
CriterionResult monte_carlo_oracle(std::uint64_t seed);
CriterionResult statistical_divergence();
CriterionResult quantum_only_consistency(std::uint64_t seed);
/// Runs every non-verify scenario twice into fresh temporary directories and
/// compares all output files byte for byte.
CriterionResult determinism(std::uint64_t seed);

std::vector<CriterionResult> run_all(std::uint64_t seed);

/// Columns id,name,passed,value,threshold.
std::string to_csv(const std::vector<CriterionResult>& results);

}  // namespace hqc::verify
