// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criteria with a runtime budget also fail when over budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>

#include "hybridqc/verify.hpp"

namespace {

constexpr std::uint64_t kSeed = 20240607;

// Seconds; criteria without an entry have no budget of their own.
const std::map<int, double> kBudget = {{2, 1.0}, {4, 5.0}, {8, 5.0}, {10, 30.0}};

}  // namespace

int main() {
  using namespace hqc::verify;
  const std::vector<std::function<CriterionResult()>> checks = {
      [] { return equation_reproduction(kSeed); },
      [] { return first_moment_benchmark(kSeed); },
      [] { return constraint_closure(); },
      [] { return interaction_uniqueness(); },
      [] { return second_moment_infeasibility(); },
      [] { return second_moment_novelty(); },
      [] { return energy_conservation(); },
      [] { return uncertainty_sum_bound(); },
      [] { return extreme_transfer(); },
      [] { return monte_carlo_oracle(kSeed); },
      [] { return statistical_divergence(); },
      [] { return quantum_only_consistency(kSeed); },
      [] { return determinism(kSeed); },
  };

  int failed = 0;
  double total = 0.0;
  for (const auto& check : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = check();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    total += secs;
    bool ok = r.passed;
    std::string budget;
    if (const auto it = kBudget.find(r.id); it != kBudget.end()) {
      ok = ok && secs < it->second;
      char buf[48];
      std::snprintf(buf, sizeof buf, " (budget %.0fs)", it->second);
      budget = buf;
    }
    failed += ok ? 0 : 1;
    std::printf("%s  %2d %-28s value=%-22.15g threshold=%-14.10g %.2fs%s  %s\n", ok ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.value, r.threshold, secs, budget.c_str(), r.detail.c_str());
  }
  const bool total_ok = total < 180.0;
  std::printf("%s     total runtime %.2fs (budget 180s)\n", total_ok ? "PASS" : "FAIL", total);
  std::printf("%d of %zu criteria failed\n", failed, checks.size());
  return failed == 0 && total_ok ? 0 : 1;
}
