#include "hybridqc/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "hybridqc/ensemble.hpp"
#include "hybridqc/scenario.hpp"
#include "hybridqc/sudarshan.hpp"
#include "hybridqc/table.hpp"
#include "hybridqc/wigner.hpp"

namespace hqc::verify {

namespace fs = std::filesystem;
using namespace sudarshan;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

CriterionResult make(int id, const char* name, bool passed, double value, double threshold, std::string detail = {}) {
  return CriterionResult{id, name, passed, value, threshold, std::move(detail)};
}

// Flow matrix written out from the Hamilton equations of the hybrid with
// (alpha, beta) = (gamma/2, gamma), rows and columns (q, p, q_p, p_q, x, k).
Matrix hand_flow(double Omega, double omega, double gamma) {
  const double W = Omega * Omega, w = omega * omega;
  Matrix a = Matrix::Zero(6, 6);
  a(var::q, var::p) = 1.0;
  a(var::p, var::q) = -W;
  a(var::p, var::x) = -gamma;
  a(var::q_p, var::p_q) = 1.0;
  a(var::p_q, var::q_p) = -W;
  a(var::p_q, var::x) = -gamma / 2.0;
  a(var::x, var::k) = 1.0;
  a(var::k, var::x) = -w;
  a(var::k, var::q) = -gamma / 2.0;
  a(var::k, var::q_p) = -gamma;
  return a;
}

Matrix analytic_cov(const wigner::OscPairConfig& c, double t) {
  const Matrix u = FlowExponential(wigner::pair_flow(c)).at(t);
  return u * wigner::initial_state(c).cov * u.transpose();
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const fs::path p = fs::temp_directory_path() /
                     ("hybridqc-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + tag);
  fs::remove_all(p);
  return p;
}

}  // namespace

CriterionResult equation_reproduction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.1, 5.0), coupling(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double Omega = freq(rng), omega = freq(rng), gamma = coupling(rng);
    const Matrix a = build_hybrid(HybridSpec::canonical(Omega, omega, gamma)).flow();
    worst = std::max(worst, max_abs(a - hand_flow(Omega, omega, gamma)));
  }
  return make(1, "equation_reproduction", worst <= 1e-14, worst, 1e-14, "max entry error over 10 random triples");
}

CriterionResult first_moment_benchmark(std::uint64_t seed) {
  const HybridSpec spec = HybridSpec::canonical(3.0, 2.0, 1.0);
  const FlowExponential cq(build_hybrid(spec).flow());
  const FlowExponential qq(build_qq_reference(spec).flow());
  std::vector<Matrix> ucq, uqq;
  for (int i = 0; i <= 100; ++i) {
    ucq.push_back(cq.at(0.1 * i));
    uqq.push_back(qq.at(0.1 * i));
  }
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    Vector obs(4);
    for (int j = 0; j < 4; ++j) obs(j) = u(rng);
    const Vector m0 = constrained_mean(obs);
    for (std::size_t i = 0; i < ucq.size(); ++i) {
      const Vector c = ucq[i] * m0;
      const Vector r = uqq[i] * obs;
      Vector c_obs(4);
      c_obs << c(var::q), c(var::p), c(var::x), c(var::k);
      worst = std::max(worst, (c_obs - r).cwiseAbs().maxCoeff());
    }
  }
  return make(2, "first_moment_benchmark", worst <= 1e-9, worst, 1e-9,
              "100 constrained means, t = 0..10 step 0.1");
}

CriterionResult constraint_closure() {
  const HybridSpec spec = HybridSpec::canonical(3.0, 2.0, 1.0);
  const Matrix a = build_hybrid(spec).flow();
  const bool first = check_constraint_closure(first_moment_constraints(), a);
  const bool second = check_constraint_closure(second_moment_constraints(), to_bar_variables().flow(a));
  const double closed = (first ? 1.0 : 0.0) + (second ? 1.0 : 0.0);
  return make(3, "constraint_closure", first && second, closed, 2.0,
              std::string("first-order ") + (first ? "closed" : "open") + ", second-order " +
                  (second ? "closed" : "open"));
}

CriterionResult interaction_uniqueness() {
  const double gamma = 1.0;
  const int n = 41;
  int cells = 0;
  bool at_canonical = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      HybridSpec s = HybridSpec::canonical(3.0, 2.0, gamma);
      s.alpha = gamma * (-2.0 + 4.0 * i / (n - 1));
      s.beta = gamma * (-2.0 + 4.0 * j / (n - 1));
      if (benchmark_first_moment(s).achievable) {
        ++cells;
        at_canonical = at_canonical || (i == 25 && j == 30);
      }
    }
  }
  return make(4, "interaction_uniqueness", cells == 1 && at_canonical, cells, 1.0,
              std::string("achievable cells on 41x41 grid; canonical cell ") + (at_canonical ? "achievable" : "not achievable"));
}

CriterionResult second_moment_infeasibility() {
  double worst = 0.0;
  bool all_infeasible = true;
  std::string detail;
  for (double hbar : {1.0, 0.1}) {
    const BenchmarkReport r = benchmark_second_moment(HybridSpec::canonical(3.0, 2.0, 1.0), hbar);
    all_infeasible = all_infeasible && !r.achievable && r.reason == "robertson_violation";
    worst = std::max(worst, std::abs(r.min_eigenvalue + hbar / 2.0));
    detail += "hbar=" + fmt("%g", hbar) + " min eig " + fmt("%.15g", r.min_eigenvalue) + "; ";
  }
  return make(5, "second_moment_infeasibility", all_infeasible && worst <= 1e-12, worst, 1e-12, detail);
}

CriterionResult second_moment_novelty() {
  const double hbar = 1.0, omega = 2.0;
  Matrix cov = Matrix::Zero(4, 4);
  cov(2, 2) = hbar / (2.0 * omega);
  cov(3, 3) = hbar * omega / 2.0;
  const Comparison c =
      compare_with_reference(HybridSpec::canonical(3.0, omega, 1.0), Vector::Zero(4), cov, hbar / 2.0, hbar, 10.0, 0.01);
  const double v = c.max_cov_deviation();
  const double rel = std::abs(v / kNoveltyDeviation - 1.0);
  return make(6, "second_moment_novelty", v > 0.0 && rel <= 0.10, v, kNoveltyDeviation,
              "relative gap to pinned value " + fmt("%.3g", rel) + " (allowed 0.10)");
}

CriterionResult energy_conservation() {
  const HybridSpec spec = HybridSpec::canonical(3.0, 2.0, 1.0);
  const System sys = build_hybrid(spec);
  const Matrix a = sys.flow();
  Vector obs(4);
  obs << 1.0, 0.5, 0.3, -0.2;
  Matrix oc = Matrix::Zero(4, 4);
  oc(2, 2) = 0.25;
  oc(3, 3) = 1.0;
  const MomentState s0{constrained_mean(obs), hybrid_covariance(oc, 0.5)};
  const double e0 = expectation_quadratic(s0, sys.ham);

  const FlowExponential flow(a);
  double analytic = 0.0, numeric = 0.0;
  MomentState s = s0;
  for (int i = 1; i <= 100; ++i) {
    analytic = std::max(analytic, std::abs(expectation_quadratic(evolve_moments(s0, flow.at(0.1 * i)), sys.ham) - e0));
    s = propagate_numeric(a, s, 0.1, 1e-3);
    numeric = std::max(numeric, std::abs(expectation_quadratic(s, sys.ham) - e0));
  }
  return make(7, "energy_conservation", analytic <= 1e-10 && numeric <= 1e-6, analytic, 1e-10,
              "RK4 dt=1e-3 drift " + fmt("%.3g", numeric) + " (allowed 1e-6)");
}

CriterionResult uncertainty_sum_bound() {
  const double hbar = 1.0;
  double worst = 1e300;
  for (const auto& cfg : wigner::figure_configs(hbar)) {
    worst = std::min(worst, wigner::total_uncertainty_min(wigner::dispersion_series(cfg, 40.0, 0.01)));
  }
  return make(8, "uncertainty_sum_bound", worst >= hbar / 2.0 - 1e-9, worst, hbar / 2.0 - 1e-9,
              "min of dq dp + dx dk over six configurations, t <= 40");
}

CriterionResult extreme_transfer() {
  const double hbar = 1.0;
  const auto s = wigner::dispersion_series(wigner::OscPairConfig::coherent(1.0, 1.01, 1.0, hbar), 200.0, 0.01);
  const double min_dxdk = *std::min_element(s.dxdk.begin(), s.dxdk.end());
  const double max_dqdp = *std::max_element(s.dqdp.begin(), s.dqdp.end());
  const bool bounds = min_dxdk <= 0.1 * hbar / 2.0 && max_dqdp >= 0.9 * hbar / 2.0;
  const bool pinned = std::abs(min_dxdk / kExtremeMinDxdk - 1.0) <= 0.05 &&
                      std::abs(max_dqdp / kExtremeMaxDqdp - 1.0) <= 0.05;
  return make(9, "extreme_transfer", bounds && pinned, min_dxdk, 0.1 * hbar / 2.0,
              "max dq dp " + fmt("%.12g", max_dqdp) + "; pinned " + fmt("%.12g", kExtremeMinDxdk) + " / " +
                  fmt("%.12g", kExtremeMaxDqdp) + " at +-5%");
}

CriterionResult monte_carlo_oracle(std::uint64_t seed) {
  const auto figs = wigner::figure_configs(1.0);
  const std::size_t n = 100000;
  double worst_z = 0.0;
  bool shard_independent = true;
  int k = 0;
  for (const auto& cfg : {figs[0], figs[2], figs[5]}) {
    for (double t : {0.5, 3.0, 10.0}) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(k++);
      const auto mc1 = wigner::monte_carlo_covariance(cfg, t, n, s, 1);
      const auto mc4 = wigner::monte_carlo_covariance(cfg, t, n, s, 4);
      shard_independent = shard_independent && mc1.moments.cov == mc4.moments.cov && mc1.moments.mean == mc4.moments.mean;
      const Matrix exact = analytic_cov(cfg, t);
      const Matrix se = wigner::covariance_standard_errors(exact, n);
      for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
          const double diff = std::abs(mc1.moments.cov(i, j) - exact(i, j));
          worst_z = std::max(worst_z, se(i, j) > 0.0 ? diff / se(i, j) : (diff <= 1e-12 ? 0.0 : 1e300));
        }
      }
    }
  }
  return make(10, "monte_carlo_oracle", worst_z <= 5.0 && shard_independent, worst_z, 5.0,
              std::string("max |z| over 3 configs x 3 times, 1e5 samples; 1 vs 4 workers ") +
                  (shard_independent ? "identical" : "DIFFERENT"));
}

CriterionResult statistical_divergence() {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  const auto mix1 = ensemble::z_basis_mixture(1.0, 0.0);
  const auto mix2 = ensemble::y_basis_mixture(1.0, 0.0);
  const auto on = ensemble::representation_divergence(mix1, mix2, ensemble::default_divergence_spec(1.0), grid, 1e-3);
  const auto fine = ensemble::representation_divergence(mix1, mix2, ensemble::default_divergence_spec(1.0), grid, 5e-4);
  const auto off = ensemble::representation_divergence(mix1, mix2, ensemble::default_divergence_spec(0.0), grid, 1e-3);
  const double d0 = on.trace_distance.front();
  const double off_max = off.max_trace_distance();
  const double v = on.max_trace_distance();
  const double halving = std::abs(fine.max_trace_distance() / v - 1.0);
  const bool ok = d0 < 1e-12 && off_max < 1e-9 && v >= 0.9 * kDivergenceMax && halving < 0.01;
  return make(11, "statistical_divergence", ok, v, 0.9 * kDivergenceMax,
              "t=0 distance " + fmt("%.3g", d0) + ", gamma=0 max " + fmt("%.3g", off_max) + ", step-halving change " +
                  fmt("%.3g", halving));
}

CriterionResult quantum_only_consistency(std::uint64_t seed) {
  using cd = std::complex<double>;
  std::mt19937_64 rng(seed ^ 0xc0ffeeULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.1, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix h(2, 2);
    const double a = u(rng), d = u(rng), re = u(rng), im = u(rng);
    h << a, cd(re, im), cd(re, -im), d;
    ensemble::HybridCouplingSpec spec{1.0, h, 0.0, ensemble::pauli(ensemble::Coupling::sigma_x)};

    std::vector<ensemble::Member> members;
    double total = 0.0;
    for (int m = 0; m < 3; ++m) {
      CVector amp(2);
      amp << cd(u(rng), u(rng)), cd(u(rng), u(rng));
      amp.normalize();
      members.push_back({w(rng), ensemble::embed(amp, u(rng), u(rng))});
      total += members.back().weight;
    }
    for (auto& m : members) m.weight /= total;
    const ensemble::WeightedEnsemble e0(members);
    const auto rho0 = ensemble::density_of(e0);

    ensemble::WeightedEnsemble e = e0;
    for (double t : {2.5, 5.0}) {
      e = ensemble::evolve_ensemble(e, spec, 2.5, 1e-3);
      const CMatrix diff = ensemble::density_of(e).rho - ensemble::unitary_evolution(rho0, h, t).rho;
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
  }
  return make(12, "quantum_only_consistency", worst <= 1e-8, worst, 1e-8, "20 random 2-level Hamiltonians, t = 2.5, 5");
}

CriterionResult determinism(std::uint64_t seed) {
  std::vector<scenario::ScenarioConfig> configs(4);
  configs[0].scenario = "wigner";
  configs[0].params = {{"Omega", "3"}, {"omega", "2"}, {"gamma", "1"}, {"t_max", "10"}, {"mc_samples", "2000"}};
  configs[0].figure = true;
  configs[1].scenario = "sudarshan-benchmark";
  configs[1].params = {{"Omega", "3"}, {"omega", "2"}, {"gamma", "1"}, {"scan", "true"}, {"scan_points", "11"}};
  configs[2].scenario = "sudarshan-evolve";
  configs[2].params = {{"Omega", "3"}, {"omega", "2"}, {"gamma", "1"}};
  configs[2].figure = true;
  configs[3].scenario = "ensemble-divergence";
  configs[3].params = {{"gamma", "1"}, {"t_max", "5"}};
  configs[3].figure = true;

  int identical = 0;
  std::string detail;
  for (auto& cfg : configs) {
    cfg.seed = seed;
    std::vector<std::string> bytes[2];
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      dirs.push_back(fresh_dir(cfg.scenario));
      cfg.out = dirs.back().string();
      // The out path itself lands in the manifest, so compare manifests
      // without that line.
      for (const auto& f : scenario::run(cfg).files) {
        std::string text = read_file(f);
        if (f.filename() == "manifest.txt") {
          const auto b = text.find("\nout=");
          text.erase(b + 1, text.find('\n', b + 1) - b);
        }
        bytes[run].push_back(std::move(text));
      }
    }
    for (const auto& d : dirs) fs::remove_all(d);
    if (bytes[0] == bytes[1] && !bytes[0].empty()) {
      ++identical;
    } else {
      detail += cfg.scenario + " differs; ";
    }
  }
  return make(13, "determinism", identical == static_cast<int>(configs.size()), identical,
              static_cast<double>(configs.size()), detail.empty() ? "scenarios with byte-identical reruns" : detail);
}

std::vector<CriterionResult> run_all(std::uint64_t seed) {
  return {equation_reproduction(seed),  first_moment_benchmark(seed), constraint_closure(),
          interaction_uniqueness(),     second_moment_infeasibility(), second_moment_novelty(),
          energy_conservation(),        uncertainty_sum_bound(),       extreme_transfer(),
          monte_carlo_oracle(seed),     statistical_divergence(),      quantum_only_consistency(seed),
          determinism(seed)};
}

std::string to_csv(const std::vector<CriterionResult>& results) {
  std::string out = "id,name,passed,value,threshold\n";
  for (const auto& r : results) {
    out += std::to_string(r.id) + "," + r.name + "," + (r.passed ? "true" : "false") + "," + format_double(r.value) +
           "," + format_double(r.threshold) + "\n";
  }
  return out;
}

}  // namespace hqc::verify
