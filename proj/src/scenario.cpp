#include "hybridqc/scenario.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "hybridqc/ensemble.hpp"
#include "hybridqc/sudarshan.hpp"
#include "hybridqc/svg.hpp"
#include "hybridqc/table.hpp"
#include "hybridqc/verify.hpp"
#include "hybridqc/wigner.hpp"

namespace hqc::scenario {

namespace fs = std::filesystem;

namespace {

enum class Kind { number, integer, flag, text };

struct Param {
  const char* key;
  Kind kind;
  // nullptr: required; "": derived from other parameters when absent.
  const char* fallback;
};

struct ScenarioDef {
  const char* name;
  std::vector<Param> params;
};

const std::vector<ScenarioDef>& definitions() {
  static const std::vector<ScenarioDef> defs = {
      {"wigner",
       {{"Omega", Kind::number, nullptr},
        {"omega", Kind::number, nullptr},
        {"gamma", Kind::number, nullptr},
        {"hbar", Kind::number, "1"},
        {"t_max", Kind::number, "40"},
        {"dt", Kind::number, "0.01"},
        {"q0", Kind::number, "0"},
        {"p0", Kind::number, "0"},
        {"x0", Kind::number, "0"},
        {"k0", Kind::number, "0"},
        {"sigma_x", Kind::number, ""},
        {"sigma_k", Kind::number, ""},
        {"mc_samples", Kind::integer, "0"},
        {"mc_workers", Kind::integer, "1"}}},
      {"sudarshan-benchmark",
       {{"Omega", Kind::number, nullptr},
        {"omega", Kind::number, nullptr},
        {"gamma", Kind::number, nullptr},
        {"alpha", Kind::number, ""},
        {"beta", Kind::number, ""},
        {"hbar", Kind::number, "1"},
        {"scan", Kind::flag, "false"},
        {"scan_points", Kind::integer, "41"}}},
      {"sudarshan-evolve",
       {{"Omega", Kind::number, nullptr},
        {"omega", Kind::number, nullptr},
        {"gamma", Kind::number, nullptr},
        {"alpha", Kind::number, ""},
        {"beta", Kind::number, ""},
        {"hbar", Kind::number, "1"},
        {"t_max", Kind::number, "10"},
        {"dt", Kind::number, "0.01"},
        {"q0", Kind::number, "1"},
        {"p0", Kind::number, "0"},
        {"x0", Kind::number, "0"},
        {"k0", Kind::number, "0"},
        {"sigma_x", Kind::number, ""},
        {"sigma_k", Kind::number, ""},
        {"l_variance", Kind::number, ""}}},
      {"ensemble-divergence",
       {{"gamma", Kind::number, nullptr},
        {"Omega", Kind::number, "1"},
        {"coupling", Kind::text, "sigma_x"},
        {"q0", Kind::number, "1"},
        {"p0", Kind::number, "0"},
        {"t_max", Kind::number, "10"},
        {"t_step", Kind::number, "0.1"},
        {"dt", Kind::number, "0.001"}}},
      {"verify", {}},
  };
  return defs;
}

const ScenarioDef& definition(const std::string& name) {
  for (const auto& d : definitions())
    if (name == d.name) return d;
  std::string known;
  for (const auto& d : definitions()) known += std::string(known.empty() ? "" : ", ") + d.name;
  if (name.empty()) throw Error(ErrorCode::config, "no scenario given (expected one of " + known + ")");
  throw Error(ErrorCode::config, "unknown scenario '" + name + "' (expected one of " + known + ")");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
    throw Error(ErrorCode::config, "parameter '" + key + "': '" + text + "' is not a finite number");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    throw Error(ErrorCode::config, "parameter '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

bool parse_flag(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(ErrorCode::config, "'" + key + "': expected true or false, got '" + text + "'");
}

// Parameters after validation, with derived defaults filled in. Numbers are
// re-rendered with 17 significant digits so the manifest reproduces the run.
struct Resolved {
  std::string scenario;
  std::map<std::string, std::string> text;
  std::map<std::string, double> num;

  double operator[](const std::string& k) const { return num.at(k); }
  bool has(const std::string& k) const { return num.count(k) != 0; }
  void put(const std::string& k, double v) {
    num[k] = v;
    text[k] = format_double(v);
  }
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::config, what);
}

Resolved resolve(const ScenarioConfig& cfg) {
  const ScenarioDef& def = definition(cfg.scenario);
  for (const auto& [k, v] : cfg.params) {
    const bool known = std::any_of(def.params.begin(), def.params.end(), [&](const Param& p) { return k == p.key; });
    require(known, "unknown key '" + k + "' for scenario " + cfg.scenario);
  }
  require(!cfg.out.empty(), "no output directory given (set out=<dir> or --out)");

  Resolved r;
  r.scenario = def.name;
  for (const Param& p : def.params) {
    const auto it = cfg.params.find(p.key);
    std::string value;
    if (it != cfg.params.end()) {
      value = it->second;
    } else if (p.fallback == nullptr) {
      throw Error(ErrorCode::config, "missing required key '" + std::string(p.key) + "' for scenario " + cfg.scenario);
    } else if (*p.fallback == '\0') {
      continue;
    } else {
      value = p.fallback;
    }
    switch (p.kind) {
      case Kind::number: r.put(p.key, parse_number(p.key, value)); break;
      case Kind::integer: {
        const long long v = parse_integer(p.key, value);
        r.num[p.key] = static_cast<double>(v);
        r.text[p.key] = std::to_string(v);
        break;
      }
      case Kind::flag: {
        const bool v = parse_flag(p.key, value);
        r.num[p.key] = v ? 1.0 : 0.0;
        r.text[p.key] = v ? "true" : "false";
        break;
      }
      case Kind::text: r.text[p.key] = value; break;
    }
  }

  auto positive = [&](const char* k) {
    if (r.has(k)) require(r[k] > 0.0, std::string("'") + k + "' must be positive");
  };
  for (const char* k : {"hbar", "dt", "t_step", "sigma_x", "sigma_k", "omega"}) positive(k);
  for (const char* k : {"t_max", "l_variance"})
    if (r.has(k)) require(r[k] >= 0.0, std::string("'") + k + "' must be non-negative");

  const std::string& s = r.scenario;
  if (s == "wigner" || s == "sudarshan-evolve") {
    if (!r.has("sigma_x")) r.put("sigma_x", std::sqrt(r["hbar"] / (2.0 * r["omega"])));
    if (!r.has("sigma_k")) r.put("sigma_k", std::sqrt(r["hbar"] * r["omega"] / 2.0));
    require(r["t_max"] / r["dt"] <= 1e7, "t_max / dt exceeds 1e7 samples");
  }
  if (s == "wigner") {
    require(r["mc_samples"] == 0.0 || r["mc_samples"] >= 2.0, "'mc_samples' must be 0 or at least 2");
    require(r["mc_samples"] <= 1e8, "'mc_samples' is limited to 1e8");
    require(r["mc_workers"] >= 1.0 && r["mc_workers"] <= 256.0, "'mc_workers' must be in [1, 256]");
  }
  if (s == "sudarshan-benchmark" || s == "sudarshan-evolve") {
    if (!r.has("alpha")) r.put("alpha", 0.5 * r["gamma"]);
    if (!r.has("beta")) r.put("beta", r["gamma"]);
  }
  if (s == "sudarshan-benchmark") {
    require(r["scan_points"] >= 2.0 && r["scan_points"] <= 1001.0, "'scan_points' must be in [2, 1001]");
  }
  if (s == "sudarshan-evolve" && !r.has("l_variance")) r.put("l_variance", 0.5 * r["hbar"]);
  if (s == "ensemble-divergence") {
    try {
      ensemble::coupling_from_name(r.text.at("coupling"));
    } catch (const Error& e) {
      throw Error(ErrorCode::config, e.what());
    }
    require(r["t_max"] / r["t_step"] <= 1e6, "t_max / t_step exceeds 1e6 grid points");
  }
  require(!(cfg.figure && (s == "sudarshan-benchmark" || s == "verify")),
          "figure output is not available for scenario " + s);
  return r;
}

using Results = std::vector<std::pair<std::string, std::string>>;

void check_finite(const Table& t) {
  for (std::size_t j = 0; j < t.columns.size(); ++j)
    for (double v : t.columns[j])
      if (!std::isfinite(v)) throw Error(ErrorCode::numerical, "non-finite value in column '" + t.names[j] + "'");
}

std::size_t grid_count(double t_max, double step) { return static_cast<std::size_t>(std::llround(t_max / step)); }

void run_wigner(const Resolved& r, std::uint64_t seed, Table& table, Results& res, std::optional<Chart>& chart) {
  wigner::OscPairConfig c;
  c.Omega = r["Omega"];
  c.omega = r["omega"];
  c.gamma = r["gamma"];
  c.hbar = r["hbar"];
  c.q0 = r["q0"];
  c.p0 = r["p0"];
  c.x0 = r["x0"];
  c.k0 = r["k0"];
  c.sigma_x = r["sigma_x"];
  c.sigma_k = r["sigma_k"];
  const wigner::DispersionSeries s = wigner::dispersion_series(c, r["t_max"], r["dt"]);
  table.add("t", s.times);
  table.add("dq", s.dq);
  table.add("dp", s.dp);
  table.add("dx", s.dx);
  table.add("dk", s.dk);
  table.add("dqdp", s.dqdp);
  table.add("dxdk", s.dxdk);
  table.add("total", s.total);
  res.emplace_back("result.stable", wigner::normal_modes(c).stable ? "true" : "false");
  res.emplace_back("result.initial_total", format_double(s.total.front()));
  res.emplace_back("result.min_total", format_double(wigner::total_uncertainty_min(s)));
  res.emplace_back("result.min_dxdk", format_double(*std::min_element(s.dxdk.begin(), s.dxdk.end())));
  res.emplace_back("result.max_dqdp", format_double(*std::max_element(s.dqdp.begin(), s.dqdp.end())));

  const auto n = static_cast<std::size_t>(r["mc_samples"]);
  if (n > 0) {
    const double t = r["t_max"];
    const auto mc = wigner::monte_carlo_covariance(c, t, n, seed, static_cast<unsigned>(r["mc_workers"]));
    const Matrix u = FlowExponential(wigner::pair_flow(c)).at(t);
    const Matrix exact = u * wigner::initial_state(c).cov * u.transpose();
    const Matrix se = wigner::covariance_standard_errors(exact, n);
    double max_z = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j)
        if (se(i, j) > 0.0) max_z = std::max(max_z, std::abs(mc.moments.cov(i, j) - exact(i, j)) / se(i, j));
    res.emplace_back("result.mc_time", format_double(t));
    res.emplace_back("result.mc_max_abs_error", format_double(max_abs(mc.moments.cov - exact)));
    res.emplace_back("result.mc_max_z", format_double(max_z));
  }
  chart = Chart{"t", "dispersion", s.times, {{"dq dp", s.dqdp, false}, {"dx dk", s.dxdk, true}}};
}

void run_benchmark(const Resolved& r, Table& table, Results& res) {
  auto spec = sudarshan::HybridSpec{r["Omega"], r["omega"], r["gamma"], r["alpha"], r["beta"]};
  const auto report = sudarshan::benchmark_first_moment(spec);
  std::vector<double> alpha, beta, ok, residual;
  if (r["scan"] != 0.0) {
    const auto n = static_cast<int>(r["scan_points"]);
    const double g = std::abs(r["gamma"]) > 0.0 ? std::abs(r["gamma"]) : 1.0;
    std::size_t cells = 0;
    std::string first;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        sudarshan::HybridSpec cell = spec;
        cell.alpha = g * (-2.0 + 4.0 * i / (n - 1));
        cell.beta = g * (-2.0 + 4.0 * j / (n - 1));
        const auto rep = sudarshan::benchmark_first_moment(cell);
        alpha.push_back(cell.alpha);
        beta.push_back(cell.beta);
        ok.push_back(rep.achievable ? 1.0 : 0.0);
        residual.push_back(rep.residual);
        if (rep.achievable && cells++ == 0) first = format_double(cell.alpha) + "," + format_double(cell.beta);
      }
    }
    res.emplace_back("result.scan_achievable_cells", std::to_string(cells));
    if (cells > 0) res.emplace_back("result.scan_first_achievable", first);
  } else {
    alpha.push_back(spec.alpha);
    beta.push_back(spec.beta);
    ok.push_back(report.achievable ? 1.0 : 0.0);
    residual.push_back(report.residual);
  }
  table.add("alpha", alpha);
  table.add("beta", beta);
  table.add("achievable", ok);
  table.add("residual", residual);

  const auto second = sudarshan::benchmark_second_moment(spec, r["hbar"]);
  res.emplace_back("result.stable", spec.stable() ? "true" : "false");
  res.emplace_back("result.achievable", report.achievable ? "true" : "false");
  res.emplace_back("result.residual", format_double(report.residual));
  res.emplace_back("result.reason", report.reason);
  res.emplace_back("result.second_moment_achievable", second.achievable ? "true" : "false");
  res.emplace_back("result.second_moment_reason", second.reason);
  res.emplace_back("result.second_moment_min_eigenvalue", format_double(second.min_eigenvalue));
}

void run_evolve(const Resolved& r, Table& table, Results& res, std::optional<Chart>& chart) {
  const sudarshan::HybridSpec spec{r["Omega"], r["omega"], r["gamma"], r["alpha"], r["beta"]};
  Vector mean(4);
  mean << r["q0"], r["p0"], r["x0"], r["k0"];
  Matrix cov = Matrix::Zero(4, 4);
  cov(2, 2) = r["sigma_x"] * r["sigma_x"];
  cov(3, 3) = r["sigma_k"] * r["sigma_k"];
  const auto c = sudarshan::compare_with_reference(spec, mean, cov, r["l_variance"], r["hbar"], r["t_max"], r["dt"]);

  const char* obs[] = {"q", "p", "x", "k"};
  table.add("t", c.times);
  for (int which = 0; which < 2; ++which) {
    const auto& src = which == 0 ? c.cq_mean : c.qq_mean;
    for (int i = 0; i < 4; ++i) {
      std::vector<double> col;
      for (const auto& m : src) col.push_back(m(i));
      table.add(std::string(which == 0 ? "cq_" : "qq_") + obs[i], col);
    }
  }
  std::vector<double> cq_var_x, qq_var_x;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    cq_var_x.push_back(c.cq_cov[i](2, 2));
    qq_var_x.push_back(c.qq_cov[i](2, 2));
  }
  table.add("cq_var_x", cq_var_x);
  table.add("qq_var_x", qq_var_x);
  table.add("cov_deviation", c.cov_deviation);
  table.add("energy", c.cq_energy);

  double drift = 0.0;
  for (double e : c.cq_energy) drift = std::max(drift, std::abs(e - c.cq_energy.front()));
  res.emplace_back("result.stable", spec.stable() ? "true" : "false");
  res.emplace_back("result.max_mean_deviation", format_double(c.max_mean_deviation()));
  res.emplace_back("result.max_cov_deviation", format_double(c.max_cov_deviation()));
  res.emplace_back("result.energy_drift", format_double(drift));
  chart = Chart{"t", "variance of x", c.times, {{"hybrid", cq_var_x, false}, {"quantized", qq_var_x, true}}};
}

void run_ensemble(const Resolved& r, Table& table, Results& res, std::optional<Chart>& chart) {
  auto spec = ensemble::default_divergence_spec(r["gamma"], ensemble::coupling_from_name(r.text.at("coupling")));
  spec.Omega = r["Omega"];
  const std::size_t n = grid_count(r["t_max"], r["t_step"]);
  std::vector<double> grid;
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) * r["t_step"]);
  const auto d = ensemble::representation_divergence(ensemble::z_basis_mixture(r["q0"], r["p0"]),
                                                     ensemble::y_basis_mixture(r["q0"], r["p0"]), spec, grid, r["dt"]);
  table.add("t", d.times);
  table.add("trace_distance", d.trace_distance);
  table.add("q_mean_1", d.q_mean_1);
  table.add("q_mean_2", d.q_mean_2);
  table.add("q_var_1", d.q_var_1);
  table.add("q_var_2", d.q_var_2);
  const auto it = std::max_element(d.trace_distance.begin(), d.trace_distance.end());
  res.emplace_back("result.max_trace_distance", format_double(*it));
  res.emplace_back("result.t_at_max", format_double(d.times[static_cast<std::size_t>(it - d.trace_distance.begin())]));
  chart = Chart{"t", "trace distance", d.times, {{"trace distance", d.trace_distance, false}}};
}

std::string manifest_text(const ScenarioConfig& cfg, const Resolved& r, const Results& results) {
  std::string m = "# hybridqc run manifest; feed back with --config to repeat the run\n";
  m += "scenario=" + r.scenario + "\n";
  m += "seed=" + std::to_string(cfg.seed) + "\n";
  m += "out=" + cfg.out + "\n";
  m += std::string("figure=") + (cfg.figure ? "true" : "false") + "\n";
  m += std::string("library_version=") + HQC_VERSION + "\n";
  for (const auto& [k, v] : r.text) m += k + "=" + v + "\n";
  for (const auto& [k, v] : results) m += k + "=" + v + "\n";
  return m;
}

}  // namespace

void ScenarioConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw Error(ErrorCode::config, "empty key");
  if (key == "scenario") {
    scenario = value;
  } else if (key == "out") {
    out = value;
  } else if (key == "seed") {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (value.empty() || value[0] == '-' || end != value.c_str() + value.size() || errno == ERANGE) {
      throw Error(ErrorCode::config, "seed: '" + value + "' is not an unsigned 64-bit integer");
    }
    seed = v;
  } else if (key == "figure") {
    figure = parse_flag(key, value);
  } else if (key == "library_version" || key.rfind("result.", 0) == 0) {
    // Informational manifest entries.
  } else {
    params[key] = value;
  }
}

void ScenarioConfig::merge(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::config, origin + ":" + std::to_string(lineno) + ": expected key=value");
    }
    try {
      set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorCode::config, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void ScenarioConfig::merge_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::config, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  merge(ss.str(), path.string());
}

ScenarioConfig ScenarioConfig::parse(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  cfg.merge(text, origin);
  return cfg;
}

ScenarioConfig ScenarioConfig::load_file(const fs::path& path) {
  ScenarioConfig cfg;
  cfg.merge_file(path);
  return cfg;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& d : definitions()) v.emplace_back(d.name);
    return v;
  }();
  return names;
}

std::vector<std::pair<std::string, bool>> scenario_parameters(const std::string& scenario) {
  std::vector<std::pair<std::string, bool>> out;
  for (const Param& p : definition(scenario).params) out.emplace_back(p.key, p.fallback == nullptr);
  return out;
}

RunOutcome run(const ScenarioConfig& cfg) {
  const Resolved r = resolve(cfg);

  Table table;
  Results results;
  std::optional<Chart> chart;
  std::string series_text;
  bool verify_failed = false;
  if (r.scenario == "wigner") {
    run_wigner(r, cfg.seed, table, results, chart);
  } else if (r.scenario == "sudarshan-benchmark") {
    run_benchmark(r, table, results);
  } else if (r.scenario == "sudarshan-evolve") {
    run_evolve(r, table, results, chart);
  } else if (r.scenario == "ensemble-divergence") {
    run_ensemble(r, table, results, chart);
  } else {
    const auto criteria = verify::run_all(cfg.seed);
    series_text = verify::to_csv(criteria);
    const auto passed = std::count_if(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
    verify_failed = static_cast<std::size_t>(passed) != criteria.size();
    results.emplace_back("result.passed", std::to_string(passed));
    results.emplace_back("result.failed", std::to_string(criteria.size() - static_cast<std::size_t>(passed)));
    for (const auto& c : criteria) {
      if (!c.passed) results.emplace_back("result.failed_criterion", std::to_string(c.id) + " " + c.name);
    }
  }
  if (series_text.empty()) {
    check_finite(table);
    series_text = to_csv(table);
  }

  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + cfg.out + "': " + ec.message());

  RunOutcome outcome;
  write_text(dir / "series.csv", series_text);
  outcome.files.push_back(dir / "series.csv");
  if (cfg.figure && chart) {
    emit_figures(*chart, dir / "figure.svg");
    outcome.files.push_back(dir / "figure.svg");
  }
  write_text(dir / "manifest.txt", manifest_text(cfg, r, results));
  outcome.files.push_back(dir / "manifest.txt");
  outcome.results = std::move(results);
  if (verify_failed) throw Error(ErrorCode::verification, "verification failed; see " + (dir / "series.csv").string());
  return outcome;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::io:
    case ErrorCode::invalid_argument: return 2;
    case ErrorCode::numerical: return 3;
    case ErrorCode::verification: return 4;
    case ErrorCode::dimension_mismatch: return 1;
  }
  return 1;
}

}  // namespace hqc::scenario
