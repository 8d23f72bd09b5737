#include "hybridqc/hybridqc.h"

#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "hybridqc/ensemble.hpp"
#include "hybridqc/scenario.hpp"
#include "hybridqc/sudarshan.hpp"
#include "hybridqc/table.hpp"
#include "hybridqc/wigner.hpp"

struct hqc_config {
  hqc::scenario::ScenarioConfig cfg;
};

struct hqc_series {
  hqc::Table table;
};

namespace {

thread_local std::string g_last_error;

hqc_status status_of(hqc::ErrorCode c) {
  switch (c) {
    case hqc::ErrorCode::invalid_argument: return HQC_ERR_INVALID_ARGUMENT;
    case hqc::ErrorCode::dimension_mismatch: return HQC_ERR_DIMENSION;
    case hqc::ErrorCode::numerical: return HQC_ERR_NUMERICAL;
    case hqc::ErrorCode::config: return HQC_ERR_CONFIG;
    case hqc::ErrorCode::verification: return HQC_ERR_VERIFICATION;
    case hqc::ErrorCode::io: return HQC_ERR_IO;
  }
  return HQC_ERR_INTERNAL;
}

template <class F>
hqc_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return HQC_OK;
  } catch (const hqc::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HQC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HQC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HQC_ERR_INTERNAL;
  }
}

hqc_status fail(hqc_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

hqc::Matrix from_row_major(std::size_t n, const double* data) {
  const auto k = static_cast<Eigen::Index>(n);
  return Eigen::Map<const RowMajor>(data, k, k);
}

void fill_report(const hqc::sudarshan::BenchmarkReport& r, hqc_benchmark* out) {
  out->achievable = r.achievable ? 1 : 0;
  out->residual = r.residual;
  out->min_eigenvalue = r.min_eigenvalue;
}

}  // namespace

extern "C" {

const char* hqc_version(void) { return HQC_VERSION; }

const char* hqc_status_name(hqc_status status) {
  switch (status) {
    case HQC_OK: return "ok";
    case HQC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case HQC_ERR_DIMENSION: return "dimension_mismatch";
    case HQC_ERR_NUMERICAL: return "numerical";
    case HQC_ERR_CONFIG: return "config";
    case HQC_ERR_VERIFICATION: return "verification";
    case HQC_ERR_IO: return "io";
    case HQC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hqc_last_error(void) { return g_last_error.c_str(); }

int hqc_exit_code(hqc_status status) {
  switch (status) {
    case HQC_OK: return 0;
    case HQC_ERR_INVALID_ARGUMENT:
    case HQC_ERR_CONFIG:
    case HQC_ERR_IO: return 2;
    case HQC_ERR_NUMERICAL: return 3;
    case HQC_ERR_VERIFICATION: return 4;
    default: return 1;
  }
}

hqc_status hqc_config_create(hqc_config** out) {
  if (!out) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_config_create: null output pointer");
  return guarded([&] { *out = new hqc_config{}; });
}

void hqc_config_destroy(hqc_config* cfg) { delete cfg; }

hqc_status hqc_config_load_file(hqc_config* cfg, const char* path) {
  if (!cfg || !path) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_config_load_file: null argument");
  return guarded([&] { cfg->cfg.merge_file(path); });
}

hqc_status hqc_config_set(hqc_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_config_set: null argument");
  return guarded([&] { cfg->cfg.set(key, value); });
}

hqc_status hqc_config_run(const hqc_config* cfg) {
  if (!cfg) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_config_run: null config");
  return guarded([&] { hqc::scenario::run(cfg->cfg); });
}

size_t hqc_series_rows(const hqc_series* s) { return s ? s->table.rows() : 0; }

size_t hqc_series_columns(const hqc_series* s) { return s ? s->table.columns.size() : 0; }

const char* hqc_series_column_name(const hqc_series* s, size_t column) {
  if (!s || column >= s->table.names.size()) return nullptr;
  return s->table.names[column].c_str();
}

const double* hqc_series_column(const hqc_series* s, size_t column) {
  if (!s || column >= s->table.columns.size()) return nullptr;
  return s->table.columns[column].data();
}

void hqc_series_destroy(hqc_series* s) { delete s; }

hqc_status hqc_wigner_dispersion(double Omega, double omega, double gamma, double hbar, double t_max, double dt,
                                 hqc_series** out) {
  if (!out) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_wigner_dispersion: null output pointer");
  *out = nullptr;
  return guarded([&] {
    if (!(omega > 0.0) || !(hbar > 0.0)) {
      throw hqc::Error(hqc::ErrorCode::invalid_argument, "hqc_wigner_dispersion: omega and hbar must be positive");
    }
    const auto d = hqc::wigner::dispersion_series(hqc::wigner::OscPairConfig::coherent(Omega, omega, gamma, hbar),
                                                  t_max, dt);
    auto s = std::make_unique<hqc_series>();
    s->table.add("t", d.times);
    s->table.add("dq", d.dq);
    s->table.add("dp", d.dp);
    s->table.add("dx", d.dx);
    s->table.add("dk", d.dk);
    s->table.add("dqdp", d.dqdp);
    s->table.add("dxdk", d.dxdk);
    s->table.add("total", d.total);
    *out = s.release();
  });
}

hqc_status hqc_ensemble_divergence(double gamma, const char* coupling, double q0, double t_max, double t_step,
                                   double dt, hqc_series** out) {
  if (!out || !coupling) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_ensemble_divergence: null argument");
  *out = nullptr;
  return guarded([&] {
    if (!(t_step > 0.0) || !(t_max >= 0.0)) {
      throw hqc::Error(hqc::ErrorCode::invalid_argument, "hqc_ensemble_divergence: need t_step > 0, t_max >= 0");
    }
    const auto spec = hqc::ensemble::default_divergence_spec(gamma, hqc::ensemble::coupling_from_name(coupling));
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::llround(t_max / t_step));
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) * t_step);
    const auto d = hqc::ensemble::representation_divergence(hqc::ensemble::z_basis_mixture(q0, 0.0),
                                                            hqc::ensemble::y_basis_mixture(q0, 0.0), spec, grid, dt);
    auto s = std::make_unique<hqc_series>();
    s->table.add("t", d.times);
    s->table.add("trace_distance", d.trace_distance);
    s->table.add("q_mean_1", d.q_mean_1);
    s->table.add("q_mean_2", d.q_mean_2);
    s->table.add("q_var_1", d.q_var_1);
    s->table.add("q_var_2", d.q_var_2);
    *out = s.release();
  });
}

hqc_status hqc_sudarshan_first_moment(double Omega, double omega, double gamma, double alpha, double beta,
                                      hqc_benchmark* out) {
  if (!out) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_sudarshan_first_moment: null output pointer");
  return guarded([&] {
    fill_report(hqc::sudarshan::benchmark_first_moment({Omega, omega, gamma, alpha, beta}), out);
  });
}

hqc_status hqc_sudarshan_second_moment(double Omega, double omega, double gamma, double hbar, hqc_benchmark* out) {
  if (!out) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_sudarshan_second_moment: null output pointer");
  return guarded([&] {
    fill_report(hqc::sudarshan::benchmark_second_moment(hqc::sudarshan::HybridSpec::canonical(Omega, omega, gamma),
                                                        hbar),
                out);
  });
}

hqc_status hqc_robertson_check(size_t n, const double* cov, const double* structure, double hbar, int* feasible,
                               double* min_eigenvalue) {
  if (n == 0 || !cov || !structure || !feasible || !min_eigenvalue) {
    return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_robertson_check: null argument or n = 0");
  }
  return guarded([&] {
    const hqc::MomentState state{hqc::Vector::Zero(static_cast<Eigen::Index>(n)), from_row_major(n, cov)};
    const hqc::StructureMatrix s{from_row_major(n, structure), hbar};
    const auto r = hqc::robertson_check(state, s);
    *feasible = r.feasible ? 1 : 0;
    *min_eigenvalue = r.min_eigenvalue;
  });
}

hqc_status hqc_propagator(size_t n, const double* generator, double t, double* out) {
  if (n == 0 || !generator || !out) return fail(HQC_ERR_INVALID_ARGUMENT, "hqc_propagator: null argument or n = 0");
  return guarded([&] {
    const auto k = static_cast<Eigen::Index>(n);
    const hqc::Propagator p = hqc::propagate_analytic(from_row_major(n, generator), t);
    Eigen::Map<RowMajor>(out, k, k) = p.U;
  });
}

}  // extern "C"
