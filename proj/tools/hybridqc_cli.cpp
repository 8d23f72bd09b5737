// Command-line scenario runner. Talks to the library through the C API only.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hybridqc/hybridqc.h"

namespace {

int report(hqc_status s) {
  std::fprintf(stderr, "hybridqc: %s: %s\n", hqc_status_name(s), hqc_last_error());
  return hqc_exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid classical-quantum oscillator scenarios"};
  std::string config, scenario, out, seed;
  std::vector<std::string> params;
  bool figure = false;
  app.add_option("--config", config, "key=value configuration file");
  app.add_option("--scenario", scenario,
                 "wigner, sudarshan-benchmark, sudarshan-evolve, ensemble-divergence or verify");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "unsigned 64-bit seed");
  app.add_option("--param", params, "key=value override, repeatable")->allow_extra_args(false);
  app.add_flag("--figure", figure, "also write figure.svg");
  app.set_version_flag("--version", std::string(hqc_version()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  hqc_config* cfg = nullptr;
  if (hqc_status s = hqc_config_create(&cfg); s != HQC_OK) return report(s);

  auto set = [&](const char* key, const std::string& value) { return hqc_config_set(cfg, key, value.c_str()); };
  hqc_status s = HQC_OK;
  if (!config.empty()) s = hqc_config_load_file(cfg, config.c_str());
  if (s == HQC_OK && !scenario.empty()) s = set("scenario", scenario);
  if (s == HQC_OK && !out.empty()) s = set("out", out);
  if (s == HQC_OK && !seed.empty()) s = set("seed", seed);
  if (s == HQC_OK && figure) s = set("figure", "true");
  for (const auto& p : params) {
    if (s != HQC_OK) break;
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "hybridqc: --param expects key=value, got '%s'\n", p.c_str());
      hqc_config_destroy(cfg);
      return 2;
    }
    s = set(p.substr(0, eq).c_str(), p.substr(eq + 1));
  }
  if (s == HQC_OK) s = hqc_config_run(cfg);
  hqc_config_destroy(cfg);
  if (s != HQC_OK) return report(s);
  return 0;
}
