// Runs the command-line tool as a separate process.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(HQC_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("hqc-cli-" + std::to_string(::getpid()) + "-" + tag);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("wigner run from flags") {
  const fs::path out = scratch("wigner");
  CHECK(cli("--scenario wigner --param Omega=3 --param omega=2 --param gamma=1 --param t_max=1 --figure --out " +
            out.string()) == 0);
  const std::string csv = slurp(out / "series.csv");
  CHECK(csv.rfind("t,dq,dp,dx,dk,dqdp,dxdk,total\n0,0,0,", 0) == 0);
  CHECK(fs::exists(out / "figure.svg"));
  fs::remove_all(out);
}

TEST_CASE("config file with overrides, then manifest re-run") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "bench.cfg");
    f << "# benchmark\nscenario=sudarshan-benchmark\nOmega=3\nomega=2\ngamma=1\nalpha=1\nbeta=0\n";
  }
  CHECK(cli("--config " + (dir / "bench.cfg").string() + " --param alpha=0.5 --param beta=1 --out " +
            (dir / "a").string()) == 0);
  const std::string manifest = slurp(dir / "a" / "manifest.txt");
  CHECK(manifest.find("result.achievable=true\n") != std::string::npos);

  CHECK(cli("--config " + (dir / "a" / "manifest.txt").string() + " --out " + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "series.csv") == slurp(dir / "b" / "series.csv"));
  fs::remove_all(dir);
}

TEST_CASE("configuration errors exit 2 and write nothing") {
  const fs::path out = scratch("missing");
  CHECK(cli("--scenario wigner --param Omega=3 --param omega=2 --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(cli("--scenario wigner --param Omega --out " + out.string()) == 2);
  CHECK(cli("--config /nonexistent.cfg --out " + out.string()) == 2);
  CHECK(cli("--scenario nope --out " + out.string()) == 2);
  CHECK(cli("--seed -3 --scenario verify --out " + out.string()) == 2);
  CHECK(cli("--bogus-flag") == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("numerical failure exits 3") {
  const fs::path out = scratch("blowup");
  // Strongly unstable coupling overflows long before t_max.
  CHECK(cli("--scenario sudarshan-evolve --param Omega=0.1 --param omega=0.1 --param gamma=50 --param t_max=200 "
            "--param dt=1 --out " + out.string()) == 3);
  fs::remove_all(out);
}

TEST_CASE("verify is deterministic and exits 0") {
  const fs::path a = scratch("va"), b = scratch("vb");
  CHECK(cli("--scenario verify --seed 7 --out " + a.string()) == 0);
  CHECK(cli("--scenario verify --seed 7 --out " + b.string()) == 0);
  CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("version flag") { CHECK(cli("--version >/dev/null") == 0); }
