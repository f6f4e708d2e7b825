#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cli.hpp"
#include "popdyn/dataio.hpp"
#include "test_support.hpp"

using namespace popdyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args, const cli::Hooks& hooks = {}) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err, hooks);
  return {code, out.str(), err.str()};
}

std::string write_population(const TempDir& dir, const std::string& name, double offset) {
  std::string csv = "sex,age,count\n";
  for (const char* s : {"m", "f"}) {
    for (int a = 0; a < 5; ++a) {
      csv += std::string(s) + "," + std::to_string(a) + "," +
             format_number(1000.0 + 10.0 * a + offset) + "\n";
    }
  }
  return dir.write(name, csv).string();
}

// Numbers of the Table-2 style row for one sex (percent signs dropped).
std::vector<double> error_row(const std::string& report, const std::string& sex) {
  std::istringstream in(report.substr(report.find("Errors by")));
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string label;
    fields >> label;
    if (label != sex) continue;
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) {
      if (tok.back() == '%') tok.pop_back();
      v.push_back(std::stod(tok));
    }
    return v;
  }
  return {};
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kInputError);
  CHECK(run({"bogus"}).code == cli::kInputError);
  CHECK(run({"project"}).code == cli::kInputError);  // --config is required
  CHECK(run({"convergence", "--levels", "1"}).code == cli::kInputError);
  CHECK(run({"verify", "compare"}).code == cli::kInputError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("project on the synthetic scenario") {
  TempDir dir("cli_project");
  const auto out = dir.path() / "result";
  const auto r = run({"project", "--config", (fixture_dir() / "scenario.ini").string(),
                      "--out", out.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("omega0  = 110") != std::string::npos);
  CHECK(r.out.find("tau_bar = 0.00909091 (= 1/110)") != std::string::npos);
  CHECK(r.err.find("exceeds tau_bar = 1/110") != std::string::npos);
  for (int y = 2010; y <= 2020; ++y) {
    CHECK(fs::exists(out / ("population_" + std::to_string(y) + ".csv")));
    CHECK(fs::exists(out / ("pyramid_" + std::to_string(y) + ".csv")));
  }
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "diagnostics.csv"));

  // Flags override the config.
  const auto out2 = dir.path() / "coarse";
  const auto r2 = run({"project", "--config", (fixture_dir() / "scenario.ini").string(),
                       "--out", out2.string(), "--theta", "1", "--tau", "0.25", "--h", "0.5"});
  CHECK(r2.code == cli::kOk);
  CHECK(r2.out.find("theta = 1, steps = 40") != std::string::npos);
}

TEST_CASE("project reports bad inputs") {
  TempDir dir("cli_bad");
  const std::string ini = read_text(fixture_dir() / "scenario.ini");
  std::string broken = ini;
  broken.replace(broken.find("population.csv"), 14, "absent.csv");
  const auto cfg = dir.write("broken.ini", broken);
  const auto r = run({"project", "--config", cfg.string(), "--out", (dir.path() / "o").string()});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("absent.csv") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path() / "o"));

  CHECK(run({"project", "--config", (dir.path() / "none.ini").string(), "--out", "x"}).code ==
        cli::kInputError);
  CHECK(run({"project", "--config", (fixture_dir() / "scenario.ini").string(), "--out",
             (dir.path() / "t").string(), "--theta", "2"})
            .code == cli::kInputError);
}

TEST_CASE("verify") {
  const auto ok = run({"verify"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("summation-by-parts") != std::string::npos);

  cli::Hooks broken;
  broken.assemble = [](const MaternityModuli& m, const SexPair<AgeGrid>& g) {
    auto ops = assemble_operators(m, g);
    ops.a_block = -ops.a_block;
    return ops;
  };
  const auto bad = run({"verify"}, broken);
  CHECK(bad.code == cli::kVerificationFailure);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("convergence table") {
  const auto r = run({"convergence", "--levels", "2", "--theta", "1"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("ratio") != std::string::npos);
  CHECK(r.out.find("joint") != std::string::npos);
}

TEST_CASE("compare") {
  TempDir dir("cli_compare");
  const auto a = write_population(dir, "a.csv", 0.0);
  const auto b = write_population(dir, "b.csv", 7.0);
  const auto same = run({"compare", "--simulated", a, "--reported", a});
  CHECK(same.code == cli::kOk);
  CHECK(same.out.find("L1 abs") != std::string::npos);
  CHECK(same.out.find("Linf rel") != std::string::npos);
  for (double v : error_row(same.out, "male")) CHECK(v == 0.0);
  for (double v : error_row(same.out, "female")) CHECK(v == 0.0);

  const auto off = run({"compare", "--simulated", b, "--reported", a});
  CHECK(off.code == cli::kOk);
  // L1 = 5 * 7, L2 = sqrt(5) * 7, Linf = 7 per sex.
  const auto row = error_row(off.out, "female");
  REQUIRE(row.size() == 6);
  CHECK(row[0] == 35.0);
  CHECK(row[2] == doctest::Approx(std::sqrt(5.0) * 7.0).epsilon(1e-5));
  CHECK(row[4] == 7.0);

  const auto shorter = dir.write("c.csv", "sex,age,count\nm,0,1\nf,0,1\n");
  CHECK(run({"compare", "--simulated", shorter.string(), "--reported", a}).code ==
        cli::kInputError);
}
