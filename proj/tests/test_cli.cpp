#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "consist/dataio.hpp"
#include "consist/runner.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace consist;

namespace {

struct Run {
  int rc;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  return {rc, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("consist_cli_" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_scores(const std::string& path, int stimuli) {
  std::ofstream f(path);
  f << "experiment_id,stimulus_id,score\n";
  Rng rng(5);
  for (int s = 0; s < stimuli; ++s)
    for (int k = 0; k < 12; ++k) f << "E,s" << s << ',' << 1 + uniform_below(rng, 5) << '\n';
}

}  // namespace

TEST_CASE("cli usage errors exit 64") {
  CHECK(run({}).rc == kExitUsage);
  CHECK(run({"bogus"}).rc == kExitUsage);
  CHECK(run({"grid", "--model", "normal", "--out", "x"}).rc == kExitUsage);
  CHECK(run({"reproduce", "7"}).rc == kExitUsage);
  CHECK(run({"reproduce", "x"}).rc == kExitUsage);
  CHECK(run({"reproduce", "3"}).rc == kExitUsage);  // no --scores
  CHECK(run({"--help"}).rc == kExitOk);
}

TEST_CASE("cli missing inputs exit 2") {
  TempDir dir;
  CHECK(run({"gof", "--scores", dir / "nope.csv", "--grid", dir / "g.csv", "--out", dir / "r.csv"}).rc ==
        kExitMissingInput);
  CHECK(run({"ppplot", "--results", dir / "nope.csv", "--out", dir / "pp"}).rc == kExitMissingInput);
  CHECK(run({"merge", dir / "nope.csv", "--out", dir / "m.csv"}).rc == kExitMissingInput);
  CHECK(run({"reproduce", "1", "--results", dir / "nope.csv"}).rc == kExitMissingInput);
}

TEST_CASE("cli grid, gof, merge and ppplot") {
  TempDir dir;
  write_scores(dir / "scores.csv", 6);
  REQUIRE(run({"grid", "--model", "gsd", "--step", "0.25", "--out", dir / "grid.csv"}).rc == 0);
  CHECK(read_grid(fs::path(dir / "grid.csv")).size() == 17u * 5u);

  const std::vector<std::string> base{"gof", "--scores", dir / "scores.csv", "--grid", dir / "grid.csv",
                                      "--bootstrap", "50", "--seed", "42"};
  auto args = base;
  args.insert(args.end(), {"--out", dir / "all.csv"});
  REQUIRE(run(args).rc == 0);
  for (int i = 0; i < 3; ++i) {
    args = base;
    args.insert(args.end(), {"--chunks", "3", "--chunk-index", std::to_string(i), "--out",
                             dir / ("c" + std::to_string(i) + ".csv")});
    REQUIRE(run(args).rc == 0);
  }
  REQUIRE(run({"merge", dir / "c2.csv", dir / "c0.csv", dir / "c1.csv", "--out", dir / "merged.csv"}).rc == 0);
  CHECK(slurp(dir / "merged.csv") == slurp(dir / "all.csv"));

  const auto conflict = run({"merge", dir / "c0.csv", dir / "all.csv", "--out", dir / "bad.csv"});
  CHECK(conflict.rc == kExitFailure);
  CHECK(conflict.err.find("E/s0") != std::string::npos);

  args = base;
  args.insert(args.end(), {"--chunks", "2", "--chunk-index", "2", "--out", dir / "x.csv"});
  CHECK(run(args).rc == kExitUsage);

  REQUIRE(run({"ppplot", "--results", dir / "all.csv", "--out", dir / "pp"}).rc == 0);
  CHECK(fs::exists(dir / "pp.svg"));
  CHECK(slurp(dir / "pp.csv").rfind("alpha,ecdf,band_upper\n0.001000,", 0) == 0);
}

TEST_CASE("cli seed falls back to CONSIST_SEED") {
  TempDir dir;
  write_scores(dir / "scores.csv", 2);
  REQUIRE(run({"grid", "--model", "gsd", "--step", "0.5", "--out", dir / "grid.csv"}).rc == 0);
  const std::vector<std::string> base{"gof", "--scores", dir / "scores.csv", "--grid", dir / "grid.csv",
                                      "--bootstrap", "20"};
  auto explicit_seed = base;
  explicit_seed.insert(explicit_seed.end(), {"--seed", "9", "--out", dir / "a.csv"});
  REQUIRE(run(explicit_seed).rc == 0);
  setenv("CONSIST_SEED", "9", 1);
  auto from_env = base;
  from_env.insert(from_env.end(), {"--out", dir / "b.csv"});
  REQUIRE(run(from_env).rc == 0);
  setenv("CONSIST_SEED", "nine", 1);
  CHECK(run(from_env).rc == kExitUsage);
  unsetenv("CONSIST_SEED");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("reproduce scenarios") {
  TempDir dir;
  SUBCASE("scenario 5 writes exactly the two grids") {
    const auto out_dir = dir / "s5";
    REQUIRE(run({"reproduce", "5", "--step", "0.1", "--out-dir", out_dir}).rc == 0);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(out_dir)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    CHECK(names == std::vector<std::string>{"gsd_grid.csv", "qnormal_grid.csv"});
  }
  SUBCASE("scenario 1 plots existing results") {
    std::ofstream f(dir / "results.csv");
    f << kResultsHeader << '\n';
    const double p[] = {0.1, 0.2, 0.3, 0.9};
    for (int i = 0; i < 4; ++i)
      f << "E/s" << i << ",24,gsd,3,0.5,1," << p[i] << ",100," << i << '\n';
    f.close();
    const auto r = run({"reproduce", "1", "--results", dir / "results.csv", "--out-dir", dir / "s1"});
    REQUIRE(r.rc == 0);
    const auto csv = slurp(dir / "s1/pvalue_ppplot.csv");
    CHECK(csv.find("\n0.250000,0.500000,") != std::string::npos);
    CHECK(r.out.find("stimuli: 4") != std::string::npos);
  }
  SUBCASE("scenario 4 samples three stimuli by default") {
    write_scores(dir / "scores.csv", 8);
    REQUIRE(run({"reproduce", "4", "--scores", dir / "scores.csv", "--step", "0.25", "--bootstrap", "20",
                 "--out-dir", dir / "s4"})
                .rc == 0);
    CHECK(read_results(fs::path(dir / "s4/gtest_results.csv")).size() == 3);
    CHECK(fs::exists(dir / "s4/pvalue_ppplot.svg"));
  }
  SUBCASE("scenario 2 requires a stimuli list") {
    write_scores(dir / "scores.csv", 4);
    CHECK(run({"reproduce", "2", "--scores", dir / "scores.csv"}).rc == kExitUsage);
    std::ofstream(dir / "ids.txt") << "E/s1\nE/s3\n";
    REQUIRE(run({"reproduce", "2", "--scores", dir / "scores.csv", "--stimuli-list", dir / "ids.txt", "--step",
                 "0.25", "--bootstrap", "20", "--out-dir", dir / "s2"})
                .rc == 0);
    const auto results = read_results(fs::path(dir / "s2/gtest_results.csv"));
    REQUIRE(results.size() == 2);
    CHECK(results[1].stimulus_id == "E/s3");
  }
  SUBCASE("scenario 3 runs every stimulus against the chosen model") {
    write_scores(dir / "scores.csv", 3);
    REQUIRE(run({"reproduce", "3", "--scores", dir / "scores.csv", "--model", "qnormal", "--step", "0.25",
                 "--bootstrap", "20", "--out-dir", dir / "s3"})
                .rc == 0);
    const auto results = read_results(fs::path(dir / "s3/gtest_results.csv"));
    REQUIRE(results.size() == 3);
    CHECK(results[0].model == ModelId::QNormal);
  }
}

TEST_CASE("gof --sample") {
  TempDir dir;
  write_scores(dir / "scores.csv", 9);
  REQUIRE(run({"grid", "--model", "gsd", "--step", "0.5", "--out", dir / "grid.csv"}).rc == 0);
  const std::vector<std::string> base{"gof", "--scores", dir / "scores.csv", "--grid", dir / "grid.csv",
                                      "--bootstrap", "10"};
  auto a = base;
  a.insert(a.end(), {"--sample", "--out", dir / "a.csv"});
  REQUIRE(run(a).rc == 0);
  CHECK(read_results(fs::path(dir / "a.csv")).size() == 3);
  auto b = base;
  b.insert(b.end(), {"--sample", "5", "--out", dir / "b.csv"});
  REQUIRE(run(b).rc == 0);
  CHECK(read_results(fs::path(dir / "b.csv")).size() == 5);
}
