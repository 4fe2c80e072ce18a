#include <numeric>
#include <random>
#include <sstream>

#include "consist/error.hpp"
#include "consist/runner.hpp"
#include "doctest.h"

using namespace consist;

namespace {

std::vector<std::size_t> chunk_sizes(std::size_t len, std::size_t chunks) {
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < chunks; ++i) {
    const auto [b, e] = chunk_bounds(len, chunks, i);
    sizes.push_back(e - b);
  }
  return sizes;
}

StimulusTable synthetic_table(std::size_t stimuli, std::uint64_t seed) {
  Rng rng(seed);
  StimulusTable table;
  for (std::size_t i = 0; i < stimuli; ++i) {
    const double psi = 1.5 + 3.0 * uniform01(rng);
    const auto pmf = gsd_pmf({psi, 0.2 + 0.6 * uniform01(rng)});
    table.push_back({"exp", "s" + std::to_string(100 + i), sample_counts(pmf, 24, rng)});
  }
  return table;
}

GofResult result_with_id(std::string id) {
  GofResult r;
  r.stimulus_id = std::move(id);
  r.n = 1;
  r.p_value = 0.5;
  r.t_bootstrap = 1;
  return r;
}

}  // namespace

TEST_CASE("partition sizes") {
  CHECK(chunk_sizes(10, 4) == std::vector<std::size_t>{3, 3, 2, 2});
  CHECK(chunk_sizes(3, 5) == std::vector<std::size_t>{1, 1, 1, 0, 0});
  const std::vector<int> items{4, 8, 15, 16, 23, 42};
  CHECK(partition<int>(items, 1, 0) == items);
  CHECK_THROWS_AS(chunk_bounds(10, 4, 4), DomainError);
  CHECK_THROWS_AS(chunk_bounds(10, 0, 0), DomainError);
}

TEST_CASE("partition is an order-preserving cover") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t len = rng() % 60;
    const std::size_t chunks = 1 + rng() % 12;
    std::vector<int> items(len);
    std::iota(items.begin(), items.end(), 0);
    std::vector<int> joined;
    std::size_t largest = 0, smallest = len + 1;
    for (std::size_t i = 0; i < chunks; ++i) {
      const auto part = partition<int>(items, chunks, i);
      largest = std::max(largest, part.size());
      smallest = std::min(smallest, part.size());
      joined.insert(joined.end(), part.begin(), part.end());
    }
    CHECK(joined == items);
    CHECK(largest - smallest <= 1);
  }
}

TEST_CASE("sample_indices") {
  const auto a = sample_indices(50, 3, 42);
  CHECK(a.size() == 3);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
  CHECK(a == sample_indices(50, 3, 42));
  CHECK(sample_indices(5, 10, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  bool differs = false;
  for (std::uint64_t s = 1; s < 10 && !differs; ++s) differs = sample_indices(50, 3, s) != a;
  CHECK(differs);
}

TEST_CASE("select_stimuli applies list, then sample, then chunk") {
  const auto table = synthetic_table(12, 1);
  GofOptions opt;
  opt.stimuli_list = std::vector<std::string>{"exp/s103", "exp/s105", "exp/s107", "exp/s110"};
  auto chosen = select_stimuli(table, opt);
  REQUIRE(chosen.size() == 4);
  CHECK(chosen[0].key() == "exp/s103");

  opt.sample_n = 3;
  chosen = select_stimuli(table, opt);
  CHECK(chosen.size() == 3);

  opt.chunks = 2;
  opt.chunk_index = 1;
  chosen = select_stimuli(table, opt);
  CHECK(chosen.size() == 1);

  GofOptions bad;
  bad.stimuli_list = std::vector<std::string>{"exp/s999"};
  CHECK_THROWS_AS(select_stimuli(table, bad), DomainError);
}

TEST_CASE("run_gof is independent of jobs and chunking") {
  const auto table = synthetic_table(10, 2);
  const auto grid = build_grid(ModelId::Gsd, {1, 5, 0.1}, {0, 1, 0.1});
  GofOptions opt;
  opt.bootstrap_t = 100;
  opt.master_seed = 42;
  const auto sequential = run_gof(table, grid, opt);
  REQUIRE(sequential.size() == 10);

  opt.jobs = 4;
  CHECK(run_gof(table, grid, opt) == sequential);

  std::vector<std::vector<GofResult>> parts;
  for (std::size_t i = 0; i < 4; ++i) {
    GofOptions chunk = opt;
    chunk.chunks = 4;
    chunk.chunk_index = i;
    chunk.jobs = 1 + static_cast<unsigned>(i);
    parts.push_back(run_gof(table, grid, chunk));
  }
  std::reverse(parts.begin(), parts.end());
  CHECK(merge_results(parts) == sequential);
}

TEST_CASE("run_gof reports progress per stimulus") {
  const auto table = synthetic_table(3, 3);
  const auto grid = build_grid(ModelId::Gsd, {1, 5, 0.5}, {0, 1, 0.25});
  std::ostringstream log;
  GofOptions opt;
  opt.bootstrap_t = 10;
  opt.progress = &log;
  run_gof(table, grid, opt);
  const auto text = log.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find(" ms\n") != std::string::npos);
}

TEST_CASE("merge_results") {
  CHECK(merge_results({{result_with_id("b"), result_with_id("a")}}).front().stimulus_id == "a");
  try {
    merge_results({{result_with_id("s1"), result_with_id("s2")}, {result_with_id("s1")}});
    FAIL("expected a merge conflict");
  } catch (const MergeConflict& e) {
    CHECK(std::string(e.what()).find("s1") != std::string::npos);
    CHECK(std::string(e.what()).find("s2") == std::string::npos);
  }
}

TEST_CASE("RunSpec defaults") {
  const RunSpec spec;
  CHECK(spec.bootstrap_t == 10000);
  CHECK(spec.sample_n == 3);
  CHECK(GofOptions{}.bootstrap_t == 10000);
}
