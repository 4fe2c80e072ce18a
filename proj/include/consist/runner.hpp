#pragma once

// Batch execution of the G-test over many stimuli: selection, chunking for
// multi-machine runs, a thread pool for single-machine runs, deterministic merge,
// and the five reproduction scenarios.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "consist/dataio.hpp"
#include "consist/error.hpp"
#include "consist/inference.hpp"
#include "consist/models.hpp"

namespace consist {

inline constexpr std::uint32_t kDefaultBootstrap = 10000;
inline constexpr std::size_t kDefaultSampleN = 3;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitUsage = 64;

/// [begin, end) of chunk `index` in a contiguous balanced split of `len` items:
/// the first len % chunks chunks hold one extra item.
std::pair<std::size_t, std::size_t> chunk_bounds(std::size_t len, std::size_t chunks, std::size_t index);

template <typename T>
std::vector<T> partition(std::span<const T> items, std::size_t chunks, std::size_t index) {
  const auto [begin, end] = chunk_bounds(items.size(), chunks, index);
  return std::vector<T>(items.begin() + static_cast<std::ptrdiff_t>(begin),
                        items.begin() + static_cast<std::ptrdiff_t>(end));
}

/// Ascending indices of `n` items drawn without replacement from `count`;
/// a function of (master_seed, count, n) only.
std::vector<std::size_t> sample_indices(std::size_t count, std::size_t n, std::uint64_t master_seed);

struct GofOptions {
  std::uint32_t bootstrap_t = kDefaultBootstrap;
  std::uint64_t master_seed = 0;
  unsigned jobs = 1;
  std::size_t chunks = 1;
  std::size_t chunk_index = 0;
  std::optional<std::size_t> sample_n;
  std::optional<std::vector<std::string>> stimuli_list;
  std::ostream* progress = nullptr;  // one line per finished stimulus
};

/// Filters by the stimuli list, then samples, then takes this chunk. The
/// returned table keeps the input order.
StimulusTable select_stimuli(const StimulusTable& table, const GofOptions& options);

/// G-test of every selected stimulus; results sorted by stimulus_id and
/// independent of jobs and chunk layout.
std::vector<GofResult> run_gof(const StimulusTable& table, const ProbabilityGrid& grid,
                               const GofOptions& options);

/// Union of result sets sorted by stimulus_id; MergeConflict names every id
/// that appears more than once.
std::vector<GofResult> merge_results(std::vector<std::vector<GofResult>> parts);
std::vector<GofResult> merge_result_files(std::span<const std::filesystem::path> paths);

unsigned default_jobs();

struct RunSpec {
  int scenario = 0;
  ModelId model = ModelId::Gsd;
  std::uint32_t bootstrap_t = kDefaultBootstrap;
  std::uint64_t master_seed = 0;
  std::size_t sample_n = kDefaultSampleN;
  std::size_t chunks = 1;
  std::size_t chunk_index = 0;
  unsigned jobs = 1;
  double grid_step = 0.01;
  double band_conf = 0.95;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> grid;
  std::optional<std::filesystem::path> results;
  std::optional<std::filesystem::path> stimuli_list;
  std::filesystem::path out_dir = ".";
};

/// Runs one reproduction scenario and returns the process exit status.
///   1  P-P plot and summary from an existing results file
///   2  G-test restricted to the stimuli list, then the plot
///   3  G-test of every stimulus, then the plot
///   4  G-test of sample_n randomly selected stimuli, then the plot
///   5  default GSD and QNormal grids
int run_scenario(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace consist
