#pragma once

// CSV ingestion of raw responses and persistence of grids and G-test results.
//
// All formats are UTF-8, comma separated without quoting, '\n' terminated, with
// a mandatory header. Readers reject invalid rows instead of repairing them.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "consist/inference.hpp"
#include "consist/models.hpp"

namespace consist {

inline constexpr std::string_view kResponsesHeader = "experiment_id,stimulus_id,score";
inline constexpr std::string_view kGridHeader = "model,param1,param2,p1,p2,p3,p4,p5";
inline constexpr std::string_view kResultsHeader =
    "stimulus_id,n,model,param1_hat,param2_hat,g_obs,p_value,t_bootstrap,seed";

struct ResponseRecord {
  std::string experiment_id;
  std::string stimulus_id;
  int score;
};

struct StimulusEntry {
  std::string experiment_id;
  std::string stimulus_id;
  ScoreCounts counts;

  /// "<experiment_id>/<stimulus_id>", the id used in results files.
  std::string key() const { return experiment_id + "/" + stimulus_id; }
};

/// Ordered by (experiment_id, stimulus_id), keys unique.
using StimulusTable = std::vector<StimulusEntry>;

StimulusTable aggregate_responses(std::span<const ResponseRecord> records);

StimulusTable read_responses(std::istream& in);
StimulusTable read_responses(const std::filesystem::path& path);
void write_responses(std::span<const ResponseRecord> records, const std::filesystem::path& path);

void write_grid(const ProbabilityGrid& grid, std::ostream& out);
void write_grid(const ProbabilityGrid& grid, const std::filesystem::path& path);
ProbabilityGrid read_grid(std::istream& in);
ProbabilityGrid read_grid(const std::filesystem::path& path);

/// Rows are written sorted by stimulus_id; p_value with 6 decimals.
void write_results(std::vector<GofResult> results, std::ostream& out);
void write_results(std::vector<GofResult> results, const std::filesystem::path& path);
std::vector<GofResult> read_results(std::istream& in);
std::vector<GofResult> read_results(const std::filesystem::path& path);

/// One id per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> read_id_list(const std::filesystem::path& path);

}  // namespace consist
