#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "consist/dataio.hpp"
#include "consist/error.hpp"
#include "consist/numfmt.hpp"
#include "consist/ppplot.hpp"
#include "consist/runner.hpp"

namespace consist::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const fs::path& path) {
  if (!fs::exists(path)) throw MissingInput("input file '" + path.string() + "' does not exist");
}

// --seed wins, then CONSIST_SEED, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CONSIST_SEED"); env && *env) {
    try {
      return numfmt::parse_u64(env);
    } catch (const std::invalid_argument&) {
      throw UsageError(std::string("CONSIST_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 0;
}

void check_chunking(std::size_t chunks, std::size_t index) {
  if (chunks < 1) throw UsageError("--chunks must be at least 1");
  if (index >= chunks) throw UsageError("--chunk-index must be below --chunks");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subjective-experiment consistency: score-model grids, bootstrap G-tests and p-value P-P plots",
               "consist"};
  app.require_subcommand(1);

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Build a probability grid and write it as CSV");
  std::string grid_model;
  double grid_step = 0.01;
  fs::path grid_out;
  grid_cmd->add_option("--model", grid_model, "Score model")->required()->check(CLI::IsMember({"gsd", "qnormal"}));
  grid_cmd->add_option("--step", grid_step, "Lattice step on both axes")->capture_default_str();
  grid_cmd->add_option("--out", grid_out, "Output CSV")->required();

  // gof
  auto* gof_cmd = app.add_subcommand("gof", "Bootstrap G-test of every stimulus in a responses file");
  fs::path gof_scores, gof_grid, gof_out, gof_list;
  std::uint32_t gof_t = kDefaultBootstrap;
  std::optional<std::uint64_t> gof_seed;
  unsigned gof_jobs = default_jobs();
  std::size_t gof_chunks = 1, gof_chunk_index = 0, gof_sample = kDefaultSampleN;
  gof_cmd->add_option("--scores", gof_scores, "Responses CSV (experiment_id,stimulus_id,score)")->required();
  gof_cmd->add_option("--grid", gof_grid, "Grid CSV")->required();
  gof_cmd->add_option("--bootstrap", gof_t, "Bootstrap resamples per stimulus")->capture_default_str();
  gof_cmd->add_option("--seed", gof_seed, "Master seed (fallback: CONSIST_SEED, then 0)");
  gof_cmd->add_option("--jobs", gof_jobs, "Worker threads")->capture_default_str();
  gof_cmd->add_option("--chunks", gof_chunks, "Number of batch chunks")->capture_default_str();
  gof_cmd->add_option("--chunk-index", gof_chunk_index, "Chunk processed by this run")->capture_default_str();
  auto* sample_opt = gof_cmd->add_option("--sample", gof_sample, "Test N randomly selected stimuli (default 3)")
                         ->expected(0, 1)
                         ->default_str(std::to_string(kDefaultSampleN));
  auto* list_opt = gof_cmd->add_option("--stimuli-list", gof_list, "Restrict to the ids listed in this file");
  gof_cmd->add_option("--out", gof_out, "Results CSV")->required();

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "Merge chunked results files");
  std::vector<fs::path> merge_inputs;
  fs::path merge_out;
  merge_cmd->add_option("files", merge_inputs, "Results CSVs")->required();
  merge_cmd->add_option("--out", merge_out, "Merged results CSV")->required();

  // ppplot
  auto* pp_cmd = app.add_subcommand("ppplot", "Render the p-value P-P plot of a results file");
  fs::path pp_results;
  double pp_conf = 0.95;
  std::string pp_out;
  pp_cmd->add_option("--results", pp_results, "Results CSV")->required();
  pp_cmd->add_option("--band-conf", pp_conf, "Confidence of the upper band")->capture_default_str();
  pp_cmd->add_option("--out", pp_out, "Output name; writes NAME.svg and NAME.csv")->required();

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "Run one of the five reproduction scenarios");
  RunSpec spec;
  std::string rep_model = "gsd";
  std::optional<std::uint64_t> rep_seed;
  spec.jobs = default_jobs();
  rep_cmd->add_option("scenario", spec.scenario, "1: plot from existing results, 2: listed stimuli, "
                                                 "3: all stimuli, 4: N random stimuli, 5: grids")
      ->required();
  rep_cmd->add_option("--scores", spec.scores, "Responses CSV");
  rep_cmd->add_option("--grid", spec.grid, "Grid CSV (default: build in memory)");
  rep_cmd->add_option("--results", spec.results, "Existing results CSV (scenario 1)");
  rep_cmd->add_option("--stimuli-list", spec.stimuli_list, "Stimulus ids (scenario 2)");
  rep_cmd->add_option("-n,--sample-n", spec.sample_n, "Stimuli to sample (scenario 4)")->capture_default_str();
  rep_cmd->add_option("--model", rep_model, "Model for an in-memory grid")->check(CLI::IsMember({"gsd", "qnormal"}))
      ->capture_default_str();
  rep_cmd->add_option("--step", spec.grid_step, "Grid lattice step")->capture_default_str();
  rep_cmd->add_option("--bootstrap", spec.bootstrap_t, "Bootstrap resamples per stimulus")->capture_default_str();
  rep_cmd->add_option("--seed", rep_seed, "Master seed (fallback: CONSIST_SEED, then 0)");
  rep_cmd->add_option("--jobs", spec.jobs, "Worker threads")->capture_default_str();
  rep_cmd->add_option("--chunks", spec.chunks, "Number of batch chunks")->capture_default_str();
  rep_cmd->add_option("--chunk-index", spec.chunk_index, "Chunk processed by this run")->capture_default_str();
  rep_cmd->add_option("--band-conf", spec.band_conf, "Confidence of the upper band")->capture_default_str();
  rep_cmd->add_option("--out-dir", spec.out_dir, "Directory for outputs")->capture_default_str();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("consist");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (grid_cmd->parsed()) {
      const auto model = parse_model_id(grid_model);
      const auto [a1, a2] = default_axes(model, grid_step);
      const auto grid = build_grid(model, a1, a2);
      write_grid(grid, grid_out);
      out << "wrote " << grid_out.string() << " (" << grid.size() << " rows)\n";
      return kExitOk;
    }

    if (gof_cmd->parsed()) {
      check_chunking(gof_chunks, gof_chunk_index);
      if (gof_t < 1) throw UsageError("--bootstrap must be at least 1");
      require_file(gof_scores);
      require_file(gof_grid);
      GofOptions options;
      options.bootstrap_t = gof_t;
      options.master_seed = resolve_seed(gof_seed);
      options.jobs = std::max(1u, gof_jobs);
      options.chunks = gof_chunks;
      options.chunk_index = gof_chunk_index;
      options.progress = &err;
      if (sample_opt->count() > 0) options.sample_n = gof_sample;
      if (list_opt->count() > 0) {
        require_file(gof_list);
        options.stimuli_list = read_id_list(gof_list);
      }
      const auto table = read_responses(gof_scores);
      const auto grid = read_grid(gof_grid);
      const auto results = run_gof(table, grid, options);
      write_results(results, gof_out);
      out << "wrote " << gof_out.string() << " (" << results.size() << " stimuli)\n";
      return kExitOk;
    }

    if (merge_cmd->parsed()) {
      for (const auto& path : merge_inputs) require_file(path);
      const auto merged = merge_result_files(merge_inputs);
      write_results(merged, merge_out);
      out << "wrote " << merge_out.string() << " (" << merged.size() << " stimuli)\n";
      return kExitOk;
    }

    if (pp_cmd->parsed()) {
      require_file(pp_results);
      const auto results = read_results(pp_results);
      if (results.empty()) throw DomainError("results file has no rows");
      std::vector<double> pvalues;
      for (const auto& r : results) pvalues.push_back(r.p_value);
      const auto thresholds = default_thresholds();
      render_ppplot(make_ppseries(pvalues, thresholds, pp_conf), pp_out);
      out << "wrote " << pp_out << ".svg and " << pp_out << ".csv\n";
      return kExitOk;
    }

    if (rep_cmd->parsed()) {
      spec.model = parse_model_id(rep_model);
      spec.master_seed = resolve_seed(rep_seed);
      spec.jobs = std::max(1u, spec.jobs);
      check_chunking(spec.chunks, spec.chunk_index);
      return run_scenario(spec, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace consist::cli
