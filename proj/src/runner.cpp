#include "consist/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "consist/numfmt.hpp"
#include "consist/ppplot.hpp"
#include "consist/rng.hpp"

namespace consist {

namespace {

bool by_id(const GofResult& a, const GofResult& b) { return a.stimulus_id < b.stimulus_id; }

void print_summary(const std::vector<GofResult>& results, std::ostream& out) {
  std::vector<double> pvalues;
  pvalues.reserve(results.size());
  for (const auto& r : results) pvalues.push_back(r.p_value);
  const std::vector<double> alpha{0.05};
  const auto series = make_ppseries(pvalues, alpha);
  out << "stimuli: " << results.size() << '\n'
      << "fraction with p <= 0.05: " << numfmt::fixed(series.ecdf[0], 4) << '\n'
      << "band upper at 0.05: " << numfmt::fixed(series.band_upper[0], 4) << '\n'
      << "exceeds band: " << (series.ecdf[0] > series.band_upper[0] ? "yes" : "no") << '\n';
}

void write_plot(const std::vector<GofResult>& results, const std::filesystem::path& base, double conf,
                std::ostream& out) {
  std::vector<double> pvalues;
  for (const auto& r : results) pvalues.push_back(r.p_value);
  const auto thresholds = default_thresholds();
  render_ppplot(make_ppseries(pvalues, thresholds, conf), base);
  out << "wrote " << base.string() << ".svg and " << base.string() << ".csv\n";
}

}  // namespace

std::pair<std::size_t, std::size_t> chunk_bounds(std::size_t len, std::size_t chunks, std::size_t index) {
  if (chunks < 1) throw DomainError("chunk count must be at least 1");
  if (index >= chunks)
    throw DomainError("chunk index " + std::to_string(index) + " not below chunk count " + std::to_string(chunks));
  const std::size_t base = len / chunks;
  const std::size_t extra = len % chunks;
  const std::size_t begin = index * base + std::min(index, extra);
  const std::size_t size = base + (index < extra ? 1 : 0);
  return {begin, begin + size};
}

std::vector<std::size_t> sample_indices(std::size_t count, std::size_t n, std::uint64_t master_seed) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t take = std::min(n, count);
  Rng rng(mix_seed(master_seed, "stimulus-sample"));
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, count - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  return idx;
}

StimulusTable select_stimuli(const StimulusTable& table, const GofOptions& options) {
  StimulusTable selected;
  if (options.stimuli_list) {
    std::set<std::string> wanted(options.stimuli_list->begin(), options.stimuli_list->end());
    for (const auto& entry : table)
      if (wanted.erase(entry.key())) selected.push_back(entry);
    if (!wanted.empty()) {
      std::string missing;
      for (const auto& id : wanted) missing += (missing.empty() ? "" : ", ") + id;
      throw DomainError("stimuli list names unknown stimuli: " + missing);
    }
  } else {
    selected = table;
  }

  if (options.sample_n) {
    StimulusTable sampled;
    for (auto i : sample_indices(selected.size(), *options.sample_n, options.master_seed))
      sampled.push_back(selected[i]);
    selected = std::move(sampled);
  }

  return partition<StimulusEntry>(selected, options.chunks, options.chunk_index);
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<GofResult> run_gof(const StimulusTable& table, const ProbabilityGrid& grid,
                               const GofOptions& options) {
  if (options.bootstrap_t < 1) throw DomainError("bootstrap size must be at least 1");
  const StimulusTable work = select_stimuli(table, options);
  std::vector<GofResult> results(work.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  std::size_t done = 0;

  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      const auto start = std::chrono::steady_clock::now();
      try {
        results[i] = test_stimulus(work[i].key(), work[i].counts, grid, options.bootstrap_t, options.master_seed);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      const auto ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
      std::lock_guard lock(mutex);
      ++done;
      if (options.progress)
        *options.progress << '[' << done << '/' << work.size() << "] " << results[i].stimulus_id
                          << " p=" << numfmt::fixed(results[i].p_value, 6) << ' ' << ms << " ms\n"
                          << std::flush;
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(std::max<std::size_t>(work.size(), 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::sort(results.begin(), results.end(), by_id);
  return results;
}

std::vector<GofResult> merge_results(std::vector<std::vector<GofResult>> parts) {
  std::vector<GofResult> merged;
  for (auto& part : parts)
    for (auto& r : part) merged.push_back(std::move(r));
  std::stable_sort(merged.begin(), merged.end(), by_id);

  std::vector<std::string> duplicates;
  for (std::size_t i = 1; i < merged.size(); ++i)
    if (merged[i].stimulus_id == merged[i - 1].stimulus_id &&
        (duplicates.empty() || duplicates.back() != merged[i].stimulus_id))
      duplicates.push_back(merged[i].stimulus_id);
  if (!duplicates.empty()) {
    std::string ids;
    for (const auto& id : duplicates) ids += (ids.empty() ? "" : ", ") + id;
    throw MergeConflict("duplicate stimulus_id across inputs: " + ids);
  }
  return merged;
}

std::vector<GofResult> merge_result_files(std::span<const std::filesystem::path> paths) {
  std::vector<std::vector<GofResult>> parts;
  parts.reserve(paths.size());
  for (const auto& path : paths) parts.push_back(read_results(path));
  return merge_results(std::move(parts));
}

int run_scenario(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.scenario < 1 || spec.scenario > 5) {
    err << "error: scenario must be one of 1..5, got " << spec.scenario << '\n';
    return kExitUsage;
  }
  const auto require = [&](const std::optional<std::filesystem::path>& path, const char* flag) {
    if (!path) {
      err << "error: scenario " << spec.scenario << " requires " << flag << '\n';
      return kExitUsage;
    }
    if (!std::filesystem::exists(*path)) {
      err << "error: input file '" << path->string() << "' does not exist\n";
      return kExitMissingInput;
    }
    return kExitOk;
  };

  std::filesystem::create_directories(spec.out_dir);
  const auto plot_base = spec.out_dir / "pvalue_ppplot";

  if (spec.scenario == 5) {
    for (ModelId model : {ModelId::Gsd, ModelId::QNormal}) {
      const auto [a1, a2] = default_axes(model, spec.grid_step);
      const auto path = spec.out_dir / (std::string(to_string(model)) + "_grid.csv");
      const auto grid = build_grid(model, a1, a2);
      write_grid(grid, path);
      out << "wrote " << path.string() << " (" << grid.size() << " rows)\n";
    }
    return kExitOk;
  }

  if (spec.scenario == 1) {
    if (int rc = require(spec.results, "--results"); rc != kExitOk) return rc;
    const auto results = read_results(*spec.results);
    if (results.empty()) {
      err << "error: results file has no rows\n";
      return kExitFailure;
    }
    print_summary(results, out);
    write_plot(results, plot_base, spec.band_conf, out);
    return kExitOk;
  }

  if (int rc = require(spec.scores, "--scores"); rc != kExitOk) return rc;
  if (spec.scenario == 2)
    if (int rc = require(spec.stimuli_list, "--stimuli-list"); rc != kExitOk) return rc;
  if (spec.grid)
    if (int rc = require(spec.grid, "--grid"); rc != kExitOk) return rc;

  const auto table = read_responses(*spec.scores);
  const ProbabilityGrid grid = [&] {
    if (spec.grid) return read_grid(*spec.grid);
    const auto [a1, a2] = default_axes(spec.model, spec.grid_step);
    return build_grid(spec.model, a1, a2);
  }();

  GofOptions options;
  options.bootstrap_t = spec.bootstrap_t;
  options.master_seed = spec.master_seed;
  options.jobs = spec.jobs;
  options.chunks = spec.chunks;
  options.chunk_index = spec.chunk_index;
  options.progress = &err;
  if (spec.scenario == 2) options.stimuli_list = read_id_list(*spec.stimuli_list);
  if (spec.scenario == 4) options.sample_n = spec.sample_n;

  const auto results = run_gof(table, grid, options);
  const auto results_path = spec.out_dir / "gtest_results.csv";
  write_results(results, results_path);
  out << "wrote " << results_path.string() << " (" << results.size() << " stimuli)\n";
  if (!results.empty()) {
    print_summary(results, out);
    write_plot(results, plot_base, spec.band_conf, out);
  }
  return kExitOk;
}

}  // namespace consist
