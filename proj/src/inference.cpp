#include "consist/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "consist/error.hpp"

namespace consist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Counts with n < 4096 pack into 60 bits, which keys the per-stimulus refit cache.
constexpr std::uint64_t kPackableN = 1u << 12;

std::uint64_t pack(const ScoreCounts& counts) {
  std::uint64_t key = 0;
  for (auto x : counts.c) key = (key << 12) | x;
  return key;
}

}  // namespace

double log_likelihood(const ScoreCounts& counts, const Pmf5& pmf) {
  double ll = 0.0;
  for (std::size_t s = 0; s < kScalePoints; ++s) {
    if (counts.c[s] == 0) continue;
    ll += static_cast<double>(counts.c[s]) * std::log(pmf[s]);
  }
  return ll;
}

MleFit fit_mle(const ScoreCounts& counts, const ProbabilityGrid& grid) {
  // Only observed bins enter the sum, which also keeps 0 * log(0) out of it.
  std::array<std::size_t, kScalePoints> bins{};
  std::array<double, kScalePoints> weights{};
  std::size_t active = 0;
  for (std::size_t s = 0; s < kScalePoints; ++s) {
    if (counts.c[s] == 0) continue;
    bins[active] = s;
    weights[active] = static_cast<double>(counts.c[s]);
    ++active;
  }

  const auto table = grid.log_table();
  const std::size_t rows = grid.size();
  double best = -kInf;
  std::size_t best_row = rows;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* lp = table.data() + r * kScalePoints;
    double ll = 0.0;
    for (std::size_t k = 0; k < active; ++k) ll += weights[k] * lp[bins[k]];
    if (ll > best) {
      best = ll;
      best_row = r;
    }
  }
  if (best_row == rows) throw NoFeasibleModel();
  const auto& row = grid.rows()[best_row];
  return {best_row, row.param1, row.param2, row.pmf, best};
}

double g_statistic(const ScoreCounts& counts, const Pmf5& pmf) {
  const auto n = static_cast<double>(counts.n());
  double sum = 0.0;
  for (std::size_t s = 0; s < kScalePoints; ++s) {
    if (counts.c[s] == 0) continue;
    const double observed = counts.c[s];
    const double expected = n * pmf[s];
    if (expected <= 0.0) return kInf;
    sum += observed * std::log(observed / expected);
  }
  const double g = 2.0 * sum;
  return g <= 1e-12 * std::max(1.0, n) ? 0.0 : g;
}

ScoreCounts sample_counts(const Pmf5& pmf, std::uint32_t n, Rng& rng) {
  std::array<double, kScalePoints> cdf{};
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t s = 0; s < kScalePoints; ++s) {
    acc += pmf[s];
    cdf[s] = acc;
    if (pmf[s] > 0.0) last = s;
  }
  // Rounding in the running sum must not leak mass past the last supported bin.
  for (std::size_t s = last; s < kScalePoints; ++s) cdf[s] = 1.0;

  ScoreCounts out;
  for (std::uint32_t i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    std::size_t s = 0;
    while (u >= cdf[s]) ++s;
    ++out.c[s];
  }
  return out;
}

double p_value_from(double g_obs, std::span<const double> g_bootstrap) {
  if (g_bootstrap.empty()) throw DomainError("bootstrap sample is empty");
  const auto hits = std::count_if(g_bootstrap.begin(), g_bootstrap.end(),
                                  [g_obs](double g) { return g >= g_obs; });
  return static_cast<double>(hits) / static_cast<double>(g_bootstrap.size());
}

std::vector<double> bootstrap_statistics(const Pmf5& fitted, std::uint32_t n,
                                         const ProbabilityGrid& grid, std::uint32_t t, Rng& rng) {
  if (t < 1) throw DomainError("bootstrap size must be at least 1");
  if (n < 1) throw DomainError("sample size must be at least 1");

  // The refit statistic is a pure function of the resampled counts, and small
  // panels repeat count vectors often, so refits are memoised per call.
  const bool cacheable = n < kPackableN;
  std::unordered_map<std::uint64_t, double> cache;

  std::vector<double> stats;
  stats.reserve(t);
  for (std::uint32_t b = 0; b < t; ++b) {
    const ScoreCounts resample = sample_counts(fitted, n, rng);
    if (cacheable) {
      const auto key = pack(resample);
      if (auto it = cache.find(key); it != cache.end()) {
        stats.push_back(it->second);
        continue;
      }
      const double g = g_statistic(resample, fit_mle(resample, grid).pmf);
      cache.emplace(key, g);
      stats.push_back(g);
    } else {
      stats.push_back(g_statistic(resample, fit_mle(resample, grid).pmf));
    }
  }
  return stats;
}

GofResult bootstrap_p_value(const ScoreCounts& counts, const ProbabilityGrid& grid,
                            std::uint32_t t, Rng& rng) {
  if (t < 1) throw DomainError("bootstrap size must be at least 1");
  const auto n = counts.n();
  if (n < 1) throw DomainError("stimulus has no responses");
  if (n > UINT32_MAX) throw DomainError("stimulus has too many responses");

  const MleFit fit = fit_mle(counts, grid);
  const double g_obs = g_statistic(counts, fit.pmf);
  const auto stats = bootstrap_statistics(fit.pmf, static_cast<std::uint32_t>(n), grid, t, rng);

  GofResult result;
  result.n = n;
  result.model = grid.model();
  result.param1_hat = fit.param1;
  result.param2_hat = fit.param2;
  result.g_obs = g_obs;
  result.p_value = p_value_from(g_obs, stats);
  result.t_bootstrap = t;
  return result;
}

GofResult test_stimulus(const std::string& stimulus_id, const ScoreCounts& counts,
                        const ProbabilityGrid& grid, std::uint32_t t, std::uint64_t master_seed) {
  const std::uint64_t seed = mix_seed(master_seed, stimulus_id);
  Rng rng(seed);
  GofResult result = bootstrap_p_value(counts, grid, t, rng);
  result.stimulus_id = stimulus_id;
  result.seed = seed;
  return result;
}

}  // namespace consist
