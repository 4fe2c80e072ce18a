#pragma once

// Grid maximum likelihood, the G statistic and the parametric-bootstrap G-test.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "consist/models.hpp"
#include "consist/rng.hpp"

namespace consist {

/// Responses per score; c[0] counts score 1.
struct ScoreCounts {
  std::array<std::uint32_t, kScalePoints> c{};

  std::uint64_t n() const {
    std::uint64_t total = 0;
    for (auto x : c) total += x;
    return total;
  }
  friend bool operator==(const ScoreCounts&, const ScoreCounts&) = default;
};

struct GofResult {
  std::string stimulus_id;
  std::uint64_t n = 0;
  ModelId model = ModelId::Gsd;
  double param1_hat = 0.0;
  double param2_hat = 0.0;
  double g_obs = 0.0;  // +inf when an observed score has zero fitted mass
  double p_value = 0.0;
  std::uint32_t t_bootstrap = 0;
  std::uint64_t seed = 0;  // seed of this stimulus' own stream

  friend bool operator==(const GofResult&, const GofResult&) = default;
};

/// Sum of c[s] ln p[s] over observed scores; -inf if one has p[s] == 0.
double log_likelihood(const ScoreCounts& counts, const Pmf5& pmf);

struct MleFit {
  std::size_t row;
  double param1;
  double param2;
  Pmf5 pmf;
  double loglik;
};

/// Exhaustive search over the grid. Ties go to the earliest row, which is the
/// lexicographically smallest (param1, param2). Throws NoFeasibleModel when
/// every row has zero likelihood.
MleFit fit_mle(const ScoreCounts& counts, const ProbabilityGrid& grid);

/// G = 2 sum O ln(O/E), E = n p. Zero-count bins contribute nothing; an
/// observed bin with E = 0 gives +inf. Results within rounding noise of zero
/// are reported as exactly zero.
double g_statistic(const ScoreCounts& counts, const Pmf5& pmf);

/// Multinomial draw of n responses (inverse CDF per response).
ScoreCounts sample_counts(const Pmf5& pmf, std::uint32_t n, Rng& rng);

/// Fraction of bootstrap statistics at or above g_obs; +inf ties with +inf.
double p_value_from(double g_obs, std::span<const double> g_bootstrap);

/// G statistics of t resamples of size n drawn from `fitted`, each refitted on
/// the grid. Deterministic in the rng state.
std::vector<double> bootstrap_statistics(const Pmf5& fitted, std::uint32_t n,
                                         const ProbabilityGrid& grid, std::uint32_t t, Rng& rng);

/// Parametric-bootstrap G-test of one stimulus. stimulus_id and seed are left
/// for the caller to fill in.
GofResult bootstrap_p_value(const ScoreCounts& counts, const ProbabilityGrid& grid,
                            std::uint32_t t, Rng& rng);

/// bootstrap_p_value on the stream seeded by mix_seed(master_seed, stimulus_id).
GofResult test_stimulus(const std::string& stimulus_id, const ScoreCounts& counts,
                        const ProbabilityGrid& grid, std::uint32_t t, std::uint64_t master_seed);

}  // namespace consist
