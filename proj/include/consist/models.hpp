#pragma once

// Discrete score distributions on the 5-point scale and their probability grids.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace consist {

inline constexpr int kScalePoints = 5;

/// Probability mass over scores 1..5; p[0] is the mass of score 1.
struct Pmf5 {
  std::array<double, kScalePoints> p{};

  double operator[](std::size_t i) const { return p[i]; }
  double& operator[](std::size_t i) { return p[i]; }

  double mean() const;
  double variance() const;
  /// Every entry non-negative and the total within `tol` of one.
  bool is_valid(double tol = 1e-12) const;
  Pmf5 reversed() const;

  friend bool operator==(const Pmf5&, const Pmf5&) = default;
};

struct GsdParams {
  double psi;  // mean score, [1, 5]
  double rho;  // dispersion, [0, 1]; 1 is the least spread
};

struct QNormalParams {
  double mu;     // latent mean in score units, [1, 5]
  double sigma;  // latent standard deviation, > 0
};

enum class ModelId { Gsd, QNormal };

std::string_view to_string(ModelId id);
/// Accepts "gsd" or "qnormal"; throws DomainError otherwise.
ModelId parse_model_id(std::string_view text);

struct VarianceBounds {
  double vmin;
  double vmax;
};

/// Smallest and largest variance a distribution on 1..5 with mean psi can have.
VarianceBounds gsd_variance_bounds(double psi);

/// GSD pmf with mean exactly psi and variance rho*vmin + (1-rho)*vmax.
///
/// Built as a mixture of equal-mean components: the two-point minimum-variance
/// distribution, the shifted binomial 1 + Bin(4, (psi-1)/4) and the two-point
/// {1,5} maximum-variance distribution. For rho above the binomial's own rho the
/// pmf mixes min-variance and binomial, below it mixes binomial and max-variance.
Pmf5 gsd_pmf(GsdParams params);

/// Latent N(mu, sigma^2) binned at the half-integers; tails fold into 1 and 5.
Pmf5 qnormal_pmf(QNormalParams params);

/// Dispatches on the model: param1/param2 are (psi, rho) or (mu, sigma).
Pmf5 model_pmf(ModelId model, double param1, double param2);

struct AxisSpec {
  double lo;
  double hi;
  double step;
};

/// lo, lo+step, ... up to hi inclusive (hi within 1e-9 of a step counts).
std::vector<double> make_axis(const AxisSpec& spec);

struct GridRow {
  double param1;
  double param2;
  Pmf5 pmf;
};

/// Dense table of model pmfs over axis1 x axis2, rows in lexicographic order.
///
/// The constructor rejects anything that is not a full, duplicate-free,
/// strictly ordered lattice of valid pmfs (IntegrityError). A flat table of
/// log-probabilities is precomputed for the maximum-likelihood search.
class ProbabilityGrid {
 public:
  ProbabilityGrid(ModelId model, std::vector<GridRow> rows);

  ModelId model() const noexcept { return model_; }
  const std::vector<double>& axis1() const noexcept { return axis1_; }
  const std::vector<double>& axis2() const noexcept { return axis2_; }
  const std::vector<GridRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  /// log p for row r at index 5*r + s; -inf where p is zero.
  std::span<const double> log_table() const noexcept { return log_table_; }

  friend bool operator==(const ProbabilityGrid& a, const ProbabilityGrid& b) {
    return a.model_ == b.model_ && a.rows_ == b.rows_;
  }

 private:
  ModelId model_;
  std::vector<double> axis1_;
  std::vector<double> axis2_;
  std::vector<GridRow> rows_;
  std::vector<double> log_table_;
};

inline bool operator==(const GridRow& a, const GridRow& b) {
  return a.param1 == b.param1 && a.param2 == b.param2 && a.pmf == b.pmf;
}

ProbabilityGrid build_grid(ModelId model, const AxisSpec& axis1, const AxisSpec& axis2);

/// Default lattice: psi/mu over [1,5]; rho over [0,1]; sigma over [0.1,2.0].
std::pair<AxisSpec, AxisSpec> default_axes(ModelId model, double step = 0.01);

}  // namespace consist
