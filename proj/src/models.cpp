#include "consist/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "consist/error.hpp"

namespace consist {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Mass of N(0,1) on [a, b], taken from whichever tail keeps precision.
double normal_mass(double a, double b) {
  if (a > 0.0) return normal_sf(a) - normal_sf(b);
  return normal_cdf(b) - normal_cdf(a);
}

void check_psi(double psi) {
  if (!(psi >= 1.0 && psi <= 5.0))
    throw DomainError("psi " + std::to_string(psi) + " outside [1, 5]");
}

Pmf5 point_mass(int score) {
  Pmf5 out;
  out[static_cast<std::size_t>(score - 1)] = 1.0;
  return out;
}

Pmf5 mix(double w, const Pmf5& a, const Pmf5& b) {
  Pmf5 out;
  for (std::size_t s = 0; s < kScalePoints; ++s) out[s] = w * a[s] + (1.0 - w) * b[s];
  return out;
}

// Decimal exponent k <= 9 for which x * 10^k is integral, if any.
int decimal_places(double x) {
  double scale = 1.0;
  for (int k = 0; k <= 9; ++k, scale *= 10.0) {
    const double scaled = x * scale;
    if (std::abs(scaled - std::round(scaled)) < 1e-9 * std::max(1.0, std::abs(scaled))) return k;
  }
  return -1;
}

}  // namespace

double Pmf5::mean() const {
  double m = 0.0;
  for (std::size_t s = 0; s < kScalePoints; ++s) m += static_cast<double>(s + 1) * p[s];
  return m;
}

double Pmf5::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t s = 0; s < kScalePoints; ++s) {
    const double d = static_cast<double>(s + 1) - m;
    v += d * d * p[s];
  }
  return v;
}

bool Pmf5::is_valid(double tol) const {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= tol;
}

Pmf5 Pmf5::reversed() const {
  Pmf5 out;
  std::reverse_copy(p.begin(), p.end(), out.p.begin());
  return out;
}

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::Gsd: return "gsd";
    case ModelId::QNormal: return "qnormal";
  }
  return "unknown";
}

ModelId parse_model_id(std::string_view text) {
  if (text == "gsd") return ModelId::Gsd;
  if (text == "qnormal") return ModelId::QNormal;
  throw DomainError("unknown model '" + std::string(text) + "' (expected gsd or qnormal)");
}

VarianceBounds gsd_variance_bounds(double psi) {
  check_psi(psi);
  const double vmax = (psi - 1.0) * (5.0 - psi);
  const double vmin = (std::ceil(psi) - psi) * (psi - std::floor(psi));
  return {vmin, vmax};
}

Pmf5 gsd_pmf(GsdParams params) {
  const double psi = params.psi;
  const double rho = params.rho;
  check_psi(psi);
  if (!(rho >= 0.0 && rho <= 1.0))
    throw DomainError("rho " + std::to_string(rho) + " outside [0, 1]");

  const auto [vmin, vmax] = gsd_variance_bounds(psi);
  if (psi == 1.0 || psi == 5.0) return point_mass(static_cast<int>(psi));

  const double lo = std::floor(psi);
  const double hi = std::ceil(psi);
  Pmf5 p_min;
  if (lo == hi) {
    p_min = point_mass(static_cast<int>(lo));
  } else {
    p_min[static_cast<std::size_t>(lo) - 1] = hi - psi;
    p_min[static_cast<std::size_t>(hi) - 1] = psi - lo;
  }

  Pmf5 p_max;
  p_max[0] = (5.0 - psi) / 4.0;
  p_max[4] = (psi - 1.0) / 4.0;

  // Score = 1 + Bin(4, q); q and 1-q are formed separately so reversal is exact.
  const double q = (psi - 1.0) / 4.0;
  const double qc = (5.0 - psi) / 4.0;
  static constexpr std::array<double, 5> kChoose4{1.0, 4.0, 6.0, 4.0, 1.0};
  Pmf5 p_bin;
  for (int k = 0; k < kScalePoints; ++k)
    p_bin[static_cast<std::size_t>(k)] =
        kChoose4[static_cast<std::size_t>(k)] * std::pow(q, k) * std::pow(qc, 4 - k);
  const double vbin = vmax / 4.0;

  const double target = rho * vmin + (1.0 - rho) * vmax;
  if (target <= vbin) {
    const double w = (vbin - target) / (vbin - vmin);
    return mix(w, p_min, p_bin);
  }
  const double w = (vmax - target) / (vmax - vbin);
  return mix(w, p_bin, p_max);
}

Pmf5 qnormal_pmf(QNormalParams params) {
  const double mu = params.mu;
  const double sigma = params.sigma;
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("sigma " + std::to_string(sigma) + " must be positive");
  if (!(mu >= 1.0 && mu <= 5.0)) throw DomainError("mu " + std::to_string(mu) + " outside [1, 5]");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Pmf5 out;
  for (int s = 1; s <= kScalePoints; ++s) {
    const double a = s == 1 ? -kInf : (s - 0.5 - mu) / sigma;
    const double b = s == kScalePoints ? kInf : (s + 0.5 - mu) / sigma;
    out[static_cast<std::size_t>(s - 1)] = normal_mass(a, b);
  }
  return out;
}

Pmf5 model_pmf(ModelId model, double param1, double param2) {
  switch (model) {
    case ModelId::Gsd: return gsd_pmf({param1, param2});
    case ModelId::QNormal: return qnormal_pmf({param1, param2});
  }
  throw DomainError("unknown model");
}

std::vector<double> make_axis(const AxisSpec& spec) {
  if (!(spec.step > 0.0) || !std::isfinite(spec.step))
    throw DomainError("axis step must be positive");
  if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || spec.hi < spec.lo)
    throw DomainError("empty axis [" + std::to_string(spec.lo) + ", " + std::to_string(spec.hi) + "]");

  const auto count = static_cast<std::size_t>(std::floor((spec.hi - spec.lo) / spec.step + 1e-9)) + 1;
  std::vector<double> axis;
  axis.reserve(count);

  // Decimal steps are generated as integer ratios so 0.1-style values come out
  // as the nearest double rather than accumulating drift.
  const int k_lo = decimal_places(spec.lo);
  const int k_step = decimal_places(spec.step);
  if (k_lo >= 0 && k_step >= 0) {
    const double scale = std::pow(10.0, std::max(k_lo, k_step));
    const double lo = std::round(spec.lo * scale);
    const double step = std::round(spec.step * scale);
    for (std::size_t i = 0; i < count; ++i)
      axis.push_back((lo + static_cast<double>(i) * step) / scale);
  } else {
    for (std::size_t i = 0; i < count; ++i)
      axis.push_back(spec.lo + static_cast<double>(i) * spec.step);
  }
  if (axis.back() > spec.hi) axis.back() = spec.hi;
  return axis;
}

ProbabilityGrid::ProbabilityGrid(ModelId model, std::vector<GridRow> rows)
    : model_(model), rows_(std::move(rows)) {
  if (rows_.empty()) throw IntegrityError("probability grid has no rows");

  for (const auto& row : rows_) {
    if (axis1_.empty() || row.param1 != axis1_.back()) axis1_.push_back(row.param1);
  }
  const double first = rows_.front().param1;
  for (const auto& row : rows_) {
    if (row.param1 != first) break;
    axis2_.push_back(row.param2);
  }
  if (rows_.size() != axis1_.size() * axis2_.size())
    throw IntegrityError("grid has " + std::to_string(rows_.size()) + " rows, expected " +
                         std::to_string(axis1_.size()) + " x " + std::to_string(axis2_.size()));
  for (std::size_t i = 1; i < axis1_.size(); ++i)
    if (!(axis1_[i] > axis1_[i - 1])) throw IntegrityError("grid param1 values not strictly increasing");
  for (std::size_t j = 1; j < axis2_.size(); ++j)
    if (!(axis2_[j] > axis2_[j - 1])) throw IntegrityError("grid param2 values not strictly increasing");

  log_table_.resize(rows_.size() * kScalePoints);
  const std::size_t n2 = axis2_.size();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.param1 != axis1_[r / n2] || row.param2 != axis2_[r % n2])
      throw IntegrityError("grid row " + std::to_string(r + 1) + " breaks the lattice order");
    if (!row.pmf.is_valid())
      throw IntegrityError("grid row " + std::to_string(r + 1) + " is not a probability distribution");
    for (std::size_t s = 0; s < kScalePoints; ++s)
      log_table_[r * kScalePoints + s] = std::log(row.pmf[s]);
  }
}

ProbabilityGrid build_grid(ModelId model, const AxisSpec& axis1_spec, const AxisSpec& axis2_spec) {
  const auto axis1 = make_axis(axis1_spec);
  const auto axis2 = make_axis(axis2_spec);
  std::vector<GridRow> rows;
  rows.reserve(axis1.size() * axis2.size());
  for (double a : axis1)
    for (double b : axis2) rows.push_back({a, b, model_pmf(model, a, b)});
  return ProbabilityGrid(model, std::move(rows));
}

std::pair<AxisSpec, AxisSpec> default_axes(ModelId model, double step) {
  switch (model) {
    case ModelId::Gsd: return {{1.0, 5.0, step}, {0.0, 1.0, step}};
    case ModelId::QNormal: return {{1.0, 5.0, step}, {0.1, 2.0, step}};
  }
  throw DomainError("unknown model");
}

}  // namespace consist
