#pragma once

// p-value P-P plot: fraction of stimuli with p <= alpha against alpha, with a
// one-sided upper significance band, rendered as SVG plus a data CSV.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace consist {

struct PPSeries {
  std::vector<double> thresholds;  // alpha, strictly increasing in [0, 1]
  std::vector<double> ecdf;        // fraction of p-values <= alpha
  std::vector<double> band_upper;
  std::size_t m = 0;
};

/// 0.001, 0.002, ..., 1.000
std::vector<double> default_thresholds();

/// ecdf[j] = #{i : p_i <= thresholds[j]} / m.
std::vector<double> ecdf_points(std::span<const double> pvalues, std::span<const double> thresholds);

/// alpha + z_conf * sqrt(alpha (1 - alpha) / m), clamped to [0, 1].
std::vector<double> significance_band(std::size_t m, std::span<const double> thresholds, double conf);

PPSeries make_ppseries(std::span<const double> pvalues, std::span<const double> thresholds,
                       double conf = 0.95);

/// Fixed plot style. Bump `name` whenever any field changes.
struct PlotStyle {
  const char* name = "consist-pp-v1";
  int width = 480;
  int height = 480;
  int margin_left = 70;
  int margin_right = 20;
  int margin_top = 20;
  int margin_bottom = 60;
  const char* font_family = "DejaVu Sans, Helvetica, Arial, sans-serif";
  int font_size = 14;
  int tick_font_size = 11;
  const char* ecdf_color = "#1f77b4";
  const char* diagonal_color = "#555555";
  const char* band_color = "#d62728";
  double ecdf_width = 1.8;
  double guide_width = 1.0;
};

std::string render_svg(const PPSeries& series, const PlotStyle& style = {});
std::string render_csv(const PPSeries& series);

/// Writes `<base>.svg` and `<base>.csv`; throws IoError if either fails.
void render_ppplot(const PPSeries& series, const std::filesystem::path& base,
                   const PlotStyle& style = {});

}  // namespace consist
