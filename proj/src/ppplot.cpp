#include "consist/ppplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/math/distributions/normal.hpp>

#include "consist/error.hpp"
#include "consist/numfmt.hpp"

namespace consist {

namespace {

void check_thresholds(std::span<const double> thresholds) {
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    const double a = thresholds[j];
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("threshold outside [0, 1]");
    if (j > 0 && !(a > thresholds[j - 1])) throw DomainError("thresholds must be strictly increasing");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string coord(double v) { return numfmt::fixed(v, 2); }

}  // namespace

std::vector<double> default_thresholds() {
  std::vector<double> out(1000);
  for (int i = 1; i <= 1000; ++i) out[static_cast<std::size_t>(i - 1)] = i / 1000.0;
  return out;
}

std::vector<double> ecdf_points(std::span<const double> pvalues, std::span<const double> thresholds) {
  if (pvalues.empty()) throw DomainError("no p-values");
  check_thresholds(thresholds);
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  for (double p : sorted)
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p-value outside [0, 1]");
  std::sort(sorted.begin(), sorted.end());

  const auto m = static_cast<double>(sorted.size());
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double a : thresholds) {
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), a) - sorted.begin();
    out.push_back(static_cast<double>(below) / m);
  }
  return out;
}

std::vector<double> significance_band(std::size_t m, std::span<const double> thresholds, double conf) {
  if (m < 1) throw DomainError("band needs at least one stimulus");
  if (!(conf > 0.0 && conf < 1.0)) throw DomainError("band confidence must lie in (0, 1)");
  check_thresholds(thresholds);
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), conf);
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double a : thresholds) {
    const double upper = a + z * std::sqrt(a * (1.0 - a) / static_cast<double>(m));
    out.push_back(std::clamp(upper, 0.0, 1.0));
  }
  return out;
}

PPSeries make_ppseries(std::span<const double> pvalues, std::span<const double> thresholds, double conf) {
  PPSeries s;
  s.thresholds.assign(thresholds.begin(), thresholds.end());
  s.ecdf = ecdf_points(pvalues, thresholds);
  s.band_upper = significance_band(pvalues.size(), thresholds, conf);
  s.m = pvalues.size();
  return s;
}

std::string render_svg(const PPSeries& series, const PlotStyle& style) {
  const double plot_w = style.width - style.margin_left - style.margin_right;
  const double plot_h = style.height - style.margin_top - style.margin_bottom;
  const auto px = [&](double x) { return style.margin_left + x * plot_w; };
  const auto py = [&](double y) { return style.margin_top + (1.0 - y) * plot_h; };
  const auto polyline = [&](const std::vector<double>& ys) {
    std::string pts;
    for (std::size_t j = 0; j < series.thresholds.size(); ++j) {
      if (j) pts += ' ';
      pts += coord(px(series.thresholds[j]));
      pts += ',';
      pts += coord(py(ys[j]));
    }
    return pts;
  };

  const std::string w = std::to_string(style.width);
  const std::string h = std::to_string(style.height);
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h +
         "\" viewBox=\"0 0 " + w + " " + h + "\" data-style=\"" + style.name + "\">\n";
  svg += "<style>\n";
  svg += "text { font-family: " + std::string(style.font_family) + "; font-size: " +
         std::to_string(style.font_size) + "px; fill: #000000; }\n";
  svg += ".tick { font-size: " + std::to_string(style.tick_font_size) + "px; }\n";
  svg += ".frame { fill: none; stroke: #000000; stroke-width: 1; }\n";
  svg += ".diagonal { fill: none; stroke: " + std::string(style.diagonal_color) +
         "; stroke-width: " + numfmt::fixed(style.guide_width, 1) + "; }\n";
  svg += ".band { fill: none; stroke: " + std::string(style.band_color) +
         "; stroke-width: " + numfmt::fixed(style.guide_width, 1) + "; stroke-dasharray: 6 4; }\n";
  svg += ".ecdf { fill: none; stroke: " + std::string(style.ecdf_color) +
         "; stroke-width: " + numfmt::fixed(style.ecdf_width, 1) + "; }\n";
  svg += "</style>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h + "\" fill=\"#ffffff\"/>\n";
  svg += "<rect class=\"frame\" x=\"" + coord(px(0)) + "\" y=\"" + coord(py(1)) + "\" width=\"" +
         coord(plot_w) + "\" height=\"" + coord(plot_h) + "\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    const std::string label = numfmt::fixed(v, 1);
    svg += "<line class=\"frame\" x1=\"" + coord(px(v)) + "\" y1=\"" + coord(py(0)) + "\" x2=\"" +
           coord(px(v)) + "\" y2=\"" + coord(py(0) + 5) + "\"/>\n";
    svg += "<text class=\"tick\" x=\"" + coord(px(v)) + "\" y=\"" + coord(py(0) + 18) +
           "\" text-anchor=\"middle\">" + label + "</text>\n";
    svg += "<line class=\"frame\" x1=\"" + coord(px(0) - 5) + "\" y1=\"" + coord(py(v)) + "\" x2=\"" +
           coord(px(0)) + "\" y2=\"" + coord(py(v)) + "\"/>\n";
    svg += "<text class=\"tick\" x=\"" + coord(px(0) - 8) + "\" y=\"" + coord(py(v) + 4) +
           "\" text-anchor=\"end\">" + label + "</text>\n";
  }

  svg += "<line class=\"diagonal\" x1=\"" + coord(px(0)) + "\" y1=\"" + coord(py(0)) + "\" x2=\"" +
         coord(px(1)) + "\" y2=\"" + coord(py(1)) + "\"/>\n";
  svg += "<polyline class=\"band\" points=\"" + polyline(series.band_upper) + "\"/>\n";
  svg += "<polyline class=\"ecdf\" points=\"" + polyline(series.ecdf) + "\"/>\n";

  svg += "<text x=\"" + coord(px(0.5)) + "\" y=\"" + coord(style.height - 15.0) +
         "\" text-anchor=\"middle\">theoretical uniform distribution</text>\n";
  const double yl_x = 20.0;
  const double yl_y = py(0.5);
  svg += "<text x=\"" + coord(yl_x) + "\" y=\"" + coord(yl_y) + "\" text-anchor=\"middle\" transform=\"rotate(-90 " +
         coord(yl_x) + " " + coord(yl_y) + ")\">empirical fraction p \xE2\x89\xA4 \xCE\xB1</text>\n";
  svg += "<text class=\"tick\" x=\"" + coord(px(0.03)) + "\" y=\"" + coord(py(0.95)) + "\">m = " +
         std::to_string(series.m) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::string render_csv(const PPSeries& series) {
  std::string csv = "alpha,ecdf,band_upper\n";
  for (std::size_t j = 0; j < series.thresholds.size(); ++j) {
    csv += numfmt::fixed(series.thresholds[j], 6);
    csv += ',';
    csv += numfmt::fixed(series.ecdf[j], 6);
    csv += ',';
    csv += numfmt::fixed(series.band_upper[j], 6);
    csv += '\n';
  }
  return csv;
}

void render_ppplot(const PPSeries& series, const std::filesystem::path& base, const PlotStyle& style) {
  if (series.ecdf.size() != series.thresholds.size() || series.band_upper.size() != series.thresholds.size())
    throw DomainError("P-P series columns differ in length");
  auto svg_path = base;
  svg_path += ".svg";
  auto csv_path = base;
  csv_path += ".csv";
  write_text(svg_path, render_svg(series, style));
  write_text(csv_path, render_csv(series));
}

}  // namespace consist
