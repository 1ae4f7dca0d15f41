#include "bwl/lab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bwl::lab {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  void pad() {
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

bool usable(double x, double y) { return x > 0 && y > 0 && std::isfinite(x) && std::isfinite(y); }

}  // namespace

std::string render_loglog(const Table& table, const LogLogPlot& plot) {
  const auto xs = table.column(plot.x_column);
  std::vector<std::vector<double>> ys;
  for (const auto& c : plot.y_columns) ys.push_back(table.column(c));

  Range rx, ry;
  for (const auto& y : ys)
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (usable(xs[i], y[i])) {
        rx.add(std::log10(xs[i]));
        ry.add(std::log10(y[i]));
      }
  if (rx.empty()) {
    rx = {0, 1};
    ry = {0, 1};
  }
  rx.pad();
  ry.pad();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double lx) { return kLeft + (lx - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double ly) { return kTop + (ry.hi - ly) / (ry.hi - ry.lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int d = static_cast<int>(std::ceil(rx.lo)); d <= static_cast<int>(std::floor(rx.hi)); ++d)
    svg << "<line x1=\"" << num(px(d)) << "\" y1=\"" << kTop << "\" x2=\"" << num(px(d)) << "\" y2=\""
        << kTop + ph << "\" stroke=\"#ddd\"/><text x=\"" << num(px(d)) << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  for (int d = static_cast<int>(std::ceil(ry.lo)); d <= static_cast<int>(std::floor(ry.hi)); ++d)
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(d)) << "\" x2=\"" << kLeft + pw << "\" y2=\""
        << num(py(d)) << "\" stroke=\"#ddd\"/><text x=\"" << kLeft - 6 << "\" y=\"" << num(py(d) + 4)
        << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(plot.x_column) << "</text>\n";

  for (std::size_t c = 0; c < ys.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (usable(xs[i], ys[c][i]))
        points += num(px(std::log10(xs[i]))) + "," + num(py(std::log10(ys[c][i]))) + " ";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
        << "\"/>\n";
    svg << "<text x=\"" << kLeft + pw - 8 << "\" y=\"" << kTop + 16 + 15 * c << "\" text-anchor=\"end\" fill=\""
        << color << "\">" << escape(plot.y_columns[c]) << "</text>\n";
  }

  if (plot.fit && plot.fit->x_lo > 0 && plot.fit->x_hi > plot.fit->x_lo) {
    const auto& f = *plot.fit;
    auto at = [&](double x) { return (f.intercept + f.slope * std::log(x)) / std::log(10.0); };
    svg << "<line x1=\"" << num(px(std::log10(f.x_lo))) << "\" y1=\"" << num(py(at(f.x_lo))) << "\" x2=\""
        << num(px(std::log10(f.x_hi))) << "\" y2=\"" << num(py(at(f.x_hi)))
        << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    svg << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + ph - 8 << "\">" << escape(f.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bwl::lab
