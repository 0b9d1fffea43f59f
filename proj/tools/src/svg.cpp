#include "narr/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

#include "narr/error.hpp"
#include "narr/evaluation.hpp"

namespace narr::cli {

namespace {

constexpr std::array kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fixed2(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return {buf.data(), res.ptr};
}

std::string point(double x, double y) { return fixed2(x) + "," + fixed2(y); }

std::string star(double cx, double cy, double r) {
  std::string pts;
  for (int k = 0; k < 10; ++k) {
    const double a = -std::numbers::pi / 2.0 + k * std::numbers::pi / 5.0;
    const double rr = k % 2 == 0 ? r : r * 0.45;
    if (k != 0) pts += ' ';
    pts += point(cx + rr * std::cos(a), cy + rr * std::sin(a));
  }
  return pts;
}

}  // namespace

std::string render_svg(const StorySeries& story, const std::set<std::size_t>& gold, const PlotStyle& style) {
  if (style.width <= 2 * style.margin || style.height <= 2 * style.margin) {
    throw ValidationError("plot canvas is smaller than its margins");
  }
  const std::size_t n = story.length();
  const double left = style.margin;
  const double top = style.margin;
  const double w = style.width - 2.0 * style.margin;
  const double h = style.height - 2.0 * style.margin;
  auto x_of = [&](std::size_t i) { return n <= 1 ? left + w / 2.0 : left + w * static_cast<double>(i) / (n - 1.0); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" fill=\"#ffffff\"/>\n";
  out += "<rect x=\"" + fixed2(left) + "\" y=\"" + fixed2(top) + "\" width=\"" + fixed2(w) + "\" height=\"" +
         fixed2(h) + "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";

  for (std::size_t s = 0; s < story.series.size(); ++s) {
    const auto& v = story.series[s].values;
    if (v.empty()) continue;
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    auto y_of = [&](double value) { return span > 0.0 ? top + h * (1.0 - (value - lo) / span) : top + h / 2.0; };
    const char* colour = kPalette[s % kPalette.size()];

    std::string pts;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i != 0) pts += ' ';
      pts += point(x_of(i), y_of(v[i]));
    }
    out += "<polyline class=\"series\" data-name=\"" + story.series[s].name + "\" fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    for (const auto& p : find_peaks(v)) {
      const double cx = x_of(p.index);
      const double cy = y_of(v[p.index]) - 6.0;
      out += "<polygon class=\"peak\" fill=\"" + std::string(colour) + "\" points=\"" + point(cx, cy - 5.0) + " " +
             point(cx - 4.5, cy + 3.0) + " " + point(cx + 4.5, cy + 3.0) + "\"/>\n";
    }
  }
  for (const auto g : gold) {
    if (g >= n) throw ValidationError("gold index " + std::to_string(g) + " outside story of length " + std::to_string(n));
    out += "<polygon class=\"gold\" fill=\"#e6b800\" stroke=\"#806600\" stroke-width=\"0.5\" points=\"" +
           star(x_of(g), top / 2.0, 7.0) + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace narr::cli
