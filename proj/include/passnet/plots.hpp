#pragma once

// Minimal self-contained SVG plots: profile overlays and histograms.
// Numbers are printed with fixed precision so identical input gives
// identical bytes.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "passnet/pipeline.hpp"

namespace passnet {

struct Series {
  std::string name;
  std::vector<double> values;
  std::string color;
};

struct PlotFrame {
  double width{720};
  double height{360};
  double left{56};
  double right{16};
  double top{32};
  double bottom{40};
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string f2(double x) {
  if (std::abs(x) < 0.005) x = 0.0;
  return fmt::format("{:.2f}", x);
}

struct Axes {
  PlotFrame f;
  double x0, x1, y0, y1;

  double px(double x) const { return f.left + (x - x0) / (x1 - x0) * (f.width - f.left - f.right); }
  double py(double y) const { return f.height - f.bottom - (y - y0) / (y1 - y0) * (f.height - f.top - f.bottom); }
};

inline std::string svg_open(const PlotFrame& f, std::string_view title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"18\" font-size=\"13\">{3}</text>\n",
      f2(f.width), f2(f.height), f2(f.left), xml_escape(title));
}

inline std::string axes_svg(const Axes& a, std::size_t x_ticks, std::string_view xlabel, std::string_view ylabel) {
  std::string s;
  const double xl = a.px(a.x0), xr = a.px(a.x1), yb = a.py(a.y0), yt = a.py(a.y1);
  s += fmt::format("<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n<path d=\"M{} {} L{} {} L{} {}\"/>\n</g>\n",
                   f2(xl), f2(yt), f2(xl), f2(yb), f2(xr), f2(yb));
  for (int k = 0; k <= 4; ++k) {
    const double v = a.y0 + (a.y1 - a.y0) * k / 4.0;
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", f2(xl - 4), f2(a.py(v) + 4),
                     fmt::format("{:.3g}", v));
    if (a.y0 < 0 && v == 0.0)
      s += fmt::format("<path d=\"M{} {} L{} {}\" stroke=\"#999\" stroke-dasharray=\"3 3\"/>\n", f2(xl), f2(a.py(0)),
                       f2(xr), f2(a.py(0)));
  }
  const std::size_t step = x_ticks > 20 ? 4 : 1;
  for (std::size_t i = 0; i < x_ticks; i += step)
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", f2(a.px(static_cast<double>(i))),
                     f2(yb + 14), i);
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", f2((xl + xr) / 2), f2(yb + 30),
                   xml_escape(xlabel));
  s += fmt::format("<text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">{}</text>\n",
                   f2((yt + yb) / 2), f2((yt + yb) / 2), xml_escape(ylabel));
  return s;
}

inline std::string legend_svg(const PlotFrame& f, const std::vector<Series>& series) {
  std::string s;
  double y = f.top + 4;
  for (const auto& se : series) {
    const double x = f.width - f.right - 120;
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"3\" fill=\"{}\"/>\n", f2(x), f2(y), se.color);
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", f2(x + 16), f2(y + 5), xml_escape(se.name));
    y += 14;
  }
  return s;
}

}  // namespace detail

// Overlaid line profiles sharing an x index (motif or orbit number).
inline std::string profile_svg(std::string_view title, const std::vector<Series>& series, std::string_view xlabel,
                               std::string_view ylabel, std::optional<std::pair<double, double>> yrange = {},
                               PlotFrame frame = {}) {
  std::size_t n = 0;
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (yrange) std::tie(lo, hi) = *yrange;
  if (hi <= lo) hi = lo + 1.0;
  const detail::Axes a{frame, 0.0, static_cast<double>(std::max<std::size_t>(n, 2) - 1), lo, hi};
  std::string s = detail::svg_open(frame, title);
  s += detail::axes_svg(a, n, xlabel, ylabel);
  for (const auto& se : series) {
    std::string d;
    for (std::size_t i = 0; i < se.values.size(); ++i)
      d += fmt::format("{}{} {}", i == 0 ? "M" : " L", detail::f2(a.px(static_cast<double>(i))),
                       detail::f2(a.py(se.values[i])));
    s += fmt::format("<g class=\"series\" data-name=\"{}\" data-points=\"{}\">\n", detail::xml_escape(se.name),
                     se.values.size());
    s += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", d, se.color);
    for (std::size_t i = 0; i < se.values.size(); ++i)
      s += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n", detail::f2(a.px(static_cast<double>(i))),
                       detail::f2(a.py(se.values[i])), se.color);
    s += "</g>\n";
  }
  if (series.size() > 1) s += detail::legend_svg(frame, series);
  s += "</svg>\n";
  return s;
}

inline std::string histogram_svg(std::string_view title, std::vector<double> values, std::size_t bins = 20,
                                 PlotFrame frame = {}) {
  std::sort(values.begin(), values.end());
  double lo = values.empty() ? 0.0 : values.front();
  double hi = values.empty() ? 1.0 : values.back();
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    ++counts[std::min(b, bins - 1)];
  }
  const double top = static_cast<double>(std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end())));
  const detail::Axes a{frame, lo, hi, 0.0, top};
  std::string s = detail::svg_open(frame, title);
  const double xl = a.px(lo), xr = a.px(hi), yb = a.py(0), yt = a.py(top);
  s += fmt::format("<path d=\"M{} {} L{} {} L{} {}\" stroke=\"black\" fill=\"none\"/>\n", detail::f2(xl),
                   detail::f2(yt), detail::f2(xl), detail::f2(yb), detail::f2(xr), detail::f2(yb));
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", detail::f2(a.px(v)),
                     detail::f2(yb + 14), fmt::format("{:.3g}", v));
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", detail::f2(xl - 4), detail::f2(yt + 4),
                   static_cast<std::size_t>(top));
  s += fmt::format("<g class=\"bars\" data-count=\"{}\">\n", values.size());
  const double bw = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    if (counts[b] == 0) continue;
    const double x = a.px(lo + bw * static_cast<double>(b));
    const double w = a.px(lo + bw * static_cast<double>(b + 1)) - x;
    const double y = a.py(static_cast<double>(counts[b]));
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#4477aa\" stroke=\"white\"/>\n",
                     detail::f2(x), detail::f2(y), detail::f2(w), detail::f2(yb - y));
  }
  s += "</g>\n</svg>\n";
  return s;
}

inline constexpr const char* kBeforeColor = "#4477aa";
inline constexpr const char* kAfterColor = "#cc6677";

inline std::string opp_overlay_svg(std::string_view title, const std::vector<double>& before,
                                   const std::vector<double>& after) {
  return profile_svg(title, {{"before", before, kBeforeColor}, {"after", after, kAfterColor}}, "orbit",
                     "occurrences per player");
}

inline std::string significance_svg(std::string_view title, const std::vector<Series>& series) {
  return profile_svg(title, series, "motif", "SP", std::pair{-1.0, 1.0});
}

struct PlotSummary {
  std::vector<fs::path> files;
};

// Writes plots/ under `root`: an OPP overlay per split, a significance
// overlay per (match, team) and a histogram per aggregated delta measure.
inline PlotSummary emit_plots(const AnalysisResults& r, const fs::path& root) {
  PlotSummary out;
  const fs::path dir = root / "plots";
  auto put = [&](const fs::path& p, const std::string& svg) {
    detail::write_file(p, svg);
    out.files.push_back(p);
  };

  std::map<std::tuple<std::string, std::int64_t, std::string>, const ProfileRow*> opp;
  for (const auto& row : r.opp) opp[{row.match_id, row.team.value, row.window}] = &row;
  for (const auto& [key, before] : opp) {
    const auto& [match, team, window] = key;
    if (!window.ends_with(".before")) continue;
    const std::string ev = window.substr(0, window.size() - 7);
    auto it = opp.find({match, team, ev + ".after"});
    if (it == opp.end()) continue;
    put(dir / "opp" / fmt::format("{}_{}_{}.svg", match, team, ev),
        opp_overlay_svg(fmt::format("OPP {} team {} {}", match, team, ev), before->values, it->second->values));
  }

  std::map<std::pair<std::string, std::int64_t>, std::vector<Series>> sig;
  for (const auto& row : r.significance) {
    const std::string color = row.window == "whole"           ? "#222222"
                              : row.window.ends_with(".before") ? kBeforeColor
                                                                : kAfterColor;
    sig[{row.match_id, row.team.value}].push_back(
        {row.window, {row.profile.sp.begin(), row.profile.sp.end()}, color});
  }
  for (const auto& [key, series] : sig)
    put(dir / "significance" / fmt::format("{}_{}.svg", key.first, key.second),
        significance_svg(fmt::format("Significance profile {} team {}", key.first, key.second), series));

  std::map<std::pair<std::string, std::string>, std::vector<double>> deltas;
  for (const auto& row : r.centrality)
    if (row.delta) deltas[{std::string(to_string(row.event)), row.measure}].push_back(*row.delta);
  for (const auto& row : r.intensity)
    if (row.delta.delta) deltas[{std::string(to_string(row.delta.event)), "intensity"}].push_back(*row.delta.delta);
  for (const auto& [key, values] : deltas)
    put(dir / "histograms" / fmt::format("{}_{}.svg", key.first, key.second),
        histogram_svg(fmt::format("{} delta {}", key.second, key.first), values));
  return out;
}

}  // namespace passnet
