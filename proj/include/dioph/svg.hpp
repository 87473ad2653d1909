#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dioph/error.hpp"
#include "dioph/interval_set.hpp"
#include "dioph/rat.hpp"

namespace dioph {

namespace detail {

inline std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
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

}  // namespace detail

// One bar per row over the x-range [0, 1]; optional tick marks (e.g.
// convergents of alpha). A pure function of its input.
inline std::string render_svg(const std::vector<std::pair<std::string, IntervalSet>>& rows,
                              const std::vector<Rat>& ticks = {}) {
  if (rows.empty()) throw UsageError("render_svg needs at least one row");
  constexpr double kLabel = 160, kPlot = 800, kRow = 24, kBar = 16, kTop = 20, kAxis = 30;
  const double width = kLabel + kPlot + 20;
  const double height = kTop + kRow * static_cast<double>(rows.size()) + kAxis;
  auto X = [&](const Rat& x) { return kLabel + kPlot * x.to_double(); };
  using detail::fmt_coord;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt_coord(width) << "\" height=\""
     << fmt_coord(height) << "\" font-family=\"monospace\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double y = kTop + kRow * static_cast<double>(i);
    os << "<text x=\"4\" y=\"" << fmt_coord(y + kBar - 4) << "\">" << detail::xml_escape(rows[i].first) << "</text>\n";
    os << "<rect x=\"" << fmt_coord(kLabel) << "\" y=\"" << fmt_coord(y) << "\" width=\"" << fmt_coord(kPlot)
       << "\" height=\"" << fmt_coord(kBar) << "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (const auto& iv : rows[i].second.intervals()) {
      // Degenerate pieces still get a visible hairline.
      double w = std::max(X(iv.hi) - X(iv.lo), 0.5);
      os << "<rect x=\"" << fmt_coord(X(iv.lo)) << "\" y=\"" << fmt_coord(y) << "\" width=\"" << fmt_coord(w)
         << "\" height=\"" << fmt_coord(kBar) << "\" fill=\"#246\"/>\n";
    }
  }
  double axis_y = kTop + kRow * static_cast<double>(rows.size()) + 4;
  os << "<line x1=\"" << fmt_coord(kLabel) << "\" y1=\"" << fmt_coord(axis_y) << "\" x2=\"" << fmt_coord(kLabel + kPlot)
     << "\" y2=\"" << fmt_coord(axis_y) << "\" stroke=\"#000\"/>\n";
  for (int k = 0; k <= 10; ++k) {
    Rat x(k, 10);
    os << "<text x=\"" << fmt_coord(X(x) - 8) << "\" y=\"" << fmt_coord(axis_y + 16) << "\">" << to_decimal(x, 1)
       << "</text>\n";
  }
  for (const auto& t : ticks) {
    if (t < Rat(0) || Rat(1) < t) continue;
    os << "<line x1=\"" << fmt_coord(X(t)) << "\" y1=\"" << fmt_coord(kTop - 4) << "\" x2=\"" << fmt_coord(X(t))
       << "\" y2=\"" << fmt_coord(axis_y) << "\" stroke=\"#c33\" stroke-width=\"0.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace dioph
