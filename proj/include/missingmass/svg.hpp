/**
 * Minimal static SVG line charts for experiment output.
 * Output is deterministic: fixed palette, fixed float formatting, no
 * timestamps, so identical inputs produce byte-identical files.
 */

#ifndef MISSINGMASS_SVG_HPP
#define MISSINGMASS_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace missingmass {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;  // bounds are drawn dashed, estimators solid
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f6fb2", "#d1495b", "#3a7d44", "#8d6a9f",
                                 "#c77b30", "#4f8f8b", "#93552c", "#5c5c8a"};
  return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

}  // namespace detail

inline void write_svg_plot(std::ostream& out, const PlotSpec& spec) {
  const double width = 860, height = 520;
  const double ml = 78, mr = 190, mt = 46, mb = 58;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool have = false;
  for (const auto& s : spec.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = s.y[i];
      if (!std::isfinite(y)) continue;
      if (spec.log_y && !(y > 0.0)) continue;
      if (!have) {
        xmin = xmax = s.x[i];
        ymin = ymax = y;
        have = true;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (!have) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (spec.log_y) {
    ymin = std::log10(ymin);
    ymax = std::log10(ymax);
  }
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = 0.06 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) {
    const double v = spec.log_y ? std::log10(y) : y;
    return mt + ph - (v - ymin) / (ymax - ymin) * ph;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << (ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << detail::xml_escape(spec.title)
      << "</text>\n";

  // frame and ticks
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / nticks;
    out << "<line x1=\"" << detail::fmt(px(fx)) << "\" y1=\"" << (mt + ph) << "\" x2=\""
        << detail::fmt(px(fx)) << "\" y2=\"" << (mt + ph + 5) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << detail::fmt(px(fx)) << "\" y=\"" << (mt + ph + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::fmt(fx) << "</text>\n";
    const double fy = ymin + (ymax - ymin) * i / nticks;
    const double yv = spec.log_y ? std::pow(10.0, fy) : fy;
    const double ypix = mt + ph - (fy - ymin) / (ymax - ymin) * ph;
    out << "<line x1=\"" << (ml - 5) << "\" y1=\"" << detail::fmt(ypix) << "\" x2=\"" << ml
        << "\" y2=\"" << detail::fmt(ypix) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << (ml - 8) << "\" y=\"" << detail::fmt(ypix + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::fmt(yv) << "</text>\n";
  }
  out << "<text x=\"" << (ml + pw / 2) << "\" y=\"" << (height - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << detail::xml_escape(spec.x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"" << (mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 " << (mt + ph / 2) << ")\">"
      << detail::xml_escape(spec.y_label + (spec.log_y ? " (log scale)" : "")) << "</text>\n";

  // series
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    std::string points;
    bool open = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = s.y[i];
      const bool ok = std::isfinite(y) && (!spec.log_y || y > 0.0);
      if (!ok) {
        if (open) {
          out << "<polyline fill=\"none\" stroke=\"" << detail::palette(si)
              << "\" stroke-width=\"1.8\""
              << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << points
              << "\"/>\n";
          points.clear();
          open = false;
        }
        continue;
      }
      points += detail::fmt(px(s.x[i])) + "," + detail::fmt(py(y)) + " ";
      open = true;
      out << "<circle cx=\"" << detail::fmt(px(s.x[i])) << "\" cy=\"" << detail::fmt(py(y))
          << "\" r=\"2.4\" fill=\"" << detail::palette(si) << "\"/>\n";
    }
    if (open)
      out << "<polyline fill=\"none\" stroke=\"" << detail::palette(si)
          << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
          << " points=\"" << points << "\"/>\n";
    // legend entry
    const double ly = mt + 14 + 18 * static_cast<double>(si);
    out << "<line x1=\"" << (ml + pw + 12) << "\" y1=\"" << ly << "\" x2=\"" << (ml + pw + 34)
        << "\" y2=\"" << ly << "\" stroke=\"" << detail::palette(si) << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    std::string label = s.label;
    if (label.size() > 26) label = label.substr(0, 25) + "~";
    out << "<text x=\"" << (ml + pw + 40) << "\" y=\"" << (ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace missingmass

#endif  // MISSINGMASS_SVG_HPP
