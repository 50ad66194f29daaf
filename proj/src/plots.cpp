#include "mfopt/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mfopt/errors.hpp"
#include "mfopt/harness.hpp"

namespace mfopt {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                 "#8c564b"};
  return colors[i % 6];
}

struct Scale {
  double x_min, x_max, y_min, y_max;
  double sx(double x) const {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * (kWidth - kMarginLeft - kMarginRight);
  }
  double sy(double y) const {
    return kHeight - kMarginBottom -
           (y - y_min) / (y_max - y_min) * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                     const Scale& s) {
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts += std::to_string(s.sx(xs[i])) + "," + std::to_string(s.sy(ys[i])) + " ";
  }
  return pts;
}

void svg_header(std::ofstream& out, const std::string& title, const std::string& ylabel,
                const Scale& s) {
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
      << "</text>\n";
  // axes
  out << "<line x1='" << kMarginLeft << "' y1='" << kHeight - kMarginBottom << "' x2='"
      << kWidth - kMarginRight << "' y2='" << kHeight - kMarginBottom
      << "' stroke='black'/>\n";
  out << "<line x1='" << kMarginLeft << "' y1='" << kMarginTop << "' x2='" << kMarginLeft
      << "' y2='" << kHeight - kMarginBottom << "' stroke='black'/>\n";
  out << "<text x='" << (kMarginLeft + kWidth - kMarginRight) / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='12'>budget fraction</text>\n";
  out << "<text x='18' y='" << kHeight / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 18 " << kHeight / 2
      << ")'>" << ylabel << "</text>\n";
  // y-axis ticks
  for (int i = 0; i <= 4; ++i) {
    const double y = s.y_min + (s.y_max - s.y_min) * i / 4.0;
    out << "<text x='" << kMarginLeft - 6 << "' y='" << s.sy(y) + 4
        << "' text-anchor='end' font-size='10'>";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", y);
    out << buf << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double x = s.x_min + (s.x_max - s.x_min) * i / 5.0;
    out << "<text x='" << s.sx(x) << "' y='" << kHeight - kMarginBottom + 16
        << "' text-anchor='middle' font-size='10'>";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2g", x);
    out << buf << "</text>\n";
  }
}

}  // namespace

void write_curves_svg(const std::string& path, const std::vector<const CurveBand*>& bands) {
  if (bands.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);

  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const CurveBand* b : bands) {
    for (double v : b->lo) y_min = std::min(y_min, v);
    for (double v : b->hi) y_max = std::max(y_max, v);
  }
  if (!(y_max > y_min)) y_max = y_min + 1.0;
  const Scale s{0.0, 1.0, y_min, y_max};

  svg_header(out, "post-evaluated objective, " + bands.front()->problem_id,
             "objective estimate", s);
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const CurveBand* b = bands[i];
    // confidence band as a translucent polygon
    std::string pts;
    for (std::size_t j = 0; j < b->fractions.size(); ++j)
      pts += std::to_string(s.sx(b->fractions[j])) + "," + std::to_string(s.sy(b->lo[j])) + " ";
    for (std::size_t j = b->fractions.size(); j-- > 0;)
      pts += std::to_string(s.sx(b->fractions[j])) + "," + std::to_string(s.sy(b->hi[j])) + " ";
    out << "<polygon points='" << pts << "' fill='" << palette(i)
        << "' opacity='0.15' stroke='none'/>\n";
    out << "<polyline points='" << polyline(b->fractions, b->mean, s) << "' fill='none' stroke='"
        << palette(i) << "' stroke-width='1.5'/>\n";
    out << "<text x='" << kWidth - kMarginRight - 4 << "' y='" << kMarginTop + 16 * (i + 1)
        << "' text-anchor='end' font-size='11' fill='" << palette(i) << "'>" << b->solver_id
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_profiles_svg(const std::string& path,
                        const std::vector<SolvabilityProfile>& profiles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const Scale s{0.0, 1.0, 0.0, 1.0};
  svg_header(out, "solvability profiles", "fraction solved", s);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const SolvabilityProfile& p = profiles[i];
    if (p.fractions.empty()) continue;
    out << "<polyline points='" << polyline(p.fractions, p.fraction_solved, s)
        << "' fill='none' stroke='" << palette(i) << "' stroke-width='1.5'/>\n";
    out << "<text x='" << kWidth - kMarginRight - 4 << "' y='" << kMarginTop + 16 * (i + 1)
        << "' text-anchor='end' font-size='11' fill='" << palette(i) << "'>" << p.solver_id
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mfopt
