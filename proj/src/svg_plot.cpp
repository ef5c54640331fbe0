#include "bitrel/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <string>

namespace bitrel {

namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

struct Frame {
  double left, right, top, bottom;
  double x_lo, x_hi, y_hi;

  double x(double v) const { return left + (v - x_lo) / (x_hi - x_lo) * (right - left); }
  double y(double v) const { return bottom - v / y_hi * (bottom - top); }
};

}  // namespace

void write_curves_svg(std::ostream& out, const CurveSet& curves, SvgCanvas canvas) {
  double y_hi = 0.0;
  for (const auto& [kind, curve] : curves.curves) {
    if (curve) y_hi = std::max(y_hi, *std::max_element(curve->density.begin(), curve->density.end()));
  }
  if (y_hi <= 0.0) y_hi = 1.0;
  y_hi *= 1.05;

  const Frame f{60.0, canvas.width - 130.0, 20.0, canvas.height - 50.0, curves.lo, curves.hi, y_hi};

  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas.width << "\" height=\"" << canvas.height
      << "\" viewBox=\"0 0 " << canvas.width << ' ' << canvas.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.bottom << "\" x2=\"" << f.right << "\" y2=\"" << f.bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\"" << f.bottom
      << "\" stroke=\"black\"/>\n";

  const int ticks = static_cast<int>(std::lround((curves.hi - curves.lo) / 0.25));
  for (int i = 0; i <= ticks; ++i) {
    const double v = curves.lo + 0.25 * i;
    const double px = f.x(v);
    out << "<line x1=\"" << px << "\" y1=\"" << f.bottom << "\" x2=\"" << px << "\" y2=\"" << f.bottom + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << f.bottom + 20 << "\" font-size=\"12\" text-anchor=\"middle\">"
        << std::setprecision(2) << v << "</text>\n";
  }
  out << "<text x=\"" << (f.left + f.right) / 2 << "\" y=\"" << canvas.height - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">" << to_string(curves.statistic) << "</text>\n";
  out << "<text x=\"15\" y=\"" << (f.top + f.bottom) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 15 " << (f.top + f.bottom) / 2 << ")\">density</text>\n";

  for (std::size_t c = 0; c < curves.curves.size(); ++c) {
    const auto& [kind, curve] = curves.curves[c];
    const char* colour = kPalette[c % kPalette.size()];
    const double ly = f.top + 18.0 * static_cast<double>(c) + 10.0;
    out << "<line x1=\"" << f.right + 15 << "\" y1=\"" << ly << "\" x2=\"" << f.right + 40 << "\" y2=\"" << ly
        << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << f.right + 45 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << to_string(kind)
        << (curve ? "" : " (n/a)") << "</text>\n";
    if (!curve) continue;
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve->grid.size(); ++i) {
      if (i > 0) out << ' ';
      out << f.x(curve->grid[i]) << ',' << f.y(curve->density[i]);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace bitrel
