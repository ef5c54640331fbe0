#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bitrel/eval.hpp"

namespace bitrel {

inline constexpr std::size_t kDefaultGridPoints = 256;

struct DensityCurve {
  std::vector<double> grid;     // ascending, endpoints inclusive
  std::vector<double> density;  // same length as grid, >= 0
  double bandwidth = 0.0;

  /// Trapezoidal integral of density over grid.
  double integral() const;
};

/// Silverman's rule 0.9 * min(sd, IQR/1.34) * n^(-1/5). Falls back to the
/// non-zero spread measure when the other is zero, floored at 1e-3.
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian KDE on a uniform grid over [lo, hi], reflected at both edges and
/// renormalized to unit trapezoidal area. Non-finite samples are ignored.
DensityCurve kde_estimate(std::span<const double> samples, double lo, double hi,
                          std::size_t gridpoints = kDefaultGridPoints);

/// [0, 1] for rates, [-1, 1] for bmi and mcc.
std::pair<double, double> statistic_domain(Statistic stat);

struct CurveSet {
  Statistic statistic = Statistic::Acc;
  double lo = 0.0;
  double hi = 1.0;
  /// One entry per metric present in the corpus; nullopt when every value was undefined.
  std::vector<std::pair<MetricKind, std::optional<DensityCurve>>> curves;
};

/// KDE of one statistic per metric across a corpus of results.
CurveSet curves_report(std::span<const ResultRow> rows, Statistic stat,
                       std::size_t gridpoints = kDefaultGridPoints);

}  // namespace bitrel
