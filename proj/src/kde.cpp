#include "bitrel/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bitrel/error.hpp"

namespace bitrel {

namespace {

constexpr double kMinBandwidth = 1e-3;

// Linear-interpolation quantile of sorted data (type 7).
double quantile(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> finite_only(std::span<const double> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(out), [](double v) { return std::isfinite(v); });
  return out;
}

}  // namespace

double DensityCurve::integral() const {
  double area = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    area += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return area;
}

double silverman_bandwidth(std::span<const double> samples) {
  std::vector<double> xs = finite_only(samples);
  if (xs.empty()) throw UsageError("bandwidth needs at least one finite sample");
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 2) return kMinBandwidth;

  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  std::sort(xs.begin(), xs.end());
  const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = std::max(sd, iqr / 1.34);
  return std::max(kMinBandwidth, 0.9 * spread * std::pow(n, -0.2));
}

DensityCurve kde_estimate(std::span<const double> samples, double lo, double hi, std::size_t gridpoints) {
  if (!(lo < hi)) throw UsageError("KDE domain must satisfy lo < hi");
  if (gridpoints < 2) throw UsageError("KDE needs at least 2 grid points");
  const std::vector<double> xs = finite_only(samples);
  if (xs.empty()) throw UsageError("KDE needs at least one finite sample");

  DensityCurve curve;
  curve.bandwidth = silverman_bandwidth(xs);
  curve.grid.resize(gridpoints);
  curve.density.assign(gridpoints, 0.0);
  const double step = (hi - lo) / static_cast<double>(gridpoints - 1);
  for (std::size_t g = 0; g < gridpoints; ++g) curve.grid[g] = lo + step * static_cast<double>(g);
  curve.grid.back() = hi;

  const double h = curve.bandwidth;
  const double norm = 1.0 / (static_cast<double>(xs.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  auto kernel = [h](double u) { return std::exp(-0.5 * (u / h) * (u / h)); };
  for (std::size_t g = 0; g < gridpoints; ++g) {
    const double x = curve.grid[g];
    double sum = 0.0;
    for (double s : xs) {
      sum += kernel(x - s) + kernel(x - (2.0 * lo - s)) + kernel(x - (2.0 * hi - s));
    }
    curve.density[g] = sum * norm;
  }

  const double area = curve.integral();
  if (area > 0.0) {
    for (double& d : curve.density) d /= area;
  }
  return curve;
}

std::pair<double, double> statistic_domain(Statistic stat) {
  if (stat == Statistic::Bmi || stat == Statistic::Mcc) return {-1.0, 1.0};
  return {0.0, 1.0};
}

CurveSet curves_report(std::span<const ResultRow> rows, Statistic stat, std::size_t gridpoints) {
  if (rows.empty()) throw UsageError("report needs at least one result row");
  CurveSet set;
  set.statistic = stat;
  std::tie(set.lo, set.hi) = statistic_domain(stat);

  for (MetricKind kind : kAllMetrics) {
    std::vector<double> values;
    bool present = false;
    for (const ResultRow& row : rows) {
      if (row.metric != kind) continue;
      present = true;
      if (auto v = row.stats.get(stat)) values.push_back(*v);
    }
    if (!present) continue;
    if (values.empty()) {
      set.curves.emplace_back(kind, std::nullopt);
    } else {
      set.curves.emplace_back(kind, kde_estimate(values, set.lo, set.hi, gridpoints));
    }
  }
  return set;
}

}  // namespace bitrel
