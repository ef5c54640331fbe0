#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bitrel/bitseries.hpp"

namespace bitrel {

enum class MetricKind { Ham, Tmt, Cls, Cos, Cov, Dep };

inline constexpr std::array<MetricKind, 6> kAllMetrics = {MetricKind::Ham, MetricKind::Tmt, MetricKind::Cls,
                                                          MetricKind::Cos, MetricKind::Cov, MetricKind::Dep};

std::string_view to_string(MetricKind kind);
/// Case-insensitive; returns nullopt for unknown names.
std::optional<MetricKind> parse_metric(std::string_view name);

/// A metric score in [0, 1], or nullopt when the metric divides by zero.
using MetricValue = std::optional<double>;

/// The four weighted expectations every metric is built from.
struct PairMoments {
  double ex = 0.0;    // E[fx]
  double ey = 0.0;    // E[fy]
  double exy = 0.0;   // E[fx * fy]
  double exor = 0.0;  // E[|fx - fy|]

  static PairMoments compute(const BitSeries& fx, const BitSeries& fy, const Weighting& w);
};

/// E[fx | fy] = E[fx * fy] / E[fy]; undefined when E[fy] = 0.
MetricValue cond_expectation(const BitSeries& fx, const BitSeries& fy, const Weighting& w);

MetricValue ham(const BitSeries& fx, const BitSeries& fy, const Weighting& w);
MetricValue tmt(const BitSeries& fx, const BitSeries& fy, const Weighting& w);
MetricValue cls(const BitSeries& fx, const BitSeries& fy, const Weighting& w);
MetricValue cos(const BitSeries& fx, const BitSeries& fy, const Weighting& w);
MetricValue cov(const BitSeries& fx, const BitSeries& fy, const Weighting& w);
MetricValue dep(const BitSeries& fx, const BitSeries& fy, const Weighting& w);

/// Scores one metric from precomputed moments. Defined results are clamped
/// into [0, 1] to absorb last-ulp rounding.
MetricValue evaluate(MetricKind kind, const PairMoments& moments);
MetricValue evaluate(MetricKind kind, const BitSeries& fx, const BitSeries& fy, const Weighting& w);

/// Estimated adjacency E: a symmetric m x m matrix of metric values whose
/// diagonal is excluded from every use.
class ScoreMatrix {
 public:
  ScoreMatrix(MetricKind kind, std::size_t m);

  MetricKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return m_; }

  /// Off-diagonal cell; throws UsageError for i == j or out-of-range indices.
  MetricValue at(std::size_t i, std::size_t j) const;
  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, MetricValue value);

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  MetricKind kind_;
  std::size_t m_;
  std::vector<MetricValue> cells_;
};

/// Applies `kind` to every unordered pair of traces.
ScoreMatrix score_matrix(std::span<const BitSeries> traces, const Weighting& w, MetricKind kind);

/// Same as calling score_matrix once per kind, but computes each pair's moments once.
std::vector<ScoreMatrix> score_matrices(std::span<const BitSeries> traces, const Weighting& w,
                                        std::span<const MetricKind> kinds);

}  // namespace bitrel
