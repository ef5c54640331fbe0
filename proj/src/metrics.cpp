#include "bitrel/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "bitrel/error.hpp"

namespace bitrel {

namespace {

double unit_clamp(double v) { return std::clamp(v, 0.0, 1.0); }

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

}  // namespace

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Ham: return "Ham";
    case MetricKind::Tmt: return "Tmt";
    case MetricKind::Cls: return "Cls";
    case MetricKind::Cos: return "Cos";
    case MetricKind::Cov: return "Cov";
    case MetricKind::Dep: return "Dep";
  }
  return "?";
}

std::optional<MetricKind> parse_metric(std::string_view name) {
  for (MetricKind kind : kAllMetrics) {
    if (iequals(name, to_string(kind))) return kind;
  }
  return std::nullopt;
}

PairMoments PairMoments::compute(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  PairMoments m;
  m.ex = expectation(fx, w);
  m.ey = expectation(fy, w);
  m.exy = expectation_product(fx, fy, w);
  m.exor = expectation_absdiff(fx, fy, w);
  return m;
}

MetricValue cond_expectation(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  const double ey = expectation(fy, w);
  if (ey == 0.0) return std::nullopt;
  return unit_clamp(expectation_product(fx, fy, w) / ey);
}

MetricValue evaluate(MetricKind kind, const PairMoments& m) {
  switch (kind) {
    case MetricKind::Ham:
      return unit_clamp(1.0 - m.exor);
    case MetricKind::Tmt:
      // Union is empty only when both streams are all-zero under w.
      if (m.ex == 0.0 && m.ey == 0.0) return std::nullopt;
      return unit_clamp(m.exy / (m.ex + m.ey - m.exy));
    case MetricKind::Cls:
      // |fx - fy|^2 == |fx - fy| on binary samples.
      return unit_clamp(1.0 - std::sqrt(m.exor));
    case MetricKind::Cos:
      // E[f^2] == E[f] on binary samples.
      if (m.ex == 0.0 || m.ey == 0.0) return std::nullopt;
      return unit_clamp(m.exy / std::sqrt(m.ex * m.ey));
    case MetricKind::Cov:
      return unit_clamp(4.0 * std::abs(m.exy - m.ex * m.ey));
    case MetricKind::Dep:
      // Symmetric form 1 - E[fx]E[fy]/E[fx*fy]; negative dependence scores 0.
      if (m.exy == 0.0) return std::nullopt;
      return unit_clamp(1.0 - (m.ex * m.ey) / m.exy);
  }
  return std::nullopt;
}

MetricValue evaluate(MetricKind kind, const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  return evaluate(kind, PairMoments::compute(fx, fy, w));
}

MetricValue ham(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  return evaluate(MetricKind::Ham, fx, fy, w);
}
MetricValue tmt(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  return evaluate(MetricKind::Tmt, fx, fy, w);
}
MetricValue cls(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  return evaluate(MetricKind::Cls, fx, fy, w);
}
MetricValue cos(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  return evaluate(MetricKind::Cos, fx, fy, w);
}
MetricValue cov(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  return evaluate(MetricKind::Cov, fx, fy, w);
}
MetricValue dep(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  return evaluate(MetricKind::Dep, fx, fy, w);
}

ScoreMatrix::ScoreMatrix(MetricKind kind, std::size_t m) : kind_(kind), m_(m), cells_(m * m) {
  if (m < 2) throw UsageError("score matrix needs at least 2 nodes, got " + std::to_string(m));
}

std::size_t ScoreMatrix::index(std::size_t i, std::size_t j) const {
  if (i >= m_ || j >= m_) throw UsageError("score matrix index out of range");
  if (i == j) throw UsageError("score matrix diagonal is excluded");
  return i * m_ + j;
}

MetricValue ScoreMatrix::at(std::size_t i, std::size_t j) const { return cells_[index(i, j)]; }

void ScoreMatrix::set(std::size_t i, std::size_t j, MetricValue value) {
  cells_[index(i, j)] = value;
  cells_[index(j, i)] = value;
}

ScoreMatrix score_matrix(std::span<const BitSeries> traces, const Weighting& w, MetricKind kind) {
  const MetricKind kinds[] = {kind};
  return std::move(score_matrices(traces, w, kinds).front());
}

std::vector<ScoreMatrix> score_matrices(std::span<const BitSeries> traces, const Weighting& w,
                                        std::span<const MetricKind> kinds) {
  const std::size_t m = traces.size();
  if (m < 2) throw UsageError("need at least 2 traces to score pairs, got " + std::to_string(m));

  // Per-node expectations are shared by every pair.
  std::vector<double> means(m);
  for (std::size_t i = 0; i < m; ++i) means[i] = expectation(traces[i], w);

  std::vector<ScoreMatrix> out;
  out.reserve(kinds.size());
  for (MetricKind kind : kinds) out.emplace_back(kind, m);

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      PairMoments pm;
      pm.ex = means[i];
      pm.ey = means[j];
      pm.exy = expectation_product(traces[i], traces[j], w);
      pm.exor = expectation_absdiff(traces[i], traces[j], w);
      for (auto& matrix : out) matrix.set(i, j, evaluate(matrix.kind(), pm));
    }
  }
  return out;
}

}  // namespace bitrel
