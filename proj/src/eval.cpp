#include "bitrel/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "bitrel/error.hpp"

namespace bitrel {

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(UndefinedPolicy policy) {
  return policy == UndefinedPolicy::Zero ? "zero" : "skip";
}

std::optional<UndefinedPolicy> parse_policy(std::string_view name) {
  const std::string key = lower(name);
  if (key == "zero") return UndefinedPolicy::Zero;
  if (key == "skip") return UndefinedPolicy::Skip;
  return std::nullopt;
}

void ConfusionCounts::add_cell(bool known, double score) {
  const double k = known ? 1.0 : 0.0;
  tp += std::min(k, score);
  fp += std::min(1.0 - k, score);
  fn += std::min(k, 1.0 - score);
  tn += std::min(1.0 - k, 1.0 - score);
}

std::string_view to_string(Statistic stat) {
  switch (stat) {
    case Statistic::Tpr: return "tpr";
    case Statistic::Tnr: return "tnr";
    case Statistic::Ppv: return "ppv";
    case Statistic::Npv: return "npv";
    case Statistic::Acc: return "acc";
    case Statistic::Bacc: return "bacc";
    case Statistic::Bmi: return "bmi";
    case Statistic::Mcc: return "mcc";
  }
  return "?";
}

std::optional<Statistic> parse_statistic(std::string_view name) {
  const std::string key = lower(name);
  for (Statistic s : kAllStatistics) {
    if (key == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<double> StatSet::get(Statistic stat) const {
  switch (stat) {
    case Statistic::Tpr: return tpr;
    case Statistic::Tnr: return tnr;
    case Statistic::Ppv: return ppv;
    case Statistic::Npv: return npv;
    case Statistic::Acc: return acc;
    case Statistic::Bacc: return bacc;
    case Statistic::Bmi: return bmi;
    case Statistic::Mcc: return mcc;
  }
  return std::nullopt;
}

ConfusionCounts confusion(const KnownAdjacency& known, const ScoreMatrix& estimated, UndefinedPolicy policy) {
  const std::size_t m = known.size();
  if (estimated.size() != m) {
    throw UsageError("dimension mismatch: known adjacency is " + std::to_string(m) + "x" + std::to_string(m) +
                     ", estimate is " + std::to_string(estimated.size()) + "x" + std::to_string(estimated.size()));
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const MetricValue e = estimated.at(i, j);
      if (!e && policy == UndefinedPolicy::Skip) continue;
      c.add_cell(known.connected(i, j), e.value_or(0.0));
    }
  }
  return c;
}

StatSet statistics(const ConfusionCounts& c) {
  StatSet s;
  s.tpr = ratio(c.tp, c.tp + c.fn);
  s.tnr = ratio(c.tn, c.tn + c.fp);
  s.ppv = ratio(c.tp, c.tp + c.fp);
  s.npv = ratio(c.tn, c.tn + c.fn);
  s.acc = ratio(c.tp + c.tn, c.tp + c.fn + c.tn + c.fp);
  if (s.tpr && s.tnr) {
    s.bacc = (*s.tpr + *s.tnr) / 2.0;
    s.bmi = *s.tpr + *s.tnr - 1.0;
  }
  const double den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn);
  if (den > 0.0) s.mcc = std::clamp((c.tp * c.tn - c.fp * c.fn) / std::sqrt(den), -1.0, 1.0);
  return s;
}

std::vector<ResultRow> score_matrices_against(const SystemSpec& spec, std::span<const ScoreMatrix> matrices,
                                              UndefinedPolicy policy) {
  const KnownAdjacency known = known_adjacency(spec);
  std::vector<ResultRow> rows;
  rows.reserve(matrices.size());
  for (const ScoreMatrix& e : matrices) {
    ResultRow row;
    row.ordinal = spec.ordinal;
    row.type = spec.type;
    row.metric = e.kind();
    row.counts = confusion(known, e, policy);
    row.stats = statistics(row.counts);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ResultRow> score_system(const SystemSpec& spec, std::span<const BitSeries> traces, const Weighting& w,
                                    UndefinedPolicy policy, std::span<const MetricKind> kinds) {
  if (traces.size() != spec.node_count()) {
    throw UsageError("system has " + std::to_string(spec.node_count()) + " nodes but " +
                     std::to_string(traces.size()) + " traces were given");
  }
  const auto matrices = score_matrices(traces, w, kinds);
  return score_matrices_against(spec, matrices, policy);
}

}  // namespace bitrel
