#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bitrel/metrics.hpp"
#include "bitrel/sysgen.hpp"

namespace bitrel {

/// How an undefined metric value enters the confusion sums.
enum class UndefinedPolicy {
  Zero,  // scored as 0, i.e. "no evidence of a connection"
  Skip,  // cell excluded from all four sums
};

std::string_view to_string(UndefinedPolicy policy);
std::optional<UndefinedPolicy> parse_policy(std::string_view name);

/// Soft confusion counts: each scored cell contributes exactly 1.0 in total.
struct ConfusionCounts {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;

  /// Adds one cell with known connection state and estimated score in [0, 1].
  void add_cell(bool known, double score);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

enum class Statistic { Tpr, Tnr, Ppv, Npv, Acc, Bacc, Bmi, Mcc };

inline constexpr std::array<Statistic, 8> kAllStatistics = {Statistic::Tpr, Statistic::Tnr, Statistic::Ppv,
                                                            Statistic::Npv, Statistic::Acc, Statistic::Bacc,
                                                            Statistic::Bmi, Statistic::Mcc};

/// Lower-case short name ("tpr", "bacc", ...).
std::string_view to_string(Statistic stat);
std::optional<Statistic> parse_statistic(std::string_view name);

/// Classifier statistics; a field is nullopt when its ratio has a zero denominator.
struct StatSet {
  std::optional<double> tpr, tnr, ppv, npv, acc, bacc, bmi, mcc;

  std::optional<double> get(Statistic stat) const;

  friend bool operator==(const StatSet&, const StatSet&) = default;
};

/// Sums over all ordered off-diagonal pairs (i, j), so each unordered pair counts twice.
ConfusionCounts confusion(const KnownAdjacency& known, const ScoreMatrix& estimated,
                          UndefinedPolicy policy = UndefinedPolicy::Zero);

StatSet statistics(const ConfusionCounts& counts);

/// One system x metric outcome.
struct ResultRow {
  std::uint64_t ordinal = 0;
  SystemType type = SystemType::And;
  MetricKind metric = MetricKind::Ham;
  ConfusionCounts counts;
  StatSet stats;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Scores every requested metric of one sampled system against its known adjacency.
std::vector<ResultRow> score_system(const SystemSpec& spec, std::span<const BitSeries> traces, const Weighting& w,
                                    UndefinedPolicy policy = UndefinedPolicy::Zero,
                                    std::span<const MetricKind> kinds = kAllMetrics);

/// Scores precomputed matrices (one per metric) against the spec's adjacency.
std::vector<ResultRow> score_matrices_against(const SystemSpec& spec, std::span<const ScoreMatrix> matrices,
                                              UndefinedPolicy policy);

}  // namespace bitrel
