#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bitrel/bitseries.hpp"
#include "bitrel/eval.hpp"
#include "bitrel/kde.hpp"
#include "bitrel/metrics.hpp"
#include "bitrel/sysgen.hpp"

namespace bitrel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitParse = 4;

enum class TraceFormat { Csv, Btr };

std::string_view extension_for(TraceFormat format);

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t systems = 1000;
  std::size_t samples = 10000;
  std::vector<MetricKind> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  UndefinedPolicy policy = UndefinedPolicy::Zero;
  std::filesystem::path out = "bitrel_out";
  unsigned jobs = 0;  // 0 = hardware concurrency
  TraceFormat format = TraceFormat::Btr;

  /// Throws UsageError on zero systems/samples or an empty metric list.
  void validate() const;
  unsigned effective_jobs() const;
};

/// Weighting choice made before the sample count is known.
struct WeightingOption {
  Weighting::Kind kind = Weighting::Kind::Uniform;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::filesystem::path weights_file;  // whitespace-separated reals, one per sample

  Weighting resolve(std::size_t n) const;
};

struct GenSummary {
  std::vector<std::filesystem::path> spec_files;
  std::array<std::size_t, 5> type_counts{};  // indexed by SystemType
};

std::filesystem::path spec_file_name(std::uint64_t ordinal);

/// Writes sys_<ordinal>.spec for ordinals [0, systems) into config.out and
/// prints the type counts to `log`.
GenSummary cmd_gen(const RunConfig& config, std::ostream& log);

/// Samples n steps of the system in `spec_path` and writes them to `trace_path`
/// (format from extension).
void cmd_sim(const std::filesystem::path& spec_path, std::size_t n, const std::filesystem::path& trace_path);

/// Writes <out_dir>/<trace stem>.<Metric>.csv for each requested metric.
std::vector<std::filesystem::path> cmd_est(const std::filesystem::path& trace_path, std::span<const MetricKind> kinds,
                                           const WeightingOption& weighting, const std::filesystem::path& out_dir);

/// Scores matrix files against the spec and writes the results CSV (and the
/// per-system record when `record_path` is non-empty).
std::vector<ResultRow> cmd_score(const std::filesystem::path& spec_path,
                                 std::span<const std::filesystem::path> matrix_paths, UndefinedPolicy policy,
                                 const std::filesystem::path& results_path,
                                 const std::filesystem::path& record_path = {});

/// KDE curves of one statistic per metric: writes curves_<stat>.csv and .svg.
CurveSet cmd_report(std::span<const std::filesystem::path> results_paths, Statistic stat,
                    const std::filesystem::path& out_dir, std::ostream& log);

struct RunOutputs {
  std::filesystem::path results_csv;
  std::vector<std::filesystem::path> curve_files;
  std::vector<ResultRow> rows;
};

/// gen -> sim -> est -> score -> report for all eight statistics.
///
/// Layout under config.out: specs/, traces/, matrices/, records/, results.csv,
/// curves/. On failure a FAILED marker holding the error is written and the
/// error is rethrown; partial outputs stay on disk.
RunOutputs cmd_run(const RunConfig& config, std::ostream& log);

}  // namespace bitrel
