#pragma once

// File formats read and written by the pipeline.
//
// Trace files hold m node streams of n samples each:
//   .csv  first line "m,n", then one row per node of n comma-separated 0/1 values.
//   .btr  "BTR1", uint32 m and uint64 n (little-endian), then per node
//         ceil(n/8) bytes; sample t is bit (t % 8) of byte (t / 8), pad bits zero.
//
// System specs (.spec) are key = value text with [src k] and [dst k] sections.
// Reals are written in shortest round-trip form so specs re-read losslessly.
//
// Score matrices are CSV (m x m, empty diagonal, "nan" for undefined) or JSON
// ({"metric", "m", "values"} row-major, null diagonal, "nan" for undefined).

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitrel/bitseries.hpp"
#include "bitrel/eval.hpp"
#include "bitrel/kde.hpp"
#include "bitrel/metrics.hpp"
#include "bitrel/sysgen.hpp"

namespace bitrel {

/// Shortest round-trip decimal; "nan" for NaN.
std::string format_real(double v);
std::string format_value(const std::optional<double>& v);
/// Parses a real or "nan"; returns false on malformed text.
bool parse_real(std::string_view text, double& out);

void write_traces_csv(std::ostream& out, std::span<const BitSeries> traces);
std::vector<BitSeries> read_traces_csv(std::istream& in, const std::string& source = "<stream>");
void write_traces_btr(std::ostream& out, std::span<const BitSeries> traces);
std::vector<BitSeries> read_traces_btr(std::istream& in, const std::string& source = "<stream>");
/// Format chosen by extension (.csv or .btr).
void write_traces(const std::filesystem::path& path, std::span<const BitSeries> traces);
std::vector<BitSeries> read_traces(const std::filesystem::path& path);

void write_spec(std::ostream& out, const SystemSpec& spec);
SystemSpec read_spec(std::istream& in, const std::string& source = "<stream>");
void write_spec_file(const std::filesystem::path& path, const SystemSpec& spec);
SystemSpec read_spec_file(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const ScoreMatrix& matrix);
ScoreMatrix read_matrix_csv(std::istream& in, MetricKind kind, const std::string& source = "<stream>");
void write_matrix_json(std::ostream& out, const ScoreMatrix& matrix);
ScoreMatrix read_matrix_json(std::istream& in, const std::string& source = "<stream>");
/// CSV matrix files carry the metric in their name: "<stem>.<Metric>.csv".
void write_matrix_file(const std::filesystem::path& path, const ScoreMatrix& matrix);
ScoreMatrix read_matrix_file(const std::filesystem::path& path);

inline constexpr std::string_view kResultsHeader =
    "ordinal,type,metric,tp,fp,fn,tn,tpr,tnr,ppv,npv,acc,bacc,bmi,mcc";
void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results_csv(std::istream& in, const std::string& source = "<stream>");
void write_results_file(const std::filesystem::path& path, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results_file(const std::filesystem::path& path);

/// Per-system record: header keys, then one [metric X] section of counts and statistics.
void write_system_record(std::ostream& out, const SystemSpec& spec, std::span<const ResultRow> rows);

/// Grid column then one density column per defined curve.
void write_curves_csv(std::ostream& out, const CurveSet& curves);

}  // namespace bitrel
