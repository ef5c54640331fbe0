#include "bitrel/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "bitrel/error.hpp"
#include "bitrel/formats.hpp"
#include "bitrel/svg_plot.hpp"

namespace bitrel {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// Runs task(i) for i in [0, count) on up to `jobs` threads; rethrows the
// first failure after all workers stop.
template <typename Task>
void parallel_for(std::size_t count, unsigned jobs, Task&& task) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, jobs), count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string_view extension_for(TraceFormat format) { return format == TraceFormat::Csv ? ".csv" : ".btr"; }

void RunConfig::validate() const {
  if (systems < 1) throw UsageError("--systems must be at least 1");
  if (samples < 1) throw UsageError("--samples must be at least 1");
  if (metrics.empty()) throw UsageError("--metrics must name at least one metric");
}

unsigned RunConfig::effective_jobs() const {
  if (jobs > 0) return jobs;
  return std::max(1U, std::thread::hardware_concurrency());
}

Weighting WeightingOption::resolve(std::size_t n) const {
  switch (kind) {
    case Weighting::Kind::Uniform:
      return Weighting::uniform(n);
    case Weighting::Kind::Window:
      return Weighting::window(n, begin, end);
    case Weighting::Kind::Explicit: {
      std::ifstream in(weights_file);
      if (!in) throw IoError("cannot open " + weights_file.string() + " for reading");
      std::vector<double> weights;
      std::string token;
      while (in >> token) {
        try {
          std::size_t used = 0;
          weights.push_back(std::stod(token, &used));
          if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
          throw ParseError(weights_file.string() + ": bad weight '" + token + "'");
        }
      }
      if (weights.size() != n) {
        throw UsageError(weights_file.string() + " holds " + std::to_string(weights.size()) + " weights but traces have " +
                         std::to_string(n) + " samples");
      }
      return Weighting::explicit_weights(std::move(weights));
    }
  }
  return Weighting::uniform(n);
}

fs::path spec_file_name(std::uint64_t ordinal) { return "sys_" + std::to_string(ordinal) + ".spec"; }

GenSummary cmd_gen(const RunConfig& config, std::ostream& log) {
  config.validate();
  ensure_dir(config.out);
  GenSummary summary;
  summary.spec_files.reserve(config.systems);
  for (std::size_t o = 0; o < config.systems; ++o) {
    const SystemSpec spec = draw_system(config.seed, o);
    const fs::path path = config.out / spec_file_name(o);
    write_spec_file(path, spec);
    summary.spec_files.push_back(path);
    ++summary.type_counts[static_cast<std::size_t>(spec.type)];
  }
  log << "generated " << config.systems << " systems in " << config.out.string() << '\n';
  for (SystemType t : kAllSystemTypes) {
    log << "  " << to_string(t) << ": " << summary.type_counts[static_cast<std::size_t>(t)] << '\n';
  }
  return summary;
}

void cmd_sim(const fs::path& spec_path, std::size_t n, const fs::path& trace_path) {
  if (n < 1) throw UsageError("--samples must be at least 1");
  const SystemSpec spec = read_spec_file(spec_path);
  if (trace_path.has_parent_path()) ensure_dir(trace_path.parent_path());
  write_traces(trace_path, sample_traces(spec, n));
}

std::vector<fs::path> cmd_est(const fs::path& trace_path, std::span<const MetricKind> kinds,
                              const WeightingOption& weighting, const fs::path& out_dir) {
  if (kinds.empty()) throw UsageError("no metrics requested");
  const auto traces = read_traces(trace_path);
  if (traces.size() < 2) throw UsageError(trace_path.string() + " holds fewer than 2 nodes");
  const Weighting w = weighting.resolve(traces.front().size());
  const auto matrices = score_matrices(traces, w, kinds);

  ensure_dir(out_dir);
  std::vector<fs::path> paths;
  for (const auto& matrix : matrices) {
    const fs::path path = out_dir / (trace_path.stem().string() + "." + std::string(to_string(matrix.kind())) + ".csv");
    write_matrix_file(path, matrix);
    paths.push_back(path);
  }
  return paths;
}

std::vector<ResultRow> cmd_score(const fs::path& spec_path, std::span<const fs::path> matrix_paths,
                                 UndefinedPolicy policy, const fs::path& results_path, const fs::path& record_path) {
  if (matrix_paths.empty()) throw UsageError("no matrix files given");
  const SystemSpec spec = read_spec_file(spec_path);
  std::vector<ScoreMatrix> matrices;
  for (const auto& p : matrix_paths) {
    matrices.push_back(read_matrix_file(p));
    if (matrices.back().size() != spec.node_count()) {
      throw UsageError("dimension mismatch: " + p.string() + " is " + std::to_string(matrices.back().size()) + "x" +
                       std::to_string(matrices.back().size()) + " but " + spec_path.string() + " has " +
                       std::to_string(spec.node_count()) + " nodes");
    }
  }
  auto rows = score_matrices_against(spec, matrices, policy);
  if (!results_path.empty()) {
    if (results_path.has_parent_path()) ensure_dir(results_path.parent_path());
    write_results_file(results_path, rows);
  }
  if (!record_path.empty()) {
    if (record_path.has_parent_path()) ensure_dir(record_path.parent_path());
    std::ofstream out(record_path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + record_path.string() + " for writing");
    write_system_record(out, spec, rows);
    if (!out.flush()) throw IoError("failed writing " + record_path.string());
  }
  return rows;
}

CurveSet cmd_report(std::span<const fs::path> results_paths, Statistic stat, const fs::path& out_dir,
                    std::ostream& log) {
  std::vector<ResultRow> rows;
  for (const auto& p : results_paths) {
    auto more = read_results_file(p);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  if (rows.empty()) throw UsageError("no result rows to report");

  CurveSet curves = curves_report(rows, stat);
  for (const auto& [kind, curve] : curves.curves) {
    if (!curve) log << "warning: every " << to_string(stat) << " value of " << to_string(kind) << " is undefined\n";
  }

  ensure_dir(out_dir);
  const std::string base = "curves_" + std::string(to_string(stat));
  {
    const fs::path path = out_dir / (base + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_curves_csv(out, curves);
    if (!out.flush()) throw IoError("failed writing " + path.string());
  }
  {
    const fs::path path = out_dir / (base + ".svg");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_curves_svg(out, curves);
    if (!out.flush()) throw IoError("failed writing " + path.string());
  }
  return curves;
}

RunOutputs cmd_run(const RunConfig& config, std::ostream& log) {
  config.validate();
  ensure_dir(config.out);
  const fs::path marker = config.out / "FAILED";
  std::error_code ignored;
  fs::remove(marker, ignored);

  try {
    const fs::path spec_dir = config.out / "specs";
    const fs::path trace_dir = config.out / "traces";
    const fs::path matrix_dir = config.out / "matrices";
    const fs::path record_dir = config.out / "records";
    const fs::path curve_dir = config.out / "curves";

    RunConfig gen_config = config;
    gen_config.out = spec_dir;
    const GenSummary summary = cmd_gen(gen_config, log);

    std::vector<std::vector<ResultRow>> per_system(config.systems);
    const WeightingOption uniform;
    parallel_for(config.systems, config.effective_jobs(), [&](std::size_t o) {
      const fs::path& spec_path = summary.spec_files[o];
      const std::string stem = spec_path.stem().string();
      const fs::path trace_path = trace_dir / (stem + std::string(extension_for(config.format)));
      cmd_sim(spec_path, config.samples, trace_path);
      const auto matrices = cmd_est(trace_path, config.metrics, uniform, matrix_dir);
      per_system[o] = cmd_score(spec_path, matrices, config.policy, {}, record_dir / (stem + ".txt"));
    });

    RunOutputs outputs;
    for (auto& rows : per_system) outputs.rows.insert(outputs.rows.end(), rows.begin(), rows.end());
    outputs.results_csv = config.out / "results.csv";
    write_results_file(outputs.results_csv, outputs.rows);
    log << "scored " << outputs.rows.size() << " system x metric pairs into " << outputs.results_csv.string() << '\n';

    const fs::path results[] = {outputs.results_csv};
    for (Statistic stat : kAllStatistics) {
      cmd_report(results, stat, curve_dir, log);
      outputs.curve_files.push_back(curve_dir / ("curves_" + std::string(to_string(stat)) + ".csv"));
    }
    return outputs;
  } catch (const std::exception& e) {
    std::ofstream out(marker, std::ios::trunc);
    out << e.what() << '\n';
    throw;
  }
}

}  // namespace bitrel
