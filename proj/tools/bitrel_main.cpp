// bitrel: estimate relationships between binary event streams and score the
// estimators against generated systems with known topology.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bitrel/error.hpp"
#include "bitrel/pipeline.hpp"

namespace {

using namespace bitrel;

std::vector<MetricKind> parse_metric_list(const std::vector<std::string>& names) {
  std::vector<MetricKind> kinds;
  for (const auto& name : names) {
    if (name == "all") return {kAllMetrics.begin(), kAllMetrics.end()};
    const auto kind = parse_metric(name);
    if (!kind) throw UsageError("unknown metric '" + name + "' (valid: Ham, Tmt, Cls, Cos, Cov, Dep, all)");
    if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end()) kinds.push_back(*kind);
  }
  return kinds;
}

UndefinedPolicy parse_policy_or_throw(const std::string& name) {
  const auto policy = parse_policy(name);
  if (!policy) throw UsageError("unknown policy '" + name + "' (valid: zero, skip)");
  return *policy;
}

Statistic parse_statistic_or_throw(const std::string& name) {
  const auto stat = parse_statistic(name);
  if (!stat) {
    std::string valid;
    for (Statistic s : kAllStatistics) valid += (valid.empty() ? "" : ", ") + std::string(to_string(s));
    throw UsageError("unknown statistic '" + name + "' (valid: " + valid + ")");
  }
  return *stat;
}

TraceFormat parse_format_or_throw(const std::string& name) {
  if (name == "csv") return TraceFormat::Csv;
  if (name == "btr") return TraceFormat::Btr;
  throw UsageError("unknown trace format '" + name + "' (valid: csv, btr)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise relationship metrics for binary event streams"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML config file; command-line flags take precedence");

  std::uint64_t seed = 1;
  std::size_t systems = 1000;
  std::size_t samples = 10000;
  std::vector<std::string> metric_names{"all"};
  std::string policy_name = "zero";
  std::string out = "bitrel_out";
  unsigned jobs = 0;
  std::string format_name = "btr";
  std::string statistic_name = "bacc";

  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "Corpus seed")->envname("BITREL_SEED"); };
  auto add_systems = [&](CLI::App* cmd) {
    cmd->add_option("--systems", systems, "Number of systems")->envname("BITREL_SYSTEMS");
  };
  auto add_samples = [&](CLI::App* cmd) {
    cmd->add_option("--samples", samples, "Samples per node")->envname("BITREL_SAMPLES");
  };
  auto add_metrics = [&](CLI::App* cmd) {
    cmd->add_option("--metrics", metric_names, "Metrics to compute (comma separated or 'all')")
        ->delimiter(',')
        ->envname("BITREL_METRICS");
  };
  auto add_policy = [&](CLI::App* cmd) {
    cmd->add_option("--policy", policy_name, "Undefined-score policy: zero or skip")->envname("BITREL_POLICY");
  };
  auto add_out = [&](CLI::App* cmd, const std::string& help) {
    cmd->add_option("--out", out, help)->envname("BITREL_OUT");
  };

  // gen
  auto* gen = app.add_subcommand("gen", "Generate system spec files");
  add_seed(gen);
  add_systems(gen);
  add_out(gen, "Output directory");

  // sim
  std::string spec_path;
  auto* sim = app.add_subcommand("sim", "Sample traces from a system spec");
  sim->add_option("spec", spec_path, "System spec file")->required();
  add_samples(sim);
  sim->add_option("--format", format_name, "Trace format when --out is a directory: csv or btr")
      ->envname("BITREL_FORMAT");
  add_out(sim, "Trace file (.csv/.btr) or directory");

  // est
  std::string trace_path;
  std::string window;
  std::string weights_file;
  auto* est = app.add_subcommand("est", "Estimate score matrices from a trace file");
  est->add_option("trace", trace_path, "Trace file (.csv or .btr)")->required();
  add_metrics(est);
  auto* window_opt = est->add_option("--window", window, "Rectangular window BEGIN:END (end exclusive)");
  est->add_option("--weights", weights_file, "File of per-sample weights")->excludes(window_opt);
  add_out(est, "Output directory for matrix files");

  // score
  std::vector<std::string> matrix_paths;
  std::string record_path;
  auto* score = app.add_subcommand("score", "Score matrix files against a system spec");
  score->add_option("spec", spec_path, "System spec file")->required();
  score->add_option("matrices", matrix_paths, "Matrix files (<name>.<Metric>.csv or .json)")->required();
  add_policy(score);
  add_out(score, "Results CSV path");
  score->add_option("--record", record_path, "Also write the per-system record here");

  // report
  std::vector<std::string> results_paths;
  auto* report = app.add_subcommand("report", "KDE curves of one statistic per metric");
  report->add_option("results", results_paths, "Results CSV files")->required();
  report->add_option("--statistic", statistic_name, "tpr, tnr, ppv, npv, acc, bacc, bmi or mcc")
      ->envname("BITREL_STATISTIC");
  add_out(report, "Output directory");

  // run
  auto* run = app.add_subcommand("run", "Full pipeline: gen, sim, est, score, report");
  add_seed(run);
  add_systems(run);
  add_samples(run);
  add_metrics(run);
  add_policy(run);
  add_out(run, "Output directory");
  run->add_option("--jobs", jobs, "Concurrent system pipelines (0 = hardware threads)")->envname("BITREL_JOBS");
  run->add_option("--format", format_name, "Intermediate trace format: csv or btr")->envname("BITREL_FORMAT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig config;
    config.seed = seed;
    config.systems = systems;
    config.samples = samples;
    config.metrics = parse_metric_list(metric_names);
    config.policy = parse_policy_or_throw(policy_name);
    config.out = out;
    config.jobs = jobs;
    config.format = parse_format_or_throw(format_name);

    if (gen->parsed()) {
      cmd_gen(config, std::cout);
    } else if (sim->parsed()) {
      std::filesystem::path target = out;
      if (target.extension() != ".csv" && target.extension() != ".btr") {
        target /= std::filesystem::path(spec_path).stem().string() + std::string(extension_for(config.format));
      }
      cmd_sim(spec_path, samples, target);
      std::cout << "wrote " << target.string() << '\n';
    } else if (est->parsed()) {
      WeightingOption weighting;
      if (!window.empty()) {
        const auto colon = window.find(':');
        if (colon == std::string::npos) throw UsageError("--window expects BEGIN:END");
        try {
          weighting.begin = std::stoull(window.substr(0, colon));
          weighting.end = std::stoull(window.substr(colon + 1));
        } catch (const std::exception&) {
          throw UsageError("--window expects BEGIN:END with non-negative integers");
        }
        weighting.kind = Weighting::Kind::Window;
      } else if (!weights_file.empty()) {
        weighting.kind = Weighting::Kind::Explicit;
        weighting.weights_file = weights_file;
      }
      for (const auto& p : cmd_est(trace_path, config.metrics, weighting, out)) std::cout << "wrote " << p.string() << '\n';
    } else if (score->parsed()) {
      std::vector<std::filesystem::path> paths(matrix_paths.begin(), matrix_paths.end());
      std::filesystem::path results = out;
      if (results.extension() != ".csv") results /= "results.csv";
      cmd_score(spec_path, paths, config.policy, results, record_path);
      std::cout << "wrote " << results.string() << '\n';
    } else if (report->parsed()) {
      const Statistic stat = parse_statistic_or_throw(statistic_name);
      std::vector<std::filesystem::path> paths(results_paths.begin(), results_paths.end());
      const CurveSet curves = cmd_report(paths, stat, out, std::cout);
      std::cout << "wrote " << curves.curves.size() << " curves for " << to_string(stat) << " to " << out << '\n';
    } else if (run->parsed()) {
      const RunOutputs outputs = cmd_run(config, std::cout);
      std::cout << "wrote " << outputs.curve_files.size() << " curve files\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
