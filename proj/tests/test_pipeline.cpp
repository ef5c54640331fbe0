#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bitrel/error.hpp"
#include "bitrel/formats.hpp"
#include "bitrel/pipeline.hpp"
#include "oracle.hpp"

using namespace bitrel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SystemSpec pair_spec() {
  SystemSpec s;
  s.seed = 3;
  s.type = SystemType::And;
  s.m_src = 1;
  s.m_dst = 1;
  s.src_density = {0.5};
  s.dst_functions = {NodeFunction{{0}, {}}};
  return s;
}

}  // namespace

TEST_CASE("cmd_gen") {
  const auto dir = oracle::scratch_dir("gen");
  RunConfig config;
  config.seed = 99;
  config.systems = 5;
  config.out = dir / "a";
  std::ostringstream log;
  const auto summary = cmd_gen(config, log);
  REQUIRE(summary.spec_files.size() == 5);
  for (std::size_t c : summary.type_counts) CHECK(c == 1);
  CHECK(fs::exists(dir / "a" / "sys_4.spec"));
  CHECK(log.str().find("LHA: 1") != std::string::npos);

  config.out = dir / "b";
  cmd_gen(config, log);
  for (int o = 0; o < 5; ++o) {
    const std::string name = "sys_" + std::to_string(o) + ".spec";
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }

  config.systems = 0;
  CHECK_THROWS_AS(cmd_gen(config, log), UsageError);
}

TEST_CASE("cmd_gen counts fifths at full corpus scale") {
  const auto dir = oracle::scratch_dir("gen1000");
  RunConfig config;
  config.systems = 1000;
  config.out = dir;
  std::ostringstream log;
  const auto summary = cmd_gen(config, log);
  for (std::size_t c : summary.type_counts) CHECK(c == 200);
}

TEST_CASE("cmd_gen reports unwritable paths") {
  const auto dir = oracle::scratch_dir("gen_bad");
  std::ofstream(dir / "file") << "x";
  RunConfig config;
  config.systems = 1;
  config.out = dir / "file" / "sub";
  std::ostringstream log;
  try {
    cmd_gen(config, log);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("file/sub") != std::string::npos);
  }
}

TEST_CASE("cmd_sim") {
  const auto dir = oracle::scratch_dir("sim");
  const auto spec = draw_system(21, 7);
  write_spec_file(dir / "s.spec", spec);

  cmd_sim(dir / "s.spec", 10000, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == std::to_string(spec.node_count()) + ",10000");

  cmd_sim(dir / "s.spec", 500, dir / "t.btr");
  CHECK(read_traces(dir / "t.btr") == sample_traces(spec, 500));
  // re-reading the spec reproduces the same traces
  cmd_sim(dir / "s.spec", 500, dir / "u.btr");
  CHECK(slurp(dir / "t.btr") == slurp(dir / "u.btr"));

  write_spec_file(dir / "pair.spec", pair_spec());
  cmd_sim(dir / "pair.spec", 300, dir / "pair.csv");
  const auto traces = read_traces(dir / "pair.csv");
  CHECK(traces[1] == traces[0]);

  std::ofstream(dir / "bad.spec") << "ordinal = 0\nseed = x\n";
  try {
    cmd_sim(dir / "bad.spec", 10, dir / "bad.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("bad.spec:2") != std::string::npos);
  }
}

TEST_CASE("cmd_est") {
  const auto dir = oracle::scratch_dir("est");
  {
    const BitSeries traces[] = {BitSeries::from_string("1110"), BitSeries::from_string("1100")};
    write_traces(dir / "pair.csv", traces);
    const MetricKind kinds[] = {MetricKind::Cov};
    const auto paths = cmd_est(dir / "pair.csv", kinds, {}, dir / "m");
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].filename() == "pair.Cov.csv");
    CHECK(read_matrix_file(paths[0]).at(0, 1) == 0.5);
  }
  {
    const BitSeries traces[] = {BitSeries::from_string("1011"), BitSeries::from_string("1011")};
    write_traces(dir / "same.btr", traces);
    const MetricKind kinds[] = {MetricKind::Ham};
    CHECK(read_matrix_file(cmd_est(dir / "same.btr", kinds, {}, dir / "m")[0]).at(1, 0) == 1.0);
  }
  {
    const BitSeries traces[] = {BitSeries::from_string("0000"), BitSeries::from_string("0000"),
                                BitSeries::from_string("0110")};
    write_traces(dir / "zero.csv", traces);
    const MetricKind kinds[] = {MetricKind::Tmt};
    const auto p = cmd_est(dir / "zero.csv", kinds, {}, dir / "m")[0];
    CHECK(slurp(p).substr(0, 6) == ",nan,0");
  }
  {
    const BitSeries traces[] = {BitSeries::from_string("1100"), BitSeries::from_string("1010")};
    write_traces(dir / "w.csv", traces);
    std::ofstream(dir / "w.txt") << "2 1 1 0\n";
    WeightingOption opt;
    opt.kind = Weighting::Kind::Explicit;
    opt.weights_file = dir / "w.txt";
    const MetricKind kinds[] = {MetricKind::Ham};
    // XOR = 0110 under weights (2,1,1,0): E = 2/4, Ham = 0.5
    CHECK(read_matrix_file(cmd_est(dir / "w.csv", kinds, opt, dir / "m")[0]).at(0, 1) == 0.5);
    opt = {};
    opt.kind = Weighting::Kind::Window;
    opt.begin = 0;
    opt.end = 1;
    CHECK(read_matrix_file(cmd_est(dir / "w.csv", kinds, opt, dir / "m")[0]).at(0, 1) == 1.0);
    std::ofstream(dir / "short.txt") << "1 1\n";
    opt = {};
    opt.kind = Weighting::Kind::Explicit;
    opt.weights_file = dir / "short.txt";
    CHECK_THROWS_AS(cmd_est(dir / "w.csv", kinds, opt, dir / "m"), UsageError);
  }
  {
    const BitSeries one[] = {BitSeries::from_string("1100")};
    write_traces(dir / "one.csv", one);
    CHECK_THROWS_AS(cmd_est(dir / "one.csv", kAllMetrics, {}, dir / "m"), UsageError);
  }
}

TEST_CASE("cmd_score") {
  const auto dir = oracle::scratch_dir("score");
  SystemSpec spec;
  spec.seed = 1;
  spec.type = SystemType::Or;
  spec.m_src = 2;
  spec.m_dst = 1;
  spec.src_density = {0.5, 0.5};
  spec.dst_functions = {NodeFunction{{0}, {}}};
  write_spec_file(dir / "s.spec", spec);
  const auto known = known_adjacency(spec);

  ScoreMatrix perfect(MetricKind::Ham, 3), half(MetricKind::Cov, 3), worked(MetricKind::Dep, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      perfect.set(i, j, known.connected(i, j) ? 1.0 : 0.0);
      half.set(i, j, 0.5);
      worked.set(i, j, 0.7);
    }
  }
  write_matrix_file(dir / "s.Ham.csv", perfect);
  write_matrix_file(dir / "s.Cov.csv", half);
  write_matrix_file(dir / "s.Dep.csv", worked);
  const fs::path matrices[] = {dir / "s.Ham.csv", dir / "s.Cov.csv", dir / "s.Dep.csv"};
  const auto rows = cmd_score(dir / "s.spec", matrices, UndefinedPolicy::Zero, dir / "r.csv", dir / "r.txt");
  REQUIRE(rows.size() == 3);
  CHECK(*rows[0].stats.acc == 1.0);
  CHECK(*rows[1].stats.tpr == 0.5);
  CHECK(*rows[1].stats.tnr == 0.5);
  // one known edge at 0.7 (counted both ways) and two non-edges at 0.7
  CHECK(rows[2].counts.tp == doctest::Approx(2 * 0.7));
  CHECK(rows[2].counts.fn == doctest::Approx(2 * 0.3));
  CHECK(rows[2].counts.fp == doctest::Approx(4 * 0.7));
  CHECK(rows[2].counts.tn == doctest::Approx(4 * 0.3));
  CHECK(read_results_file(dir / "r.csv") == rows);
  CHECK(slurp(dir / "r.txt").find("[metric Dep]") != std::string::npos);

  write_matrix_file(dir / "big.Ham.csv", ScoreMatrix(MetricKind::Ham, 4));
  const fs::path wrong[] = {dir / "big.Ham.csv"};
  try {
    cmd_score(dir / "s.spec", wrong, UndefinedPolicy::Zero, {});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    const std::string what = e.what();
    CHECK(what.find("4x4") != std::string::npos);
    CHECK(what.find("3 nodes") != std::string::npos);
  }
}

TEST_CASE("cmd_report") {
  const auto dir = oracle::scratch_dir("report");
  std::vector<ResultRow> rows;
  for (MetricKind k : kAllMetrics) {
    ResultRow r;
    r.metric = k;
    r.counts = {0.6, 0.4, 0.4, 0.6};
    r.stats = statistics(r.counts);
    rows.push_back(r);
  }
  write_results_file(dir / "r.csv", rows);
  const fs::path inputs[] = {dir / "r.csv"};
  std::ostringstream log;
  const auto acc = cmd_report(inputs, Statistic::Acc, dir / "out", log);
  CHECK(acc.curves.size() == 6);
  CHECK(fs::exists(dir / "out" / "curves_acc.csv"));
  CHECK(slurp(dir / "out" / "curves_acc.svg").find("<polyline") != std::string::npos);

  const auto mcc = cmd_report(inputs, Statistic::Mcc, dir / "out", log);
  CHECK(slurp(dir / "out" / "curves_mcc.csv").find("\n-1,") != std::string::npos);
  CHECK(mcc.lo == -1.0);
}

TEST_CASE("cmd_run smoke and determinism") {
  const auto dir = oracle::scratch_dir("run");
  RunConfig config;
  config.seed = 5;
  config.systems = 10;
  config.samples = 500;
  config.jobs = 2;
  config.out = dir / "a";
  std::ostringstream log;
  const auto a = cmd_run(config, log);
  CHECK(a.rows.size() == 60);
  CHECK(a.curve_files.size() == 8);
  for (const auto& f : a.curve_files) CHECK(fs::exists(f));
  CHECK(fs::exists(dir / "a" / "traces" / "sys_9.btr"));
  CHECK(fs::exists(dir / "a" / "matrices" / "sys_9.Dep.csv"));
  CHECK(fs::exists(dir / "a" / "records" / "sys_9.txt"));
  CHECK_FALSE(fs::exists(dir / "a" / "FAILED"));

  config.out = dir / "b";
  config.jobs = 1;
  config.format = TraceFormat::Csv;
  cmd_run(config, log);
  CHECK(slurp(dir / "a" / "results.csv") == slurp(dir / "b" / "results.csv"));
  CHECK(read_results_file(dir / "a" / "results.csv") == a.rows);
}

TEST_CASE("cmd_run leaves a failure marker") {
  const auto dir = oracle::scratch_dir("run_fail");
  fs::create_directories(dir / "out");
  // A regular file where the traces directory should go.
  std::ofstream(dir / "out" / "traces") << "blocked";
  RunConfig config;
  config.systems = 2;
  config.samples = 50;
  config.out = dir / "out";
  std::ostringstream log;
  CHECK_THROWS(cmd_run(config, log));
  CHECK(fs::exists(dir / "out" / "FAILED"));
  CHECK(fs::exists(dir / "out" / "specs" / "sys_0.spec"));
}

TEST_CASE("RunConfig validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.systems == 1000);
  CHECK(c.samples == 10000);
  CHECK(c.metrics.size() == 6);
  CHECK(c.policy == UndefinedPolicy::Zero);
  c.metrics.clear();
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = {};
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK(RunConfig{}.effective_jobs() >= 1);
}
