#include "bitrel/formats.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bitrel/error.hpp"

namespace bitrel {

namespace fs = std::filesystem;

namespace {

constexpr char kBtrMagic[4] = {'B', 'T', 'R', '1'};
constexpr std::string_view kSpecFormat = "bitrel-system/1";

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
  text = trim(text);
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out, base);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void require_uniform_length(std::span<const BitSeries> traces) {
  if (traces.empty()) throw UsageError("trace set is empty");
  for (const auto& t : traces) {
    if (t.size() != traces.front().size()) throw UsageError("traces in one file must share a sample count");
  }
}

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::istream& in, int bytes, const std::string& source) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw ParseError(source + ": truncated header");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_value(const std::optional<double>& v) { return v ? format_real(*v) : "nan"; }

bool parse_real(std::string_view text, double& out) {
  text = trim(text);
  if (text == "nan" || text == "NaN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

// ---------------------------------------------------------------------------
// traces

void write_traces_csv(std::ostream& out, std::span<const BitSeries> traces) {
  require_uniform_length(traces);
  const std::size_t n = traces.front().size();
  out << traces.size() << ',' << n << '\n';
  std::string row(2 * n - 1, ',');
  for (const auto& trace : traces) {
    for (std::size_t t = 0; t < n; ++t) row[2 * t] = trace.get(t) ? '1' : '0';
    out << row << '\n';
  }
}

std::vector<BitSeries> read_traces_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) parse_fail(source, lineno, "missing header");
  const auto header = split(trim(line), ',');
  std::size_t m = 0;
  std::size_t n = 0;
  if (header.size() != 2 || !parse_int(header[0], m) || !parse_int(header[1], n) || m == 0 || n == 0) {
    parse_fail(source, lineno, "header must be 'm,n' with positive counts");
  }

  std::vector<BitSeries> traces;
  traces.reserve(m);
  while (traces.size() < m) {
    ++lineno;
    if (!std::getline(in, line)) parse_fail(source, lineno, "expected " + std::to_string(m) + " node rows");
    const auto cells = split(trim(line), ',');
    if (cells.size() != n) {
      parse_fail(source, lineno, "expected " + std::to_string(n) + " samples, got " + std::to_string(cells.size()));
    }
    BitSeries trace(n);
    for (std::size_t t = 0; t < n; ++t) {
      const auto cell = trim(cells[t]);
      if (cell == "1") {
        trace.set(t, true);
      } else if (cell != "0") {
        parse_fail(source, lineno, "sample " + std::to_string(t) + " is not 0 or 1");
      }
    }
    traces.push_back(std::move(trace));
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) parse_fail(source, lineno, "unexpected data after last node row");
  }
  return traces;
}

void write_traces_btr(std::ostream& out, std::span<const BitSeries> traces) {
  require_uniform_length(traces);
  const std::size_t n = traces.front().size();
  out.write(kBtrMagic, sizeof kBtrMagic);
  put_le(out, traces.size(), 4);
  put_le(out, n, 8);
  const std::size_t bytes = (n + 7) / 8;
  std::string row(bytes, '\0');
  for (const auto& trace : traces) {
    const auto words = trace.words();
    for (std::size_t b = 0; b < bytes; ++b) {
      row[b] = static_cast<char>((words[b / 8] >> (8 * (b % 8))) & 0xFF);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

std::vector<BitSeries> read_traces_btr(std::istream& in, const std::string& source) {
  char magic[4] = {};
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kBtrMagic)) throw ParseError(source + ": not a BTR1 file");
  const std::uint64_t m = get_le(in, 4, source);
  const std::uint64_t n = get_le(in, 8, source);
  if (m == 0 || n == 0) throw ParseError(source + ": node and sample counts must be positive");

  const std::size_t bytes = (n + 7) / 8;
  std::string row(bytes, '\0');
  std::vector<BitSeries> traces;
  traces.reserve(m);
  for (std::uint64_t node = 0; node < m; ++node) {
    if (!in.read(row.data(), static_cast<std::streamsize>(bytes))) {
      throw ParseError(source + ": truncated data for node " + std::to_string(node));
    }
    std::vector<BitSeries::Word> words((n + 63) / 64, 0);
    for (std::size_t b = 0; b < bytes; ++b) {
      words[b / 8] |= static_cast<BitSeries::Word>(static_cast<unsigned char>(row[b])) << (8 * (b % 8));
    }
    try {
      traces.push_back(BitSeries::from_words(n, std::move(words)));
    } catch (const UsageError&) {
      throw ParseError(source + ": node " + std::to_string(node) + " has non-zero pad bits");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError(source + ": trailing bytes after last node");
  return traces;
}

void write_traces(const fs::path& path, std::span<const BitSeries> traces) {
  const auto ext = path.extension();
  if (ext == ".csv") {
    auto out = open_out(path);
    write_traces_csv(out, traces);
    finish_write(out, path);
  } else if (ext == ".btr") {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    write_traces_btr(out, traces);
    finish_write(out, path);
  } else {
    throw UsageError("trace file " + path.string() + " must end in .csv or .btr");
  }
}

std::vector<BitSeries> read_traces(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".csv") {
    auto in = open_in(path);
    return read_traces_csv(in, path.string());
  }
  if (ext == ".btr") {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    return read_traces_btr(in, path.string());
  }
  throw UsageError("trace file " + path.string() + " must end in .csv or .btr");
}

// ---------------------------------------------------------------------------
// system specs

void write_spec(std::ostream& out, const SystemSpec& spec) {
  out << "format = " << kSpecFormat << '\n';
  out << "ordinal = " << spec.ordinal << '\n';
  out << "seed = " << spec.seed << '\n';
  out << "type = " << to_string(spec.type) << '\n';
  out << "m_src = " << spec.m_src << '\n';
  out << "m_dst = " << spec.m_dst << '\n';
  for (std::size_t s = 0; s < spec.src_density.size(); ++s) {
    out << "\n[src " << s << "]\n";
    out << "density = " << format_real(spec.src_density[s]) << '\n';
  }
  for (std::size_t d = 0; d < spec.dst_functions.size(); ++d) {
    const auto& fn = spec.dst_functions[d];
    out << "\n[dst " << d << "]\n";
    out << "inputs =";
    for (auto in : fn.inputs) out << ' ' << in;
    out << "\nops =";
    for (auto op : fn.ops) out << ' ' << to_string(op);
    out << '\n';
  }
}

SystemSpec read_spec(std::istream& in, const std::string& source) {
  enum class Section { Header, Src, Dst };
  Section section = Section::Header;
  std::size_t index = 0;

  SystemSpec spec;
  std::map<std::string, bool> seen;
  std::vector<bool> have_density;
  std::vector<bool> have_inputs;
  std::vector<bool> have_ops;

  auto need_header = [&](std::size_t lineno) {
    for (const char* key : {"ordinal", "seed", "type", "m_src", "m_dst"}) {
      if (!seen[key]) parse_fail(source, lineno, std::string("missing header field '") + key + "'");
    }
  };

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(source, lineno, "unterminated section header");
      need_header(lineno);
      const auto parts = split(trim(line.substr(1, line.size() - 2)), ' ');
      if (parts.size() != 2 || !parse_int(parts[1], index)) parse_fail(source, lineno, "section must be [src k] or [dst k]");
      if (parts[0] == "src") {
        section = Section::Src;
        if (index >= spec.m_src) parse_fail(source, lineno, "src index out of range");
      } else if (parts[0] == "dst") {
        section = Section::Dst;
        if (index >= spec.m_dst) parse_fail(source, lineno, "dst index out of range");
      } else {
        parse_fail(source, lineno, "unknown section '" + std::string(parts[0]) + "'");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(source, lineno, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));

    switch (section) {
      case Section::Header: {
        if (seen[key]) parse_fail(source, lineno, "duplicate field '" + key + "'");
        seen[key] = true;
        bool ok = true;
        if (key == "format") {
          ok = value == kSpecFormat;
        } else if (key == "ordinal") {
          ok = parse_int(value, spec.ordinal);
        } else if (key == "seed") {
          ok = parse_int(value, spec.seed);
        } else if (key == "type") {
          const auto t = parse_system_type(value);
          ok = t.has_value();
          if (ok) spec.type = *t;
        } else if (key == "m_src") {
          ok = parse_int(value, spec.m_src) && spec.m_src >= 1 && spec.m_src <= kMaxNodesPerSide;
          if (ok) {
            spec.src_density.assign(spec.m_src, 0.0);
            have_density.assign(spec.m_src, false);
          }
        } else if (key == "m_dst") {
          ok = parse_int(value, spec.m_dst) && spec.m_dst >= 1 && spec.m_dst <= kMaxNodesPerSide;
          if (ok) {
            spec.dst_functions.assign(spec.m_dst, {});
            have_inputs.assign(spec.m_dst, false);
            have_ops.assign(spec.m_dst, false);
          }
        } else {
          parse_fail(source, lineno, "unknown field '" + key + "'");
        }
        if (!ok) parse_fail(source, lineno, "invalid value for '" + key + "'");
        break;
      }
      case Section::Src: {
        if (key != "density") parse_fail(source, lineno, "unknown src field '" + key + "'");
        double p = 0.0;
        if (!parse_real(value, p) || !(p >= 0.0 && p <= 1.0)) parse_fail(source, lineno, "density must be in [0, 1]");
        if (have_density[index]) parse_fail(source, lineno, "duplicate density");
        spec.src_density[index] = p;
        have_density[index] = true;
        break;
      }
      case Section::Dst: {
        auto& fn = spec.dst_functions[index];
        std::istringstream tokens{std::string(value)};
        std::string tok;
        if (key == "inputs") {
          if (have_inputs[index]) parse_fail(source, lineno, "duplicate inputs");
          have_inputs[index] = true;
          while (tokens >> tok) {
            std::uint32_t v = 0;
            if (!parse_int(std::string_view(tok), v)) parse_fail(source, lineno, "bad input index '" + tok + "'");
            fn.inputs.push_back(v);
          }
        } else if (key == "ops") {
          if (have_ops[index]) parse_fail(source, lineno, "duplicate ops");
          have_ops[index] = true;
          while (tokens >> tok) {
            const auto op = parse_bool_op(tok);
            if (!op) parse_fail(source, lineno, "bad operator '" + tok + "'");
            fn.ops.push_back(*op);
          }
        } else {
          parse_fail(source, lineno, "unknown dst field '" + key + "'");
        }
        break;
      }
    }
  }

  need_header(lineno);
  for (std::size_t s = 0; s < have_density.size(); ++s) {
    if (!have_density[s]) parse_fail(source, lineno, "src " + std::to_string(s) + " has no density");
  }
  for (std::size_t d = 0; d < have_inputs.size(); ++d) {
    if (!have_inputs[d]) parse_fail(source, lineno, "dst " + std::to_string(d) + " has no inputs");
  }
  try {
    spec.validate();
  } catch (const UsageError& e) {
    throw ParseError(source + ": " + e.what());
  }
  return spec;
}

void write_spec_file(const fs::path& path, const SystemSpec& spec) {
  auto out = open_out(path);
  write_spec(out, spec);
  finish_write(out, path);
}

SystemSpec read_spec_file(const fs::path& path) {
  auto in = open_in(path);
  return read_spec(in, path.string());
}

// ---------------------------------------------------------------------------
// score matrices

void write_matrix_csv(std::ostream& out, const ScoreMatrix& matrix) {
  const std::size_t m = matrix.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j > 0) out << ',';
      if (i != j) out << format_value(matrix.at(i, j));
    }
    out << '\n';
  }
}

ScoreMatrix read_matrix_csv(std::istream& in, MetricKind kind, const std::string& source) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> cells;
    for (auto c : split(t, ',')) cells.emplace_back(trim(c));
    rows.push_back(std::move(cells));
  }
  const std::size_t m = rows.size();
  if (m < 2) throw ParseError(source + ": matrix needs at least 2 rows");

  ScoreMatrix matrix(kind, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != m) {
      parse_fail(source, i + 1, "expected " + std::to_string(m) + " columns, got " + std::to_string(rows[i].size()));
    }
    for (std::size_t j = 0; j < m; ++j) {
      const auto& cell = rows[i][j];
      if (i == j) {
        if (!cell.empty()) parse_fail(source, i + 1, "diagonal cell must be empty");
        continue;
      }
      double v = 0.0;
      if (!parse_real(cell, v)) parse_fail(source, i + 1, "bad value '" + cell + "'");
      const MetricValue value = std::isnan(v) ? MetricValue{} : MetricValue{v};
      if (j < i && matrix.at(j, i) != value) parse_fail(source, i + 1, "matrix is not symmetric");
      matrix.set(i, j, value);
    }
  }
  return matrix;
}

void write_matrix_json(std::ostream& out, const ScoreMatrix& matrix) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (i == j) {
        values.push_back(nullptr);
      } else if (auto v = matrix.at(i, j)) {
        values.push_back(*v);
      } else {
        values.push_back("nan");
      }
    }
  }
  nlohmann::json doc = {{"metric", std::string(to_string(matrix.kind()))}, {"m", matrix.size()}, {"values", values}};
  out << doc.dump() << '\n';
}

ScoreMatrix read_matrix_json(std::istream& in, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    const auto kind = parse_metric(doc.at("metric").get<std::string>());
    if (!kind) throw ParseError(source + ": unknown metric");
    const auto m = doc.at("m").get<std::size_t>();
    const auto& values = doc.at("values");
    if (m < 2 || values.size() != m * m) throw ParseError(source + ": values must hold m*m entries");
    ScoreMatrix matrix(*kind, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto& cell = values[i * m + j];
        if (cell.is_number()) {
          matrix.set(i, j, cell.get<double>());
        } else if (cell.is_string() && cell.get<std::string>() == "nan") {
          matrix.set(i, j, std::nullopt);
        } else {
          throw ParseError(source + ": bad cell (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
    return matrix;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
}

namespace {

std::optional<MetricKind> metric_from_name(const fs::path& path) {
  // "<stem>.<Metric>.csv"
  return parse_metric(path.stem().extension().string().substr(path.stem().has_extension() ? 1 : 0));
}

}  // namespace

void write_matrix_file(const fs::path& path, const ScoreMatrix& matrix) {
  auto out = open_out(path);
  if (path.extension() == ".json") {
    write_matrix_json(out, matrix);
  } else {
    write_matrix_csv(out, matrix);
  }
  finish_write(out, path);
}

ScoreMatrix read_matrix_file(const fs::path& path) {
  auto in = open_in(path);
  if (path.extension() == ".json") return read_matrix_json(in, path.string());
  const auto kind = metric_from_name(path);
  if (!kind || !path.stem().has_extension()) {
    throw UsageError("cannot tell metric from matrix file name " + path.string() + " (expected <name>.<Metric>.csv)");
  }
  return read_matrix_csv(in, *kind, path.string());
}

// ---------------------------------------------------------------------------
// results

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.ordinal << ',' << to_string(r.type) << ',' << to_string(r.metric) << ',' << format_real(r.counts.tp)
        << ',' << format_real(r.counts.fp) << ',' << format_real(r.counts.fn) << ',' << format_real(r.counts.tn);
    for (Statistic s : kAllStatistics) out << ',' << format_value(r.stats.get(s));
    out << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) parse_fail(source, lineno, "missing results header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != 15) parse_fail(source, lineno, "expected 15 columns");
    ResultRow r;
    if (!parse_int(cells[0], r.ordinal)) parse_fail(source, lineno, "bad ordinal");
    const auto type = parse_system_type(cells[1]);
    const auto metric = parse_metric(cells[2]);
    if (!type || !metric) parse_fail(source, lineno, "bad type or metric");
    r.type = *type;
    r.metric = *metric;
    double* counts[] = {&r.counts.tp, &r.counts.fp, &r.counts.fn, &r.counts.tn};
    for (int c = 0; c < 4; ++c) {
      if (!parse_real(cells[3 + c], *counts[c])) parse_fail(source, lineno, "bad count");
    }
    std::optional<double>* stats[] = {&r.stats.tpr, &r.stats.tnr, &r.stats.ppv,  &r.stats.npv,
                                      &r.stats.acc, &r.stats.bacc, &r.stats.bmi, &r.stats.mcc};
    for (int s = 0; s < 8; ++s) {
      double v = 0.0;
      if (!parse_real(cells[7 + s], v)) parse_fail(source, lineno, "bad statistic");
      if (!std::isnan(v)) *stats[s] = v;
    }
    rows.push_back(r);
  }
  return rows;
}

void write_results_file(const fs::path& path, std::span<const ResultRow> rows) {
  auto out = open_out(path);
  write_results_csv(out, rows);
  finish_write(out, path);
}

std::vector<ResultRow> read_results_file(const fs::path& path) {
  auto in = open_in(path);
  return read_results_csv(in, path.string());
}

void write_system_record(std::ostream& out, const SystemSpec& spec, std::span<const ResultRow> rows) {
  out << "ordinal = " << spec.ordinal << '\n';
  out << "type = " << to_string(spec.type) << '\n';
  out << "m_src = " << spec.m_src << '\n';
  out << "m_dst = " << spec.m_dst << '\n';
  out << "seed = " << spec.seed << '\n';
  for (const auto& r : rows) {
    out << "\n[metric " << to_string(r.metric) << "]\n";
    out << "tp = " << format_real(r.counts.tp) << '\n';
    out << "fp = " << format_real(r.counts.fp) << '\n';
    out << "fn = " << format_real(r.counts.fn) << '\n';
    out << "tn = " << format_real(r.counts.tn) << '\n';
    for (Statistic s : kAllStatistics) out << to_string(s) << " = " << format_value(r.stats.get(s)) << '\n';
  }
}

void write_curves_csv(std::ostream& out, const CurveSet& curves) {
  std::vector<const DensityCurve*> defined;
  out << "grid";
  for (const auto& [kind, curve] : curves.curves) {
    if (!curve) continue;
    out << ',' << to_string(kind);
    defined.push_back(&*curve);
  }
  out << '\n';
  if (defined.empty()) return;
  const auto& grid = defined.front()->grid;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out << format_real(grid[g]);
    for (const auto* c : defined) out << ',' << format_real(c->density[g]);
    out << '\n';
  }
}

}  // namespace bitrel
