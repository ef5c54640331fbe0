#include "bitrel/sysgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "bitrel/error.hpp"

namespace bitrel {

namespace {

constexpr std::uint32_t kStructureStream = 0;
constexpr std::uint32_t kSrcStream = 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::initializer_list<std::uint32_t> tags) {
  std::vector<std::uint32_t> material = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  material.insert(material.end(), tags.begin(), tags.end());
  std::seed_seq seq(material.begin(), material.end());
  return std::mt19937_64(seq);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

BoolOp draw_op(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 2);
  return static_cast<BoolOp>(pick(rng));
}

}  // namespace

std::string_view to_string(SystemType type) {
  switch (type) {
    case SystemType::And: return "AND";
    case SystemType::Or: return "OR";
    case SystemType::Xor: return "XOR";
    case SystemType::Mix: return "MIX";
    case SystemType::Lha: return "LHA";
  }
  return "?";
}

std::string_view to_string(BoolOp op) {
  switch (op) {
    case BoolOp::And: return "and";
    case BoolOp::Or: return "or";
    case BoolOp::Xor: return "xor";
  }
  return "?";
}

std::optional<SystemType> parse_system_type(std::string_view name) {
  const std::string key = lower(name);
  for (SystemType t : kAllSystemTypes) {
    if (key == lower(to_string(t))) return t;
  }
  return std::nullopt;
}

std::optional<BoolOp> parse_bool_op(std::string_view name) {
  const std::string key = lower(name);
  for (BoolOp op : {BoolOp::And, BoolOp::Or, BoolOp::Xor}) {
    if (key == to_string(op)) return op;
  }
  return std::nullopt;
}

void SystemSpec::validate() const {
  auto fail = [&](const std::string& what) {
    throw UsageError("system " + std::to_string(ordinal) + ": " + what);
  };
  if (m_src < 1 || m_src > kMaxNodesPerSide) fail("m_src out of [1, 50]");
  if (m_dst < 1 || m_dst > kMaxNodesPerSide) fail("m_dst out of [1, 50]");
  if (src_density.size() != m_src) fail("density count does not match m_src");
  for (double p : src_density) {
    if (!(p >= 0.0 && p <= 1.0)) fail("src density outside [0, 1]");
  }
  if (dst_functions.size() != m_dst) fail("dst function count does not match m_dst");

  for (std::size_t d = 0; d < dst_functions.size(); ++d) {
    const NodeFunction& fn = dst_functions[d];
    const std::string where = "dst " + std::to_string(d) + ": ";
    const std::size_t k = fn.inputs.size();
    if (k == 0) fail(where + "no inputs");
    for (std::size_t i = 0; i < k; ++i) {
      if (fn.inputs[i] >= m_src) fail(where + "input index out of range");
      if (i > 0 && fn.inputs[i] <= fn.inputs[i - 1]) fail(where + "inputs must be distinct and ascending");
    }
    if (k == 1) {
      if (!fn.ops.empty()) fail(where + "single-input node takes no operator");
      continue;
    }
    if (type == SystemType::Lha) {
      if (fn.ops.size() != k - 1) fail(where + "LHA node needs |inputs|-1 operators");
      continue;
    }
    if (fn.ops.size() != 1) fail(where + "homogeneous node needs exactly one operator");
    const BoolOp op = fn.ops.front();
    if ((type == SystemType::And && op != BoolOp::And) || (type == SystemType::Or && op != BoolOp::Or) ||
        (type == SystemType::Xor && op != BoolOp::Xor)) {
      fail(where + "operator does not match system type");
    }
  }
}

KnownAdjacency::KnownAdjacency(std::size_t m) : m_(m), cells_(m * m, 0) {
  if (m < 2) throw UsageError("adjacency needs at least 2 nodes");
}

bool KnownAdjacency::connected(std::size_t i, std::size_t j) const {
  if (i >= m_ || j >= m_) throw UsageError("adjacency index out of range");
  if (i == j) throw UsageError("adjacency diagonal is excluded");
  return cells_[i * m_ + j] != 0;
}

void KnownAdjacency::connect(std::size_t i, std::size_t j) {
  if (connected(i, j)) return;
  cells_[i * m_ + j] = 1;
  cells_[j * m_ + i] = 1;
  ++edges_;
}

double arcsine_draw(double u) {
  const double s = std::sin(std::numbers::pi * u / 2.0);
  return std::clamp(s * s, 0.0, 1.0);
}

std::uint64_t system_seed(std::uint64_t corpus_seed, std::uint64_t ordinal) {
  return splitmix64(splitmix64(corpus_seed) ^ ordinal);
}

SystemType system_type_for(std::uint64_t ordinal) { return kAllSystemTypes[ordinal % kAllSystemTypes.size()]; }

double draw_density(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return arcsine_draw(unit(rng));
}

double draw_raw_fan_in(std::mt19937_64& rng) {
  std::lognormal_distribution<double> fan_in(0.0, 1.0);
  return fan_in(rng);
}

std::uint32_t discretize_fan_in(double raw, std::uint32_t m_src) {
  const double rounded = std::round(raw);
  if (!(rounded >= 1.0)) return 1;
  if (rounded >= static_cast<double>(m_src)) return m_src;
  return static_cast<std::uint32_t>(rounded);
}

SystemSpec draw_system(std::uint64_t corpus_seed, std::uint64_t ordinal) {
  return draw_system_from_seed(system_seed(corpus_seed, ordinal), ordinal, system_type_for(ordinal));
}

SystemSpec draw_system_from_seed(std::uint64_t seed, std::uint64_t ordinal, SystemType type) {
  auto rng = make_stream(seed, {kStructureStream});
  std::uniform_int_distribution<std::uint32_t> side(1, kMaxNodesPerSide);

  SystemSpec spec;
  spec.ordinal = ordinal;
  spec.seed = seed;
  spec.type = type;
  spec.m_src = side(rng);
  spec.m_dst = side(rng);

  spec.src_density.reserve(spec.m_src);
  for (std::uint32_t s = 0; s < spec.m_src; ++s) spec.src_density.push_back(draw_density(rng));

  std::vector<std::uint32_t> pool(spec.m_src);
  spec.dst_functions.reserve(spec.m_dst);
  for (std::uint32_t d = 0; d < spec.m_dst; ++d) {
    const std::uint32_t k = discretize_fan_in(draw_raw_fan_in(rng), spec.m_src);

    // Partial Fisher-Yates: the first k entries become a uniform k-subset.
    std::iota(pool.begin(), pool.end(), 0U);
    for (std::uint32_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::uint32_t> pick(i, spec.m_src - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    NodeFunction fn;
    fn.inputs.assign(pool.begin(), pool.begin() + k);
    std::sort(fn.inputs.begin(), fn.inputs.end());

    if (k > 1) {
      switch (type) {
        case SystemType::And: fn.ops = {BoolOp::And}; break;
        case SystemType::Or: fn.ops = {BoolOp::Or}; break;
        case SystemType::Xor: fn.ops = {BoolOp::Xor}; break;
        case SystemType::Mix: fn.ops = {draw_op(rng)}; break;
        case SystemType::Lha:
          for (std::uint32_t i = 0; i + 1 < k; ++i) fn.ops.push_back(draw_op(rng));
          break;
      }
    }
    spec.dst_functions.push_back(std::move(fn));
  }
  return spec;
}

bool apply(BoolOp op, bool a, bool b) {
  switch (op) {
    case BoolOp::And: return a && b;
    case BoolOp::Or: return a || b;
    case BoolOp::Xor: return a != b;
  }
  return false;
}

namespace {

// Operator applied between input i-1 and input i (i >= 1).
BoolOp op_before(const NodeFunction& fn, std::size_t i) { return fn.ops.size() == 1 ? fn.ops[0] : fn.ops[i - 1]; }

void check_function(const NodeFunction& fn, std::size_t src_count) {
  if (fn.inputs.empty()) throw UsageError("node function has no inputs");
  const std::size_t k = fn.inputs.size();
  if (k > 1 && fn.ops.size() != 1 && fn.ops.size() != k - 1) {
    throw UsageError("node function operator count must be 1 or |inputs|-1");
  }
  for (std::uint32_t in : fn.inputs) {
    if (in >= src_count) throw UsageError("node function input " + std::to_string(in) + " out of range");
  }
}

}  // namespace

bool eval_function(const NodeFunction& fn, std::span<const std::uint8_t> src_values) {
  check_function(fn, src_values.size());
  bool v = src_values[fn.inputs[0]] != 0;
  for (std::size_t i = 1; i < fn.inputs.size(); ++i) {
    v = apply(op_before(fn, i), v, src_values[fn.inputs[i]] != 0);
  }
  return v;
}

std::vector<BitSeries> sample_traces(const SystemSpec& spec, std::size_t n) {
  spec.validate();
  if (n == 0) throw UsageError("sample count must be at least 1");

  std::vector<BitSeries> traces;
  traces.reserve(spec.node_count());
  for (std::uint32_t s = 0; s < spec.m_src; ++s) {
    auto rng = make_stream(spec.seed, {kSrcStream, s});
    std::bernoulli_distribution bit(spec.src_density[s]);
    BitSeries trace(n);
    for (std::size_t t = 0; t < n; ++t) {
      if (bit(rng)) trace.set(t, true);
    }
    traces.push_back(std::move(trace));
  }

  // Bitwise ops act on all 64 samples of a word at once; zero pad bits stay zero.
  for (const NodeFunction& fn : spec.dst_functions) {
    BitSeries value = traces[fn.inputs[0]];
    for (std::size_t i = 1; i < fn.inputs.size(); ++i) {
      const BitSeries& rhs = traces[fn.inputs[i]];
      switch (op_before(fn, i)) {
        case BoolOp::And: value &= rhs; break;
        case BoolOp::Or: value |= rhs; break;
        case BoolOp::Xor: value ^= rhs; break;
      }
    }
    traces.push_back(std::move(value));
  }
  return traces;
}

KnownAdjacency known_adjacency(const SystemSpec& spec) {
  spec.validate();
  KnownAdjacency k(spec.node_count());
  for (std::uint32_t d = 0; d < spec.m_dst; ++d) {
    for (std::uint32_t in : spec.dst_functions[d].inputs) k.connect(spec.m_src + d, in);
  }
  return k;
}

}  // namespace bitrel
