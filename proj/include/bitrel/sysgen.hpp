#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "bitrel/bitseries.hpp"

namespace bitrel {

// Generator for synthetic SoC-like systems: a bipartite graph of src nodes
// (independent Bernoulli streams) feeding dst nodes (boolean functions of
// their src inputs), with the ground-truth adjacency known by construction.
//
// Random streams. Every system carries its own 64-bit seed, derived from the
// corpus seed and the system ordinal by system_seed(). From that seed:
//   - structure (node counts, densities, fan-in, operators) is drawn from one
//     std::mt19937_64 seeded with seed_seq{lo32, hi32, 0};
//   - src node k samples its trace from its own std::mt19937_64 seeded with
//     seed_seq{lo32, hi32, 1, k}.
// Dst traces are computed from src traces and consume no randomness. The
// same (seed, ordinal, n) therefore reproduces a system bit for bit.

inline constexpr std::uint32_t kMaxNodesPerSide = 50;

enum class SystemType { And, Or, Xor, Mix, Lha };
enum class BoolOp { And, Or, Xor };

inline constexpr std::array<SystemType, 5> kAllSystemTypes = {SystemType::And, SystemType::Or, SystemType::Xor,
                                                              SystemType::Mix, SystemType::Lha};

std::string_view to_string(SystemType type);
std::string_view to_string(BoolOp op);
std::optional<SystemType> parse_system_type(std::string_view name);
std::optional<BoolOp> parse_bool_op(std::string_view name);

/// Boolean function of a dst node.
///
/// `inputs` are distinct ascending src indices. `ops` is empty for a single
/// input (identity), holds one operator folded across all inputs for the
/// homogeneous types (AND/OR/XOR/MIX), and holds |inputs|-1 operators applied
/// left-associatively for LHA.
struct NodeFunction {
  std::vector<std::uint32_t> inputs;
  std::vector<BoolOp> ops;

  friend bool operator==(const NodeFunction&, const NodeFunction&) = default;
};

struct SystemSpec {
  std::uint64_t ordinal = 0;
  std::uint64_t seed = 0;
  SystemType type = SystemType::And;
  std::uint32_t m_src = 0;
  std::uint32_t m_dst = 0;
  std::vector<double> src_density;
  std::vector<NodeFunction> dst_functions;

  std::size_t node_count() const noexcept { return std::size_t{m_src} + m_dst; }
  /// Throws UsageError if any structural invariant is broken.
  void validate() const;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Symmetric ground-truth adjacency over src nodes [0, m_src) then dst nodes.
class KnownAdjacency {
 public:
  explicit KnownAdjacency(std::size_t m);

  std::size_t size() const noexcept { return m_; }
  bool connected(std::size_t i, std::size_t j) const;
  void connect(std::size_t i, std::size_t j);
  /// Number of unordered connected pairs.
  std::size_t edge_count() const noexcept { return edges_; }

 private:
  std::size_t m_;
  std::size_t edges_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Inverse-CDF transform of arcsine(0,1): sin^2(pi u / 2).
double arcsine_draw(double u);

/// Per-system seed from the corpus seed and ordinal (splitmix64 mixing).
std::uint64_t system_seed(std::uint64_t corpus_seed, std::uint64_t ordinal);

/// Round-robin AND, OR, XOR, MIX, LHA by ordinal.
SystemType system_type_for(std::uint64_t ordinal);

/// One density draw: arcsine_draw of a uniform on [0, 1).
double draw_density(std::mt19937_64& rng);
/// One raw Lognormal(0, 1) fan-in draw, before discretization.
double draw_raw_fan_in(std::mt19937_64& rng);
/// round(raw) clamped to [1, m_src].
std::uint32_t discretize_fan_in(double raw, std::uint32_t m_src);

SystemSpec draw_system(std::uint64_t corpus_seed, std::uint64_t ordinal);

/// Draws the structure for an explicit per-system seed.
SystemSpec draw_system_from_seed(std::uint64_t seed, std::uint64_t ordinal, SystemType type);

bool apply(BoolOp op, bool a, bool b);
/// Evaluates fn on a vector of src values (indexed by src node).
bool eval_function(const NodeFunction& fn, std::span<const std::uint8_t> src_values);

/// Traces for all nodes, src nodes first, each of length n.
std::vector<BitSeries> sample_traces(const SystemSpec& spec, std::size_t n);

KnownAdjacency known_adjacency(const SystemSpec& spec);

}  // namespace bitrel
