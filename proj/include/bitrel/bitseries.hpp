#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bitrel {

/// A binary event stream f(t), t in [0, n), packed LSB-first into 64-bit words.
///
/// Sample t lives in bit (t % 64) of word (t / 64). Bits past n in the last
/// word are always zero, so bitwise combinations of two series never need
/// masking before a popcount.
class BitSeries {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  /// All-zero series of n samples. Throws UsageError when n == 0.
  explicit BitSeries(std::size_t n);

  /// Parses a string of '0'/'1' characters.
  static BitSeries from_string(std::string_view bits);
  /// One byte per sample; any non-zero byte is a 1.
  static BitSeries from_samples(std::span<const std::uint8_t> samples);
  /// Adopts packed words. Throws UsageError on wrong word count or non-zero pad bits.
  static BitSeries from_words(std::size_t n, std::vector<Word> words);

  std::size_t size() const noexcept { return n_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::span<const Word> words() const noexcept { return words_; }

  bool get(std::size_t t) const;
  void set(std::size_t t, bool value);

  std::size_t popcount() const noexcept;
  std::string to_string() const;

  BitSeries& operator&=(const BitSeries& other);
  BitSeries& operator|=(const BitSeries& other);
  BitSeries& operator^=(const BitSeries& other);

  friend bool operator==(const BitSeries&, const BitSeries&) = default;

 private:
  std::size_t n_;
  std::vector<Word> words_;
};

BitSeries operator&(BitSeries lhs, const BitSeries& rhs);
BitSeries operator|(BitSeries lhs, const BitSeries& rhs);
BitSeries operator^(BitSeries lhs, const BitSeries& rhs);

/// The weighting function w(t) shared by every expectation in one analysis.
///
/// Uniform and rectangular-window weightings are evaluated with word popcounts;
/// explicit weightings accumulate w(t) sequentially in t.
class Weighting {
 public:
  enum class Kind { Uniform, Window, Explicit };

  static Weighting uniform(std::size_t n);
  /// Weight 1 on [begin, end), 0 elsewhere. Requires begin < end <= n.
  static Weighting window(std::size_t n, std::size_t begin, std::size_t end);
  /// Requires every weight finite and >= 0 and a positive total.
  static Weighting explicit_weights(std::vector<double> weights);

  Kind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t window_begin() const noexcept { return begin_; }
  std::size_t window_end() const noexcept { return end_; }
  double weight(std::size_t t) const;
  /// Sum of w(t), accumulated sequentially in t.
  double total() const noexcept { return total_; }
  std::span<const double> explicit_values() const noexcept { return weights_; }

 private:
  Weighting(Kind kind, std::size_t n) : kind_(kind), n_(n) {}

  Kind kind_;
  std::size_t n_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// Weighted mean of f under w. Result is in [0, 1].
double expectation(const BitSeries& f, const Weighting& w);
/// Weighted mean of fx AND fy.
double expectation_product(const BitSeries& fx, const BitSeries& fy, const Weighting& w);
/// Weighted mean of fx XOR fy, i.e. E[|fx - fy|] for binary data.
double expectation_absdiff(const BitSeries& fx, const BitSeries& fy, const Weighting& w);

/// Weighted mean of the word-wise combination produced by `word_at(i)`.
/// Shared by the three expectations above and by the pair-moment routine.
template <typename WordFn>
double weighted_mean_of(const Weighting& w, std::size_t word_count, WordFn&& word_at);

}  // namespace bitrel

#include "bitrel/detail/bitseries_impl.hpp"
