#include "bitrel/bitseries.hpp"

#include <cmath>
#include <string>

#include "bitrel/error.hpp"

namespace bitrel {

namespace {

std::size_t words_for(std::size_t n) { return (n + BitSeries::kWordBits - 1) / BitSeries::kWordBits; }

void require_same_length(const BitSeries& a, const BitSeries& b) {
  if (a.size() != b.size()) {
    throw UsageError("bit series length mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

void require_weighting_length(std::size_t n, const Weighting& w) {
  if (n != w.size()) {
    throw UsageError("weighting length " + std::to_string(w.size()) + " does not match series length " +
                     std::to_string(n));
  }
}

}  // namespace

BitSeries::BitSeries(std::size_t n) : n_(n), words_(words_for(n), 0) {
  if (n == 0) throw UsageError("bit series must hold at least one sample");
}

BitSeries BitSeries::from_string(std::string_view bits) {
  BitSeries out(bits.size());
  for (std::size_t t = 0; t < bits.size(); ++t) {
    if (bits[t] == '1') {
      out.set(t, true);
    } else if (bits[t] != '0') {
      throw UsageError(std::string("invalid sample character '") + bits[t] + "' at index " + std::to_string(t));
    }
  }
  return out;
}

BitSeries BitSeries::from_samples(std::span<const std::uint8_t> samples) {
  BitSeries out(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) {
    if (samples[t] != 0) out.set(t, true);
  }
  return out;
}

BitSeries BitSeries::from_words(std::size_t n, std::vector<Word> words) {
  BitSeries out(n);
  if (words.size() != out.words_.size()) {
    throw UsageError("expected " + std::to_string(out.words_.size()) + " words for " + std::to_string(n) +
                     " samples, got " + std::to_string(words.size()));
  }
  const std::size_t tail = n % kWordBits;
  if (tail != 0 && (words.back() >> tail) != 0) throw UsageError("non-zero pad bits past sample count");
  out.words_ = std::move(words);
  return out;
}

bool BitSeries::get(std::size_t t) const {
  if (t >= n_) throw UsageError("sample index " + std::to_string(t) + " out of range");
  return (words_[t / kWordBits] >> (t % kWordBits)) & 1U;
}

void BitSeries::set(std::size_t t, bool value) {
  if (t >= n_) throw UsageError("sample index " + std::to_string(t) + " out of range");
  const Word mask = Word{1} << (t % kWordBits);
  if (value) {
    words_[t / kWordBits] |= mask;
  } else {
    words_[t / kWordBits] &= ~mask;
  }
}

std::size_t BitSeries::popcount() const noexcept {
  std::size_t count = 0;
  for (Word w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

std::string BitSeries::to_string() const {
  std::string out(n_, '0');
  for (std::size_t t = 0; t < n_; ++t) {
    if (get(t)) out[t] = '1';
  }
  return out;
}

BitSeries& BitSeries::operator&=(const BitSeries& other) {
  require_same_length(*this, other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitSeries& BitSeries::operator|=(const BitSeries& other) {
  require_same_length(*this, other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BitSeries& BitSeries::operator^=(const BitSeries& other) {
  require_same_length(*this, other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

BitSeries operator&(BitSeries lhs, const BitSeries& rhs) { return lhs &= rhs; }
BitSeries operator|(BitSeries lhs, const BitSeries& rhs) { return lhs |= rhs; }
BitSeries operator^(BitSeries lhs, const BitSeries& rhs) { return lhs ^= rhs; }

Weighting Weighting::uniform(std::size_t n) {
  if (n == 0) throw UsageError("weighting must cover at least one sample");
  Weighting w(Kind::Uniform, n);
  w.begin_ = 0;
  w.end_ = n;
  w.total_ = static_cast<double>(n);
  return w;
}

Weighting Weighting::window(std::size_t n, std::size_t begin, std::size_t end) {
  if (begin >= end || end > n) {
    throw UsageError("window [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") must be non-empty and inside [0, " + std::to_string(n) + ")");
  }
  Weighting w(Kind::Window, n);
  w.begin_ = begin;
  w.end_ = end;
  w.total_ = static_cast<double>(end - begin);
  return w;
}

Weighting Weighting::explicit_weights(std::vector<double> weights) {
  if (weights.empty()) throw UsageError("weighting must cover at least one sample");
  double total = 0.0;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    if (!std::isfinite(weights[t]) || weights[t] < 0.0) {
      throw UsageError("weight at index " + std::to_string(t) + " must be finite and non-negative");
    }
    total += weights[t];
  }
  if (!(total > 0.0)) throw UsageError("weights must have a positive sum");
  Weighting w(Kind::Explicit, weights.size());
  w.end_ = weights.size();
  w.weights_ = std::move(weights);
  w.total_ = total;
  return w;
}

double Weighting::weight(std::size_t t) const {
  if (t >= n_) throw UsageError("weight index " + std::to_string(t) + " out of range");
  switch (kind_) {
    case Kind::Uniform:
      return 1.0;
    case Kind::Window:
      return (t >= begin_ && t < end_) ? 1.0 : 0.0;
    case Kind::Explicit:
      return weights_[t];
  }
  return 0.0;
}

double expectation(const BitSeries& f, const Weighting& w) {
  require_weighting_length(f.size(), w);
  const auto words = f.words();
  return weighted_mean_of(w, words.size(), [&](std::size_t i) { return words[i]; });
}

double expectation_product(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  require_same_length(fx, fy);
  require_weighting_length(fx.size(), w);
  const auto a = fx.words();
  const auto b = fy.words();
  return weighted_mean_of(w, a.size(), [&](std::size_t i) { return a[i] & b[i]; });
}

double expectation_absdiff(const BitSeries& fx, const BitSeries& fy, const Weighting& w) {
  require_same_length(fx, fy);
  require_weighting_length(fx.size(), w);
  const auto a = fx.words();
  const auto b = fy.words();
  return weighted_mean_of(w, a.size(), [&](std::size_t i) { return a[i] ^ b[i]; });
}

}  // namespace bitrel
