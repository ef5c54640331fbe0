#pragma once

#include <bit>

namespace bitrel {

namespace detail {

// Mask of bits [lo, hi) within one word, 0 <= lo <= hi <= 64.
constexpr BitSeries::Word bit_range_mask(std::size_t lo, std::size_t hi) noexcept {
  if (lo >= hi) return 0;
  const BitSeries::Word upper = hi >= 64 ? ~BitSeries::Word{0} : ((BitSeries::Word{1} << hi) - 1);
  const BitSeries::Word lower = (BitSeries::Word{1} << lo) - 1;
  return upper & ~lower;
}

}  // namespace detail

template <typename WordFn>
double weighted_mean_of(const Weighting& w, std::size_t word_count, WordFn&& word_at) {
  constexpr std::size_t kBits = BitSeries::kWordBits;
  switch (w.kind()) {
    case Weighting::Kind::Uniform: {
      std::size_t count = 0;
      for (std::size_t i = 0; i < word_count; ++i) count += std::popcount(word_at(i));
      return static_cast<double>(count) / static_cast<double>(w.size());
    }
    case Weighting::Kind::Window: {
      const std::size_t begin = w.window_begin();
      const std::size_t end = w.window_end();
      std::size_t count = 0;
      for (std::size_t i = begin / kBits; i < word_count && i * kBits < end; ++i) {
        const std::size_t base = i * kBits;
        const std::size_t lo = begin > base ? begin - base : 0;
        const std::size_t hi = end - base < kBits ? end - base : kBits;
        count += std::popcount(word_at(i) & detail::bit_range_mask(lo, hi));
      }
      return static_cast<double>(count) / static_cast<double>(end - begin);
    }
    case Weighting::Kind::Explicit: {
      const auto weights = w.explicit_values();
      double sum = 0.0;
      for (std::size_t i = 0; i < word_count; ++i) {
        auto word = word_at(i);
        while (word != 0) {
          const auto bit = static_cast<std::size_t>(std::countr_zero(word));
          sum += weights[i * kBits + bit];
          word &= word - 1;
        }
      }
      return sum / w.total();
    }
  }
  return 0.0;
}

}  // namespace bitrel
