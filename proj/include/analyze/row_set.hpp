#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace analyze {

/// Dense bitset over fact row ids 0..size-1.
class RowSet {
 public:
  RowSet() = default;
  explicit RowSet(std::size_t size, bool filled = false)
      : size_(size), words_((size + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
    trim();
  }

  static RowSet all(std::size_t size) { return RowSet(size, true); }

  std::size_t size() const noexcept { return size_; }

  void set(std::size_t row) { words_[row >> 6] |= std::uint64_t{1} << (row & 63); }
  bool test(std::size_t row) const { return (words_[row >> 6] >> (row & 63)) & 1; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  bool empty() const noexcept {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  RowSet& operator&=(const RowSet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }
  RowSet& operator|=(const RowSet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }
  friend RowSet operator&(RowSet a, const RowSet& b) { return a &= b; }
  friend RowSet operator|(RowSet a, const RowSet& b) { return a |= b; }
  friend bool operator==(const RowSet&, const RowSet&) = default;

  /// True when every row of *this is also in other.
  bool subset_of(const RowSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  /// Calls fn(row) for every set row in ascending order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(bits));
        fn((w << 6) | bit);
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> to_vector() const {
    std::vector<std::size_t> rows;
    for_each([&](std::size_t r) { rows.push_back(r); });
    return rows;
  }

 private:
  void trim() {
    if (size_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace analyze
