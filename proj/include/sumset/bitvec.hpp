#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <vector>

namespace sumset {

// Flat bit vector. Doubles as (a) a characteristic vector of a set of naturals,
// where bit i stands for the integer i+1, and (b) a candidate/adjacency row in
// the witness search, where bit i stands for vertex index i.
class BitVec {
 public:
  BitVec() : nbits_(0) {}
  explicit BitVec(std::size_t nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }
  std::size_t word_count() const { return w_.size(); }
  std::uint64_t* words() { return w_.data(); }
  const std::uint64_t* words() const { return w_.data(); }

  void set_bit(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset_bit(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test_bit(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  // 1-based naturals view.
  bool contains(std::uint64_t n) const { return n >= 1 && n <= nbits_ && test_bit(n - 1); }
  void insert(std::uint64_t n) { set_bit(n - 1); }

  void clear() { std::memset(w_.data(), 0, w_.size() * 8); }

  void fill_all() {
    if (w_.empty()) return;
    std::memset(w_.data(), 0xff, w_.size() * 8);
    trim();
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : w_) c += std::popcount(w);
    return c;
  }

  // Number of set bits among bit indices [0, i), i.e. members <= i in the
  // 1-based view.
  std::size_t count_prefix(std::size_t i) const {
    if (i > nbits_) i = nbits_;
    std::size_t full = i >> 6, c = 0;
    for (std::size_t k = 0; k < full; ++k) c += std::popcount(w_[k]);
    std::size_t rem = i & 63;
    if (rem) c += std::popcount(w_[full] & ((std::uint64_t{1} << rem) - 1));
    return c;
  }

  bool any() const {
    for (std::uint64_t w : w_)
      if (w) return true;
    return false;
  }

  // First set bit at index >= from, or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find_next(std::size_t from) const {
    if (from >= nbits_) return npos;
    std::size_t k = from >> 6;
    std::uint64_t w = w_[k] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (w) return (k << 6) + std::countr_zero(w);
      if (++k == w_.size()) return npos;
      w = w_[k];
    }
  }
  std::size_t find_first() const { return find_next(0); }

  void and_with(const BitVec& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
  }
  void or_with(const BitVec& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
  }
  void andnot_with(const BitVec& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= ~o.w_[k];
  }
  void flip_all() {
    for (auto& w : w_) w = ~w;
    trim();
  }

  // this := a & b, sizes must match.
  void assign_and(const BitVec& a, const BitVec& b) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] = a.w_[k] & b.w_[k];
  }

  bool intersects(const BitVec& o) const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & o.w_[k]) return true;
    return false;
  }

  // Membership shift: result bit i is set iff bit i-t was set (t may be
  // negative). Bits shifted past either end are dropped.
  void shift_members(std::int64_t t) {
    if (t == 0 || w_.empty()) return;
    if (t > 0) {
      std::size_t wsh = static_cast<std::size_t>(t) >> 6, bsh = static_cast<std::size_t>(t) & 63;
      for (std::size_t k = w_.size(); k-- > 0;) {
        std::uint64_t v = 0;
        if (k >= wsh) {
          v = w_[k - wsh] << bsh;
          if (bsh && k > wsh) v |= w_[k - wsh - 1] >> (64 - bsh);
        }
        w_[k] = v;
      }
    } else {
      std::size_t s = static_cast<std::size_t>(-t);
      std::size_t wsh = s >> 6, bsh = s & 63;
      for (std::size_t k = 0; k < w_.size(); ++k) {
        std::uint64_t v = 0;
        if (k + wsh < w_.size()) {
          v = w_[k + wsh] >> bsh;
          if (bsh && k + wsh + 1 < w_.size()) v |= w_[k + wsh + 1] << (64 - bsh);
        }
        w_[k] = v;
      }
    }
    trim();
  }

  // Set every bit for 1-based members n in [lo, hi) with n ≡ res (mod m).
  void fill_range(std::uint64_t lo, std::uint64_t hi, std::uint64_t m = 1, std::uint64_t res = 0) {
    if (lo < 1) lo = 1;
    if (hi > nbits_ + 1) hi = nbits_ + 1;
    if (lo >= hi) return;
    if (m == 1) {
      // Word-filled middle, bit-filled edges.
      std::size_t a = lo - 1, b = hi - 1;  // bit range [a, b)
      std::size_t aw = (a + 63) >> 6, bw = b >> 6;
      if (aw > bw) {
        for (std::size_t i = a; i < b; ++i) set_bit(i);
        return;
      }
      for (std::size_t i = a; i < (aw << 6); ++i) set_bit(i);
      if (aw < bw) std::memset(w_.data() + aw, 0xff, (bw - aw) * 8);
      for (std::size_t i = bw << 6; i < b; ++i) set_bit(i);
      return;
    }
    std::uint64_t first = lo + ((res + m - lo % m) % m);
    for (std::uint64_t n = first; n < hi; n += m) set_bit(n - 1);
  }

  bool operator==(const BitVec& o) const { return nbits_ == o.nbits_ && w_ == o.w_; }

 private:
  void trim() {
    std::size_t rem = nbits_ & 63;
    if (rem && !w_.empty()) w_.back() &= (std::uint64_t{1} << rem) - 1;
  }

  std::size_t nbits_;
  std::vector<std::uint64_t> w_;
};

}  // namespace sumset
