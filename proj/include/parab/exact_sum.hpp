#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

namespace parab {

// Fixed-point accumulator that sums IEEE doubles without rounding.
// Layout: two's-complement integer over NLIMB 64-bit limbs, where limb k
// carries weight 2^(64*k - BIAS). BIAS covers the subnormal tail
// (2^-1074 needs 1074+52 fractional bits) and the top limbs absorb sums of
// up to ~2^60 values of magnitude up to 2^1024. Because the representation
// is exact, sums and differences of accumulators are order-independent and
// the final to_double() is the correctly rounded value of the exact total.
class ExactAcc {
public:
  static constexpr int kLimbs = 36;
  static constexpr int kBias = 1152;  // quantum 2^-1152

  ExactAcc() { limbs_.fill(0); }

  void clear() { limbs_.fill(0); }

  bool is_zero() const {
    for (auto v : limbs_)
      if (v != 0) return false;
    return true;
  }

  void add(double x) {
    if (x == 0.0) return;
    int e;
    double fr = std::frexp(x, &e);  // x = fr * 2^e, |fr| in [0.5,1)
    auto m = static_cast<long long>(fr * 9007199254740992.0);  // fr * 2^53
    add_scaled(m, e - 53);
  }

  // adds m * 2^exp for integer m (|m| < 2^62)
  void add_scaled(long long m, int exp) {
    if (m == 0) return;
    const int shift = exp + kBias;
    const int k = shift >> 6;
    const int r = shift & 63;
    const bool neg = m < 0;
    unsigned long long mag = neg ? static_cast<unsigned long long>(-(m + 1)) + 1ull
                                 : static_cast<unsigned long long>(m);
    unsigned long long lo = r ? (mag << r) : mag;
    unsigned long long hi = r ? (mag >> (64 - r)) : 0ull;
    if (neg) {
      borrow_at(k, lo);
      borrow_at(k + 1, hi);
    } else {
      carry_at(k, lo);
      carry_at(k + 1, hi);
    }
  }

  void add(const ExactAcc& o) {
    unsigned __int128 carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
      unsigned __int128 s = static_cast<unsigned __int128>(limbs_[i]) + o.limbs_[i] + carry;
      limbs_[i] = static_cast<uint64_t>(s);
      carry = s >> 64;
    }
  }

  void sub(const ExactAcc& o) {
    unsigned __int128 borrow = 0;
    for (int i = 0; i < kLimbs; ++i) {
      unsigned __int128 s = static_cast<unsigned __int128>(limbs_[i]) -
                            static_cast<unsigned __int128>(o.limbs_[i]) - borrow;
      limbs_[i] = static_cast<uint64_t>(s);
      borrow = (s >> 64) ? 1 : 0;
    }
  }

  // multiply by a small nonnegative integer (used by exact pigeonhole checks)
  void mul_uint(uint64_t c) {
    unsigned __int128 carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
      unsigned __int128 p = static_cast<unsigned __int128>(limbs_[i]) * c + carry;
      limbs_[i] = static_cast<uint64_t>(p);
      carry = p >> 64;
    }
  }

  bool negative() const { return (limbs_[kLimbs - 1] >> 63) != 0; }

  // exact three-way comparison of represented values
  int compare(const ExactAcc& o) const {
    const bool an = negative(), on = o.negative();
    if (an != on) return an ? -1 : 1;
    for (int i = kLimbs - 1; i >= 0; --i) {
      if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
    }
    return 0;
  }

  // correctly rounded (nearest-even) double of the exact value
  double to_double() const {
    ExactAcc tmp;
    const ExactAcc* src = this;
    bool neg = negative();
    if (neg) {
      tmp = *this;
      tmp.negate();
      src = &tmp;
    }
    int top = kLimbs - 1;
    while (top >= 0 && src->limbs_[top] == 0) --top;
    if (top < 0) return 0.0;
    int hb = 63;
    while (!((src->limbs_[top] >> hb) & 1ull)) --hb;
    // absolute bit position of the leading bit (weight 2^(pos - kBias))
    const long long pos = 64ll * top + hb;
    // gather 55 bits starting at the leading bit: 53 mantissa + guard + round
    unsigned long long bits = 0;
    bool sticky = false;
    for (long long p = pos; p > pos - 55; --p) {
      bits <<= 1;
      if (p >= 0) {
        const int k = static_cast<int>(p >> 6), r = static_cast<int>(p & 63);
        bits |= (src->limbs_[k] >> r) & 1ull;
      }
    }
    for (long long p = pos - 55; p >= 0; --p) {
      const int k = static_cast<int>(p >> 6), r = static_cast<int>(p & 63);
      if ((src->limbs_[k] >> r) & 1ull) {
        sticky = true;
        break;
      }
    }
    unsigned long long mant = bits >> 2;  // top 53 bits
    const unsigned long long guard = (bits >> 1) & 1ull, round = bits & 1ull;
    if (guard && (round || sticky || (mant & 1ull))) ++mant;
    double val = std::ldexp(static_cast<double>(mant), static_cast<int>(pos - kBias) - 52);
    return neg ? -val : val;
  }

private:
  void negate() {
    unsigned __int128 carry = 1;
    for (int i = 0; i < kLimbs; ++i) {
      unsigned __int128 s = static_cast<unsigned __int128>(~limbs_[i]) + carry;
      limbs_[i] = static_cast<uint64_t>(s);
      carry = s >> 64;
    }
  }

  void carry_at(int k, unsigned long long v) {
    if (!v) return;
    for (int i = k; i < kLimbs && v; ++i) {
      unsigned __int128 s = static_cast<unsigned __int128>(limbs_[i]) + v;
      limbs_[i] = static_cast<uint64_t>(s);
      v = static_cast<unsigned long long>(s >> 64);
    }
  }

  void borrow_at(int k, unsigned long long v) {
    if (!v) return;
    unsigned long long borrow = 0;
    for (int i = k; i < kLimbs; ++i) {
      unsigned __int128 s = static_cast<unsigned __int128>(limbs_[i]) -
                            static_cast<unsigned __int128>(i == k ? v : 0) - borrow;
      limbs_[i] = static_cast<uint64_t>(s);
      borrow = (s >> 64) ? 1 : 0;
      if (i > k && !borrow) break;
    }
  }

  std::array<uint64_t, kLimbs> limbs_;
};

// exact sum of a range of doubles, correctly rounded once
template <typename It>
double exact_sum(It first, It last) {
  ExactAcc acc;
  for (; first != last; ++first) acc.add(*first);
  return acc.to_double();
}

}  // namespace parab
