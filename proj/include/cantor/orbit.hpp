#pragma once

// The orbit map T_{Q,n}(x) = (q_1 ... q_n) x mod 1.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "cantor/basic_sequence.hpp"
#include "cantor/detail/tail_compare.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/rational.hpp"

namespace cantor {

/// values[n] = T_{Q,n}(x) for n = 0..N.
struct OrbitSample {
  std::vector<Rational> values;

  std::size_t size() const { return values.size(); }
};

/// Exact orbit of a rational by the recurrence T_{n+1} = frac(q_{n+1} T_n).
inline OrbitSample t_orbit(const Rational& x, const BasicSequence& q, std::size_t steps) {
  OrbitSample out;
  out.values.reserve(steps + 1);
  const auto qs = q.prefix(steps);
  out.values.push_back(frac_of(x));
  for (std::size_t n = 0; n < steps; ++n) out.values.push_back(frac_of(out.values.back() * qs[n]));
  return out;
}

/// Lazy exact orbit of the value of a digit prefix, lo = E_0.E_1...E_N: point n (0 <= n < N) is
/// T_{Q,n}(lo) = sum_{m > n} E_m / (q_{n+1} ... q_m). Points are held as double approximations
/// with a proven error bound and compared exactly when the approximations cannot separate them.
class StreamOrbit {
 public:
  /// Absolute error bound of approx(n).
  static constexpr double kApproxError = 1e-13;

  explicit StreamOrbit(const DigitStream& s)
      : digits_(s.digits), radices_(s.radix.prefix(s.size())), cursor_(digits_, radices_, Tail::Zero) {
    require_valid(s);
    approx_.assign(digits_.size(), 0.0);
    double v = 0.0;
    constexpr double kExactLimit = 9007199254740992.0;  // 2^53
    for (std::size_t i = digits_.size(); i-- > 0;) {
      const double q = radices_[i].get_d();
      if (q < kExactLimit) {
        v = (digits_[i].get_d() + v) / q;
      } else {
        v = Rational(digits_[i], radices_[i]).get_d() + v / q;
      }
      v = std::clamp(v, 0.0, 1.0);
      approx_[i] = v;
    }
  }

  StreamOrbit(const StreamOrbit&) = delete;
  StreamOrbit& operator=(const StreamOrbit&) = delete;
  StreamOrbit(StreamOrbit&&) = default;

  std::size_t size() const { return digits_.size(); }

  double approx(std::size_t n) const { return approx_[n]; }

  Rational exact(std::size_t n) const {
    return tail_value(std::span<const BigInt>(digits_).subspan(n), std::span<const BigInt>(radices_).subspan(n));
  }

  /// Sign of T_n - r.
  std::strong_ordering compare(std::size_t n, const Rational& r) const {
    if (approx_[n] < r.get_d() - kApproxError) return std::strong_ordering::less;
    if (approx_[n] > r.get_d() + kApproxError) return std::strong_ordering::greater;
    if (sgn(r) < 0) return std::strong_ordering::greater;
    // T_n - u/v  <=>  v * T_n - u
    switch (cursor_.compare(n, r.get_den(), r.get_num())) {
      case detail::TailOrder::Less:
        return std::strong_ordering::less;
      case detail::TailOrder::Equal:
        return std::strong_ordering::equal;
      default:
        return std::strong_ordering::greater;
    }
  }

  /// Sign of T_i - T_j.
  std::strong_ordering compare(std::size_t i, std::size_t j) const {
    if (i == j) return std::strong_ordering::equal;
    if (approx_[i] < approx_[j] - 2 * kApproxError) return std::strong_ordering::less;
    if (approx_[i] > approx_[j] + 2 * kApproxError) return std::strong_ordering::greater;
    return compare_refined(i, j);
  }

  std::span<const BigInt> digits() const { return digits_; }
  std::span<const BigInt> radices() const { return radices_; }

 private:
  // Widens both truncations until their enclosures separate or both become exact.
  std::strong_ordering compare_refined(std::size_t i, std::size_t j) const {
    for (std::size_t len = 32;; len *= 2) {
      const auto li = std::min(len, size() - i);
      const auto lj = std::min(len, size() - j);
      const auto a = partial(i, li);
      const auto b = partial(j, lj);
      const bool exact_a = i + li == size();
      const bool exact_b = j + lj == size();
      // An inexact enclosure means lo <= T < lo + width.
      if (exact_a && exact_b) return cmp(a.lo, b.lo) <=> 0;
      if (exact_a ? a.lo < b.lo : a.lo + a.width <= b.lo) return std::strong_ordering::less;
      if (exact_b ? b.lo < a.lo : b.lo + b.width <= a.lo) return std::strong_ordering::greater;
    }
  }

  struct Enclosure {
    Rational lo;
    Rational width;
  };

  Enclosure partial(std::size_t start, std::size_t len) const {
    const std::span<const BigInt> d(digits_), q(radices_);
    if (len == 0) return {0, 1};
    auto f = detail::tail_fraction(d.subspan(start, len), q.subspan(start, len));
    return {make_rational(f.num, f.den), Rational(1, f.den)};
  }

  std::vector<BigInt> digits_;
  std::vector<BigInt> radices_;
  std::vector<double> approx_;
  detail::TailCursor cursor_;
};

}  // namespace cantor
