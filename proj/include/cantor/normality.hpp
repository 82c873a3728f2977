#pragma once

// Block counts N_n^Q(B, x), normality ratio curves, interval counts A_n(I, X) and the averaged
// digit-perturbation condition.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "cantor/basic_sequence.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/error.hpp"
#include "cantor/orbit.hpp"
#include "cantor/rational.hpp"

namespace cantor {

struct Block {
  std::vector<BigInt> entries;

  Block() = default;
  explicit Block(std::vector<BigInt> e) : entries(std::move(e)) {
    if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "blocks have length >= 1");
    for (const auto& v : entries) {
      if (sgn(v) < 0) throw Error(ErrorCode::InvalidArgument, "block entries are non-negative");
    }
  }
  Block(std::initializer_list<long> e) : Block(std::vector<BigInt>(e.begin(), e.end())) {}

  std::size_t size() const { return entries.size(); }

  /// "0", "0,2", ...
  static Block parse(std::string_view text) {
    std::vector<BigInt> e;
    for (auto part : detail::split(text, ',')) e.push_back(parse_bigint(detail::trim(part)));
    return Block(std::move(e));
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i) s += ',';
      s += entries[i].get_str();
    }
    return s;
  }
};

namespace detail {

inline bool block_at(std::span<const BigInt> digits, std::size_t start, const Block& b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (digits[start + i] != b.entries[i]) return false;
  }
  return true;
}

}  // namespace detail

/// N_n^Q(B, x) = #{1 <= j <= n - k + 1 : (E_j, ..., E_{j+k-1}) = B}; overlaps count.
inline std::uint64_t count_block(std::span<const BigInt> digits, const Block& b, std::size_t n) {
  if (n > digits.size()) throw Error(ErrorCode::IndexOutOfRange, "count_block past the end of the prefix");
  if (b.size() > n) return 0;
  std::uint64_t c = 0;
  for (std::size_t j = 0; j + b.size() <= n; ++j) c += detail::block_at(digits, j, b);
  return c;
}

inline std::uint64_t count_block(const DigitStream& s, const Block& b, std::size_t n) {
  return count_block(s.digits, b, n);
}

struct CurvePoint {
  std::size_t n;
  std::uint64_t count;  // N_n^Q(B, x)
  Rational qnk;         // Q_n^{(k)}
  Rational ratio;       // count / qnk
};

struct NormalityCurve {
  Block block;
  std::vector<CurvePoint> points;
};

/// Ratio curve sampled at n = stride, 2 stride, ... and at N.
inline NormalityCurve normality_curve(const DigitStream& s, const Block& b, std::size_t length, std::size_t stride) {
  if (length == 0 || length > s.size()) throw Error(ErrorCode::IndexOutOfRange, "curve length outside the prefix");
  if (stride == 0) stride = length;
  const std::size_t k = b.size();
  const auto qs = s.radix.prefix(length + k - 1);
  NormalityCurve curve{b, {}};
  std::uint64_t count = 0;
  Rational qsum = 0;
  std::size_t summed = 0;  // Q-terms added so far
  std::vector<BigInt> dens;
  for (std::size_t n = 1; n <= length; ++n) {
    if (n >= k && detail::block_at(s.digits, n - k, b)) ++count;
    if (n % stride != 0 && n != length) continue;
    dens.clear();
    for (std::size_t j = summed; j < n; ++j) {
      dens.push_back(product(std::span<const BigInt>(qs).subspan(j, k)));
    }
    qsum += sum_reciprocals(dens);
    summed = n;
    curve.points.push_back({n, count, qsum, Rational(big(count)) / qsum});
  }
  return curve;
}

/// Half-open [lo, hi) inside [0, 1].
struct Interval {
  Rational lo;
  Rational hi;

  Interval(Rational a, Rational b) : lo(std::move(a)), hi(std::move(b)) {
    if (lo > hi) throw Error(ErrorCode::InvalidArgument, "interval with left end above right end");
  }
  bool contains(const Rational& x) const { return lo <= x && x < hi; }
};

/// A_n(I, X) = #{i <= n : x_i in I}.
inline std::size_t interval_count(std::span<const Rational> xs, const Interval& in, std::size_t n) {
  if (n > xs.size()) throw Error(ErrorCode::IndexOutOfRange, "interval_count past the end of the sample");
  return static_cast<std::size_t>(std::count_if(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n),
                                                [&](const Rational& x) { return in.contains(x); }));
}

inline std::size_t interval_count(const OrbitSample& xs, const Interval& in, std::size_t n) {
  return interval_count(xs.values, in, n);
}

/// A_n(I, X) for the first n points of a lazy orbit, compared exactly.
inline std::size_t interval_count(const StreamOrbit& orbit, const Interval& in, std::size_t n) {
  if (n > orbit.size()) throw Error(ErrorCode::IndexOutOfRange, "interval_count past the end of the orbit");
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += orbit.compare(i, in.lo) >= 0 && orbit.compare(i, in.hi) < 0;
  return c;
}

/// (1/N) sum_{n <= N} (|E_n - F_n| + 1) / q_n for two expansions against the same Q.
inline Rational condition_average(const DigitStream& x, const DigitStream& y, std::size_t length) {
  if (length == 0 || length > x.size() || length > y.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "condition_average length outside the prefixes");
  }
  const auto qs = x.radix.prefix(length);
  if (y.radix.prefix(length) != qs) throw Error(ErrorCode::InvalidArgument, "condition_average needs a common Q");
  std::vector<detail::Fraction> terms;
  terms.reserve(length);
  for (std::size_t i = 0; i < length; ++i) terms.push_back({abs(x.digits[i] - y.digits[i]) + 1, qs[i]});
  return sum_fractions(terms) / big(length);
}

/// Partial weighted means sum(s a)/sum(s) and sum(w a)/sum(w), with window extremes standing in
/// for liminf/limsup. The comparison between the two needs w_n / s_n non-increasing.
template <typename T>
struct WeightedMeans {
  std::vector<T> s_means;
  std::vector<T> w_means;
  bool ratio_non_increasing = true;
  std::size_t first_violation = 0;  // 1-based index where w_n/s_n increased, 0 if none
  std::size_t window_start = 1;
  T s_inf, w_inf, w_sup, s_sup;

  /// liminf_s <= liminf_w <= limsup_w <= limsup_s on the window.
  bool chain_holds() const { return s_inf <= w_inf && w_inf <= w_sup && w_sup <= s_sup; }
};

template <typename T>
WeightedMeans<T> weighted_mean_chain(std::span<const T> w, std::span<const T> s, std::span<const T> a,
                                     std::size_t window_start = 0) {
  if (w.size() != s.size() || w.size() != a.size() || w.empty()) {
    throw Error(ErrorCode::InvalidArgument, "weighted_mean_chain needs equal non-empty prefixes");
  }
  const std::size_t n = w.size();
  if (window_start == 0) window_start = n / 2 + 1;
  if (window_start > n) throw Error(ErrorCode::InvalidArgument, "window starts past the prefix");
  WeightedMeans<T> out;
  out.window_start = window_start;
  T sw = 0, ss = 0, swa = 0, ssa = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] > 0) || !(s[i] > 0)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
    if (i > 0 && out.ratio_non_increasing && w[i] * s[i - 1] > w[i - 1] * s[i]) {
      out.ratio_non_increasing = false;
      out.first_violation = i + 1;
    }
    sw += w[i];
    ss += s[i];
    swa += w[i] * a[i];
    ssa += s[i] * a[i];
    out.w_means.push_back(T(swa / sw));
    out.s_means.push_back(T(ssa / ss));
  }
  const auto from = static_cast<std::ptrdiff_t>(window_start - 1);
  out.s_inf = *std::min_element(out.s_means.begin() + from, out.s_means.end());
  out.s_sup = *std::max_element(out.s_means.begin() + from, out.s_means.end());
  out.w_inf = *std::min_element(out.w_means.begin() + from, out.w_means.end());
  out.w_sup = *std::max_element(out.w_means.begin() + from, out.w_means.end());
  return out;
}

}  // namespace cantor
