#pragma once

// Exact integer and rational arithmetic on top of GMP's C++ interface.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cantor/error.hpp"

namespace cantor {

using BigInt = mpz_class;
using Rational = mpq_class;

inline BigInt big(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

inline BigInt big_signed(std::int64_t v) {
  if (v >= 0) return big(static_cast<std::uint64_t>(v));
  return -big(static_cast<std::uint64_t>(-(v + 1)) + 1u);
}

inline bool fits_u64(const BigInt& v) { return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64; }

inline std::uint64_t to_u64(const BigInt& v) {
  if (!fits_u64(v)) throw Error(ErrorCode::InvalidArgument, "integer does not fit in 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Floor division rounding toward negative infinity.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

/// Non-negative residue of a modulo |b|.
inline BigInt mod_floor(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline BigInt floor_of(const Rational& x) { return floor_div(x.get_num(), x.get_den()); }

/// x - floor(x), always in [0, 1).
inline Rational frac_of(const Rational& x) {
  Rational r(mod_floor(x.get_num(), x.get_den()), x.get_den());
  r.canonicalize();
  return r;
}

inline Rational abs_of(const Rational& x) { return sgn(x) < 0 ? Rational(-x) : x; }

inline bool is_power_of_two(const BigInt& v) {
  return sgn(v) > 0 && mpz_popcount(v.get_mpz_t()) == 1;
}

/// log2 of a power of two.
inline std::uint64_t log2_exact(const BigInt& v) { return mpz_sizeinbase(v.get_mpz_t(), 2) - 1; }

inline std::string to_string(const BigInt& v) { return v.get_str(); }

inline std::string to_string(const Rational& v) { return v.get_str(); }

inline BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  BigInt out;
  if (s.empty() || out.set_str(s, 10) != 0) {
    throw Error(ErrorCode::ParseError, "not an integer: '" + s + "'");
  }
  return out;
}

/// Parses "p", "p/q" or "-p/q".
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(text));
  return make_rational(parse_bigint(text.substr(0, slash)), parse_bigint(text.substr(slash + 1)));
}

/// Product of a span of integers by balanced splitting.
inline BigInt product(std::span<const BigInt> values) {
  if (values.empty()) return 1;
  if (values.size() == 1) return values[0];
  if (values.size() <= 8) {
    BigInt acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc *= values[i];
    return acc;
  }
  const auto mid = values.size() / 2;
  return product(values.first(mid)) * product(values.subspan(mid));
}

namespace detail {

struct Fraction {
  BigInt num;
  BigInt den;
};

inline Fraction split_sum_reciprocals(std::span<const BigInt> dens) {
  if (dens.size() == 1) return {1, dens[0]};
  const auto mid = dens.size() / 2;
  auto l = split_sum_reciprocals(dens.first(mid));
  auto r = split_sum_reciprocals(dens.subspan(mid));
  return {l.num * r.den + r.num * l.den, l.den * r.den};
}

inline Fraction split_sum_fractions(std::span<const Fraction> parts) {
  if (parts.size() == 1) return parts[0];
  const auto mid = parts.size() / 2;
  auto l = split_sum_fractions(parts.first(mid));
  auto r = split_sum_fractions(parts.subspan(mid));
  return {l.num * r.den + r.num * l.den, l.den * r.den};
}

}  // namespace detail

/// Exact sum of 1/d over the given positive denominators; reduced once at the end.
inline Rational sum_reciprocals(std::span<const BigInt> dens) {
  if (dens.empty()) return 0;
  // Runs of equal denominators collapse to count/d first; slowly growing sequences repeat a lot.
  std::vector<detail::Fraction> runs;
  for (std::size_t i = 0; i < dens.size();) {
    std::size_t j = i + 1;
    while (j < dens.size() && dens[j] == dens[i]) ++j;
    runs.push_back({BigInt(static_cast<unsigned long>(j - i)), dens[i]});
    i = j;
  }
  if (runs.size() == dens.size()) {
    auto f = detail::split_sum_reciprocals(dens);
    return make_rational(f.num, f.den);
  }
  auto f = detail::split_sum_fractions(runs);
  return make_rational(f.num, f.den);
}

/// Exact sum of num_i/den_i; reduced once at the end.
inline Rational sum_fractions(std::span<const detail::Fraction> parts) {
  if (parts.empty()) return 0;
  auto f = detail::split_sum_fractions(parts);
  return make_rational(f.num, f.den);
}

inline double to_double(const Rational& v) { return v.get_d(); }

}  // namespace cantor
