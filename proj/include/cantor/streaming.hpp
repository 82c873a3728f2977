#pragma once

// Digit-by-digit rational multiplication and translation of Q-Cantor expansions.
//
// Both maps have the shape y = frac(...) where, after n digits, the scaled value splits into
// a bounded integer state and the unread tail t = T_{Q,n}(x) in [0, 1):
//
//   scale by a/b:   T_n(y) = frac((s_n + a t) / b),   s_n = a * I_n mod b
//   shift by c/d:   T_n(y) = frac((s_n + d t) / d),   s_n = c * q_1 ... q_n mod d
//
// with I_n the integer E_0 q_1...q_n + ... + E_n. Each output digit is floor(W / beta) mod q_{n+1}
// for an affine W in the next tail; it is emitted only once the known digits pin that floor.

#include <cstddef>
#include <numeric>
#include <optional>

#include "cantor/detail/tail_compare.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/error.hpp"
#include "cantor/rational.hpp"

namespace cantor {

/// A transformed stream together with how many trailing input positions could not be certified.
struct CertifiedStream {
  DigitStream stream;
  std::size_t withheld = 0;

  bool complete() const { return withheld == 0; }
};

namespace detail {

// z(s, q, e) and the state update for one digit position.
template <typename Step>
CertifiedStream run_affine_digits(const DigitStream& in, BigInt state, const BigInt& alpha, const BigInt& beta,
                                  Step step) {
  require_valid(in);
  const auto qs = in.radix.prefix(in.size());
  TailCursor cur(in.digits, qs, in.tail);
  CertifiedStream out{DigitStream{in.radix, 0, {}, Tail::Unknown}, 0};
  out.stream.digits.reserve(in.size());
  const BigInt bound = abs(alpha) + beta;
  for (std::size_t n = 0; n < in.size(); ++n) {
    if (state < 0 || state >= beta) throw Error(ErrorCode::InvalidArgument, "carry state escaped [0, b)");
    auto [z, next] = step(state, qs[n], in.digits[n]);
    auto fl = certified_floor(cur, n + 1, z, alpha, beta);
    if (!fl) {
      out.withheld = in.size() - n;
      return out;
    }
    // Carry invariant: |floor(W / beta) * beta - s * q| <= (|alpha| + beta) * q.
    if (abs(*fl * beta - state * qs[n]) > bound * qs[n]) {
      throw Error(ErrorCode::InvalidArgument, "carry bound violated");
    }
    out.stream.digits.push_back(mod_floor(*fl, qs[n]));
    state = std::move(next);
  }
  if (in.tail == Tail::Zero && state == 0) out.stream.tail = Tail::Zero;
  return out;
}

}  // namespace detail

/// Digits of frac((a / b) * x). gcd(a, b) = 1, b >= 1.
inline CertifiedStream scale_stream(const BigInt& a, const BigInt& b, const DigitStream& x) {
  if (sgn(b) <= 0) throw Error(ErrorCode::InvalidArgument, "scale_stream needs b >= 1");
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (g != 1) throw Error(ErrorCode::InvalidArgument, "scale_stream needs gcd(a, b) = 1");
  if (sgn(a) == 0) {
    DigitStream zero{x.radix, 0, std::vector<BigInt>(x.size(), BigInt(0)), Tail::Zero};
    return {std::move(zero), 0};
  }
  return detail::run_affine_digits(x, mod_floor(a * x.integer_part, b), a, b,
                                   [&](const BigInt& s, const BigInt& q, const BigInt& e) {
                                     BigInt z = s * q + a * e;
                                     BigInt next = mod_floor(z, b);
                                     return std::pair{std::move(z), std::move(next)};
                                   });
}

/// Digits of frac(r + x).
inline CertifiedStream shift_rational(const Rational& r, const DigitStream& x) {
  const BigInt& c = r.get_num();
  const BigInt& d = r.get_den();
  return detail::run_affine_digits(x, mod_floor(c, d), d, d, [&](const BigInt& s, const BigInt& q, const BigInt& e) {
    BigInt z = s * q + d * e;
    BigInt next = mod_floor(s * q, d);
    return std::pair{std::move(z), std::move(next)};
  });
}

}  // namespace cantor
