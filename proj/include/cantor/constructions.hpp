#pragma once

// Explicit constructions. Phi_{Q,b} points follow a uniformly distributed driver through digit
// windows; main_construction builds (Q, x) from (P, y) so that integer multiples of x lose the digit 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cantor/basic_sequence.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/error.hpp"
#include "cantor/rational.hpp"
#include "cantor/rng.hpp"
#include "cantor/streaming.hpp"

namespace cantor {

// ---------------------------------------------------------------------------------------------
// Triangular example: row m has digits (0, 2, ..., 2(m - 1)) against q = 2m.

inline DigitStream example_sequences(std::size_t length) {
  if (length == 0) throw Error(ErrorCode::InvalidArgument, "example needs N >= 1");
  DigitStream s{BasicSequence::triangular(), 0, {}, Tail::Unknown};
  s.digits.reserve(length);
  std::uint64_t m = 1, used = 0;
  for (std::size_t n = 1; n <= length; ++n) {
    if (used == m) {
      ++m;
      used = 0;
    }
    s.digits.push_back(big(2 * used));
    ++used;
  }
  return s;
}

/// Base-2 van der Corput point: the bits of n mirrored about the binary point.
inline Rational vdc_driver(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "vdc_driver is indexed from 1");
  BigInt num = 0, den = 1;
  for (; n; n >>= 1) {
    num = num * 2 + (n & 1);
    den *= 2;
  }
  return make_rational(num, den);
}

// ---------------------------------------------------------------------------------------------

/// log(num) / log(den) for positive rationals; exact when both are powers of two.
struct LogRatio {
  Rational num;
  Rational den;

  std::optional<Rational> exact() const {
    if (num == 1) return Rational(0);
    if (num == den) return Rational(1);
    auto log2_of = [](const Rational& r) -> std::optional<BigInt> {
      if (!is_power_of_two(r.get_num()) || !is_power_of_two(r.get_den())) return std::nullopt;
      return big(log2_exact(r.get_num())) - big(log2_exact(r.get_den()));
    };
    const auto a = log2_of(num), b = log2_of(den);
    if (!a || !b || *b == 0) return std::nullopt;
    return make_rational(*a, *b);
  }

  double approx() const {
    auto lg = [](const BigInt& v) {
      long e = 0;
      const double m = mpz_get_d_2exp(&e, v.get_mpz_t());
      return std::log2(m) + static_cast<double>(e);
    };
    const double a = lg(num.get_num()) - lg(num.get_den());
    const double b = lg(den.get_num()) - lg(den.get_den());
    return a / b;
  }

  std::string to_string() const {
    if (auto e = exact()) return e->get_str();
    return "log(" + num.get_str() + ")/log(" + den.get_str() + ")";
  }
};

struct PhiWindow {
  std::uint64_t n = 0;
  BigInt q;
  BigInt b;
  BigInt center;  // C(n) = max{m in bZ : m / q_n <= x_n}
  LogRatio f;     // min(log q_n, log q_1...q_{n-1}) / log q_n
  BigInt omega;   // floor(q_n^(1 - f) / b)
  BigInt first;   // V_n = {first, first + b, ..., last} after clipping to [0, q_n - 1]
  BigInt last;
  bool clipped = false;

  BigInt size() const { return (last - first) / b + 1; }
  bool contains(const BigInt& e) const { return e >= first && e <= last && mod_floor(e - first, b) == 0; }
};

namespace detail {

/// `prev` is q_1 ... q_{n-1}, or nothing when it is known to exceed q_n.
inline PhiWindow make_phi_window(std::uint64_t n, const BigInt& q, const std::optional<BigInt>& prev,
                                 const BigInt& b, const Rational& xn) {
  if (b < 2) throw Error(ErrorCode::InvalidArgument, "phi window needs b >= 2");
  if (sgn(xn) < 0 || xn >= 1) throw Error(ErrorCode::InvalidArgument, "driver value outside [0, 1)");
  PhiWindow w;
  w.n = n;
  w.q = q;
  w.b = b;
  w.center = b * floor_div(xn.get_num() * q, xn.get_den() * b);
  // q^(1 - f) = q / min(q, prev), so omega needs no logarithms.
  if (!prev || *prev >= q) {
    w.f = {Rational(q), Rational(q)};
    w.omega = 0;
  } else {
    w.f = {Rational(*prev), Rational(q)};
    w.omega = floor_div(q, b * *prev);
  }
  const BigInt half = w.omega / 2;
  const BigInt down = std::min(half, BigInt(w.center / b));
  const BigInt up = std::min(half, BigInt((q - 1 - w.center) / b));
  w.first = w.center - b * down;
  w.last = w.center + b * up;
  w.clipped = down != half || up != half;
  return w;
}

}  // namespace detail

inline PhiWindow phi_window(const BasicSequence& q, const BigInt& b, const Rational& xn, std::uint64_t n) {
  return detail::make_phi_window(n, q.at(n), partial_product(q, n - 1), b, xn);
}

inline const std::vector<std::string>& phi_flags() {
  static const std::vector<std::string> flags{
      "C(n) = b * floor(q_n x_n / b), the largest multiple of b with C(n)/q_n <= x_n",
      "omega(n) = floor(q_n / (b q_1...q_{n-1})) when q_1...q_{n-1} < q_n, else 0: the exact form of "
      "floor(q_n^(1-f(n)) / b)",
      "V_n = multiples of b within omega(n)/2 steps of C(n), clipped to [0, q_n - 1]",
  };
  return flags;
}

/// Picks E_n from V_n.
using PhiChooser = std::function<BigInt(const PhiWindow&)>;

inline PhiChooser center_chooser() {
  return [](const PhiWindow& w) { return w.center; };
}

inline PhiChooser uniform_chooser(std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed, 0x9417);
  return [rng](const PhiWindow& w) { return BigInt(w.first + w.b * rng->below(w.size())); };
}

using Driver = std::function<Rational(std::uint64_t)>;

struct PhiSample {
  DigitStream stream;
  std::vector<PhiWindow> windows;
  std::size_t clamps = 0;  // chooser answers outside V_n moved back inside
};

/// x = 0.E_1E_2... with E_n in V_n; every digit is a multiple of b.
inline PhiSample phi_sample(const BasicSequence& q, const BigInt& b, const Driver& driver, std::size_t length,
                            const PhiChooser& chooser = center_chooser()) {
  PhiSample out{DigitStream{q, 0, {}, Tail::Unknown}, {}, 0};
  const auto qs = q.prefix(length);
  out.stream.digits.reserve(length);
  out.windows.reserve(length);
  std::uint64_t log2_floor = 0;  // q_1 ... q_{n-1} >= 2^log2_floor
  for (std::size_t i = 0; i < length; ++i) {
    std::optional<BigInt> prev;
    if (log2_floor < mpz_sizeinbase(qs[i].get_mpz_t(), 2)) prev = product(std::span<const BigInt>(qs).first(i));
    const Rational xn = driver(i + 1);
    auto w = detail::make_phi_window(i + 1, qs[i], prev, b, xn);
    BigInt e = chooser(w);
    if (!w.contains(e)) {
      e = std::clamp(BigInt(w.first + b * floor_div(e - w.first, b)), w.first, w.last);
      ++out.clamps;
    }
    // |E_n / q_n - x_n| <= (b/2)(omega + 2) / q_n
    if (2 * abs_of(Rational(e) - xn * qs[i]) > b * (w.omega + 2)) {
      throw Error(ErrorCode::InvalidArgument, "phi digit strayed from the driver");
    }
    out.stream.digits.push_back(std::move(e));
    out.windows.push_back(std::move(w));
    log2_floor += mpz_sizeinbase(qs[i].get_mpz_t(), 2) - 1;
  }
  return out;
}

/// floor(a/b) * c / a with c = a mod b: the limiting frequency of [0, c/b) claimed for the orbit
/// of (a/b) x, x in Phi_{Q,b}.
inline Rational rational_multiple_limit(const BigInt& a, const BigInt& b, const BigInt& c) {
  if (sgn(a) == 0) throw Error(ErrorCode::InvalidArgument, "rational_multiple_limit needs a != 0");
  if (b < 1) throw Error(ErrorCode::InvalidArgument, "rational_multiple_limit needs b >= 1");
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (g != 1) throw Error(ErrorCode::InvalidArgument, "rational_multiple_limit needs gcd(a, b) = 1");
  if (sgn(c) < 0 || c >= b || mod_floor(a - c, b) != 0) {
    throw Error(ErrorCode::InvalidArgument, "rational_multiple_limit needs c = a mod b");
  }
  return make_rational(floor_div(a, b) * c, a);
}

/// Frequency of [0, c/b) under u -> frac(a u) for u uniform on [0, 1/b), a > 0: the pieces
/// a u in [j, j + c/b) for j = 0, ..., floor(a/b) give (floor(a/b) + 1) c / a.
inline Rational rational_multiple_frequency(const BigInt& a, const BigInt& b) {
  if (sgn(a) <= 0 || b < 1) throw Error(ErrorCode::InvalidArgument, "rational_multiple_frequency needs a, b >= 1");
  return make_rational((floor_div(a, b) + 1) * mod_floor(a, b), a);
}

// ---------------------------------------------------------------------------------------------

struct MoranPartial {
  std::uint64_t k = 0;
  std::optional<LogRatio> value;  // empty when some n_i = omega(i) is 0 for i <= k + 1
};

struct MoranEvaluation {
  std::uint64_t depth = 0;
  std::vector<MoranPartial> partials;
  std::vector<BigInt> omegas;  // omega(1), ..., omega(K + 1)
  std::string diagnostic;
};

/// Partial values log(n_1...n_k) / -log(c_1...c_{k+1} n_{k+1}) with c_i = 1/q_i, n_i = omega(i).
inline MoranEvaluation moran_bound_partial(const BasicSequence& q, const BigInt& b, std::uint64_t depth) {
  if (depth == 0) throw Error(ErrorCode::InvalidArgument, "moran_bound_partial needs K >= 1");
  const auto qs = q.prefix(depth + 1);
  MoranEvaluation ev;
  ev.depth = depth;
  BigInt prev = 1;
  for (const auto& qi : qs) {
    ev.omegas.push_back(prev >= qi ? BigInt(0) : floor_div(qi, b * prev));
    prev *= qi;
  }
  BigInt numer = 1;
  BigInt prod = qs[0];
  bool any = false;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    numer *= ev.omegas[k - 1];
    prod *= qs[k];
    MoranPartial p{k, std::nullopt};
    const BigInt& next = ev.omegas[k];
    if (sgn(numer) != 0 && sgn(next) != 0) {
      Rational den = make_rational(prod, next);
      if (den != 1) {
        p.value = LogRatio{Rational(numer), den};
        any = true;
      }
    }
    ev.partials.push_back(std::move(p));
  }
  if (!any) ev.diagnostic = "every partial involves omega(i) = 0; nothing to evaluate";
  return ev;
}

// ---------------------------------------------------------------------------------------------

struct MainConstructionState {
  BasicSequence p;
  DigitStream y;                            // truncated to the constructed region
  std::vector<std::size_t> ell;             // ell[i - 1] = ell_i for certified i
  std::vector<std::uint32_t> m;             // m[n - 1] = M(n)
  std::vector<std::uint32_t> multiplier;    // q_n = multiplier[n - 1] * p_n
  BasicSequence q;
  DigitStream x;                            // psi_{P,Q}(y)
  std::vector<std::size_t> changed;         // A = {n : q_n != p_n}
  std::vector<std::string> interpretation_flags;
  std::vector<std::string> diagnostics;

  std::size_t length() const { return x.size(); }
};

inline const std::vector<std::string>& main_construction_flags() {
  static const std::vector<std::string> flags{
      "ell_i = least t with sum_{j<=i} N_n((1), j*y) < n/i for every n in [t, N]; ell_1 = 1",
      "M(n) = max{c <= max_multiplier : ell_c <= n}",
      "trigger at n sets q_n = M(n) p_n and q_{n+1} = M(n) p_{n+1}; a trigger at n+1 overrides with M(n+1)",
  };
  return flags;
}

inline MainConstructionState main_construction(const BasicSequence& p, const DigitStream& y, std::size_t length,
                                               std::uint32_t max_multiplier) {
  if (max_multiplier < 1) throw Error(ErrorCode::InvalidArgument, "max_multiplier must be >= 1");
  length = std::min(length, y.size());
  if (length == 0) throw Error(ErrorCode::InvalidArgument, "main_construction needs a non-empty prefix");
  DigitStream base{p, y.integer_part, y.digits, y.tail};
  require_valid(base);

  // Digits of j*y, j = 1..K, on their common certified prefix. Digits of y past N only help
  // certification.
  std::vector<std::vector<BigInt>> multiples;
  std::size_t region = length;
  for (std::uint32_t j = 1; j <= max_multiplier; ++j) {
    auto r = scale_stream(big(j), 1, base);
    region = std::min(region, r.stream.size());
    multiples.push_back(std::move(r.stream.digits));
  }
  MainConstructionState st{p, base, {}, {}, {}, p, base, {}, main_construction_flags(), {}};
  if (region < length) {
    st.diagnostics.push_back("multiples certified on " + std::to_string(region) + " of " + std::to_string(length) +
                             " digits");
  }
  if (region == 0) throw Error(ErrorCode::InvalidArgument, "no certified digits of the multiples");
  st.y.digits.resize(region);
  if (region < y.size()) st.y.tail = Tail::Unknown;

  // first_one[n - 1] = least j with digit n of j*y equal to 1 (0 if none).
  std::vector<std::uint32_t> first_one(region, 0);
  for (std::size_t n = 0; n < region; ++n) {
    for (std::uint32_t j = 1; j <= max_multiplier; ++j) {
      if (multiples[j - 1][n] == 1) {
        first_one[n] = j;
        break;
      }
    }
  }

  st.ell.push_back(1);
  std::vector<std::uint64_t> cum(region, 0);  // sum_{j<=i} N_n((1), j*y)
  for (std::uint32_t i = 1; i <= max_multiplier; ++i) {
    std::uint64_t running = 0;
    std::size_t last_bad = 0;
    for (std::size_t n = 1; n <= region; ++n) {
      running += multiples[i - 1][n - 1] == 1;
      cum[n - 1] += running;
      if (i >= 2 && static_cast<unsigned __int128>(cum[n - 1]) * i >= n) last_bad = n;
    }
    if (i == 1) continue;
    const std::size_t ell = std::max(last_bad + 1, st.ell.back());
    if (ell > region) {
      st.diagnostics.push_back("ell_" + std::to_string(i) + " not certified within the prefix; M capped at " +
                               std::to_string(i - 1));
      break;
    }
    st.ell.push_back(ell);
  }
  if (st.ell.size() == 1) st.diagnostics.push_back("prefix too short to certify ell_2; M = 1 throughout");

  st.m.resize(region);
  st.multiplier.assign(region, 1);
  std::uint32_t cur = 1;
  for (std::size_t n = 1; n <= region; ++n) {
    while (cur < st.ell.size() && st.ell[cur] <= n) ++cur;
    st.m[n - 1] = cur;
  }
  for (std::size_t n = 1; n <= region; ++n) {
    const auto mn = st.m[n - 1];
    if (first_one[n - 1] == 0 || first_one[n - 1] > mn) continue;
    st.multiplier[n - 1] = mn;
    if (n < region) st.multiplier[n] = mn;
  }

  const auto ps = p.prefix(region);
  auto qvals = std::make_shared<std::vector<BigInt>>(region);
  for (std::size_t n = 0; n < region; ++n) {
    (*qvals)[n] = ps[n] * st.multiplier[n];
    if (st.multiplier[n] != 1) st.changed.push_back(n + 1);
  }
  st.q = BasicSequence::derived("main_construction", [qvals](std::uint64_t n) -> BigInt {
    if (n == 0 || n > qvals->size()) {
      throw Error(ErrorCode::IndexOutOfRange, "constructed Q is defined on 1.." + std::to_string(qvals->size()));
    }
    return (*qvals)[n - 1];
  });
  st.x = psi_map(st.y, st.q);
  return st;
}

/// Positions n (with 2 <= m <= M(n)) where digit n of m*x w.r.t. Q equals 1, over the certified
/// prefix of m*x. Also returns how many digits were certified.
struct MultipleCheck {
  std::uint32_t multiple = 0;
  std::size_t certified = 0;
  std::vector<std::size_t> ones_in_range;  // n with M(n) >= m and digit 1
  std::vector<std::size_t> ones_anywhere;  // every n with digit 1
};

inline MultipleCheck check_multiple(const MainConstructionState& st, std::uint32_t m) {
  MultipleCheck c;
  c.multiple = m;
  const auto r = scale_stream(big(m), 1, st.x);
  c.certified = r.stream.size();
  for (std::size_t n = 1; n <= c.certified; ++n) {
    if (r.stream.digits[n - 1] != 1) continue;
    c.ones_anywhere.push_back(n);
    if (st.m[n - 1] >= m) c.ones_in_range.push_back(n);
  }
  return c;
}

}  // namespace cantor
