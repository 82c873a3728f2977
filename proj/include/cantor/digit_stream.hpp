#pragma once

// Finite prefixes of Q-Cantor series expansions x = E_0 + sum E_n / (q_1 ... q_n).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cantor/basic_sequence.hpp"
#include "cantor/error.hpp"
#include "cantor/rational.hpp"

namespace cantor {

/// What is known about the digits after the stored prefix.
enum class Tail {
  Unknown,  // any canonical continuation (E_n != q_n - 1 infinitely often)
  Zero,     // every later digit is 0: the prefix is the whole expansion
};

struct DigitStream {
  BasicSequence radix;
  BigInt integer_part = 0;     // E_0
  std::vector<BigInt> digits;  // E_1 .. E_N, digits[n - 1] = E_n
  Tail tail = Tail::Unknown;

  std::size_t size() const { return digits.size(); }
  const BigInt& digit(std::size_t n) const { return digits.at(n - 1); }
};

/// Certified enclosure [lo, hi] of the value of a truncated expansion.
struct CantorValue {
  Rational lo;
  Rational hi;

  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
};

struct StreamIssue {
  enum class Kind { DigitOutOfRange, AllMaxWindow };
  Kind kind;
  std::size_t index;  // 1-based position (first position of the window for AllMaxWindow)
};

struct StreamValidation {
  std::vector<StreamIssue> issues;
  std::size_t last_non_max = 0;  // largest n with E_n != q_n - 1, 0 if none

  bool ok() const {
    for (const auto& i : issues) {
      if (i.kind == StreamIssue::Kind::DigitOutOfRange) return false;
    }
    return true;
  }
};

inline StreamValidation validate_stream(const DigitStream& s) {
  StreamValidation v;
  const auto qs = s.radix.prefix(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = s.digits[i];
    if (sgn(e) < 0 || e >= qs[i]) {
      v.issues.push_back({StreamIssue::Kind::DigitOutOfRange, i + 1});
    } else if (e != qs[i] - 1) {
      v.last_non_max = i + 1;
    }
  }
  if (s.size() > 0 && s.tail == Tail::Unknown && v.last_non_max == 0 && v.ok()) {
    v.issues.push_back({StreamIssue::Kind::AllMaxWindow, 1});
  }
  return v;
}

inline void require_valid(const DigitStream& s) {
  const auto v = validate_stream(s);
  for (const auto& i : v.issues) {
    if (i.kind == StreamIssue::Kind::DigitOutOfRange) {
      throw Error(ErrorCode::DigitOutOfRange,
                  "digit E_" + std::to_string(i.index) + " = " + s.digit(i.index).get_str() + " outside [0, q_n)");
    }
  }
}

namespace detail {

/// Value of sum_{n=first}^{last} E_n / (q_first ... q_n) as an unreduced fraction whose
/// denominator is q_first ... q_last.
inline Fraction tail_fraction(std::span<const BigInt> digits, std::span<const BigInt> radices) {
  if (digits.size() == 1) return {digits[0], radices[0]};
  const auto mid = digits.size() / 2;
  auto l = tail_fraction(digits.first(mid), radices.first(mid));
  auto r = tail_fraction(digits.subspan(mid), radices.subspan(mid));
  // l.num/l.den + r.num/(l.den * r.den)
  return {l.num * r.den + r.num, l.den * r.den};
}

}  // namespace detail

/// Exact value of digits [first, last] read as a fraction in [0, 1): entry n contributes
/// E_n / (q_first ... q_n). Empty range gives 0.
inline Rational tail_value(std::span<const BigInt> digits, std::span<const BigInt> radices) {
  if (digits.empty()) return 0;
  auto f = detail::tail_fraction(digits, radices);
  return make_rational(f.num, f.den);
}

/// lo = E_0 + sum E_n / (q_1 ... q_n), hi = lo + 1 / (q_1 ... q_N).
inline CantorValue value_bounds(const DigitStream& s) {
  require_valid(s);
  const auto qs = s.radix.prefix(s.size());
  CantorValue v;
  if (s.digits.empty()) {
    v.lo = Rational(s.integer_part);
    v.hi = v.lo + 1;
    return v;
  }
  auto f = detail::tail_fraction(s.digits, qs);
  v.lo = make_rational(f.num + s.integer_part * f.den, f.den);
  v.hi = v.lo + Rational(1, f.den);
  return v;
}

/// Greedy (canonical) digits: E_0 = floor(x), E_n = floor(q_n * frac). Q-adic rationals end
/// in zeros, never in a (q_n - 1)-tail.
inline DigitStream digits_from_rational(const Rational& x, const BasicSequence& q, std::size_t length) {
  DigitStream s{q, floor_of(x), {}, Tail::Unknown};
  s.digits.reserve(length);
  Rational rest = x - s.integer_part;
  const auto qs = q.prefix(length);
  BigInt num = rest.get_num();
  const BigInt den = rest.get_den();
  for (std::size_t n = 0; n < length; ++n) {
    // rest = num / den in [0, 1)
    num *= qs[n];
    BigInt d, r;
    mpz_fdiv_qr(d.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    s.digits.push_back(std::move(d));
    num = std::move(r);
  }
  if (num == 0) s.tail = Tail::Zero;
  return s;
}

/// Digit n of the output is min(E_n, q_n - 1) against the target sequence. The integer part
/// is copied through unchanged.
inline DigitStream psi_map(const DigitStream& src, const BasicSequence& target) {
  DigitStream out{target, src.integer_part, {}, src.tail};
  const auto qs = target.prefix(src.size());
  out.digits.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const BigInt top = qs[i] - 1;
    out.digits.push_back(src.digits[i] < top ? src.digits[i] : top);
  }
  return out;
}

/// F_n = 1 where E_n = 0, otherwise F_n = E_n.
inline DigitStream zero_to_one_transform(const DigitStream& src) {
  DigitStream out{src.radix, src.integer_part, src.digits, Tail::Unknown};
  for (auto& d : out.digits) {
    if (d == 0) d = 1;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Digit cache files: "# seed=<u64> rule=<string>" then rows "n,q_n,E_n".

struct CachedStream {
  DigitStream stream;
  std::uint64_t seed = 0;
  std::string rule;
};

/// Writes through a temporary file and renames it into place.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_digit_cache(const DigitStream& s, std::uint64_t seed) {
  std::ostringstream out;
  out << "# seed=" << seed << " rule=" << s.radix.to_string() << '\n';
  if (s.integer_part != 0) out << "# e0=" << s.integer_part.get_str() << '\n';
  if (s.tail == Tail::Zero) out << "# tail=zero\n";
  const auto qs = s.radix.prefix(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << (i + 1) << ',' << qs[i].get_str() << ',' << s.digits[i].get_str() << '\n';
  }
  return out.str();
}

inline void write_digit_cache(const std::filesystem::path& path, const DigitStream& s, std::uint64_t seed) {
  write_text_atomic(path, format_digit_cache(s, seed));
}

/// Reads a digit cache. The rule string is reused when it reproduces the stored q_n column;
/// otherwise the column itself becomes an explicit list.
inline CachedStream read_digit_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open digit cache " + path.string());
  CachedStream c{DigitStream{BasicSequence::constant(2), 0, {}, Tail::Unknown}, 0, {}};
  std::vector<BigInt> qs;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      t = detail::trim(t.substr(1));
      for (auto field : detail::split(t, ' ')) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = field.substr(0, eq);
        const auto val = field.substr(eq + 1);
        if (key == "seed") {
          c.seed = to_u64(parse_bigint(val));
          header = true;
        } else if (key == "rule") {
          c.rule = std::string(val);
        } else if (key == "e0") {
          c.stream.integer_part = parse_bigint(val);
        } else if (key == "tail") {
          c.stream.tail = val == "zero" ? Tail::Zero : Tail::Unknown;
        }
      }
      continue;
    }
    const auto cols = detail::split(t, ',');
    if (cols.size() != 3) throw Error(ErrorCode::ParseError, "bad digit cache row: " + std::string(t));
    const auto n = to_u64(parse_bigint(cols[0]));
    if (n != c.stream.digits.size() + 1) throw Error(ErrorCode::ParseError, "digit cache rows out of order");
    qs.push_back(parse_bigint(cols[1]));
    c.stream.digits.push_back(parse_bigint(cols[2]));
  }
  if (!header) throw Error(ErrorCode::ParseError, "digit cache missing '# seed=' header");
  std::optional<BasicSequence> rule;
  try {
    if (!c.rule.empty()) rule = BasicSequence::parse(c.rule, path.parent_path());
  } catch (const Error&) {
    rule.reset();
  }
  if (rule && rule->defined_length() >= qs.size() && rule->prefix(qs.size()) == qs) {
    c.stream.radix = *rule;
  } else {
    c.stream.radix = BasicSequence::list(std::move(qs), "@" + path.string());
  }
  require_valid(c.stream);
  return c;
}

}  // namespace cantor
