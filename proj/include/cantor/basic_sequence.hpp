#pragma once

// Basic sequences Q = (q_n), n >= 1, with every q_n >= 2.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cantor/error.hpp"
#include "cantor/rational.hpp"

namespace cantor {

namespace rules {

struct Constant {
  BigInt base;
};

/// q_n = slope * n + offset.
struct Affine {
  BigInt slope;
  BigInt offset;
};

/// q_n = 2^(2^n).
struct PowerOfTwoTower {};

/// (2, 4, 4, 6, 6, 6, 8, ...): row m of the triangle holds m entries equal to 2m.
struct TriangularExample {};

struct ExplicitList {
  std::shared_ptr<const std::vector<BigInt>> values;
  std::string source;  // "@path" when loaded from a file, empty otherwise
};

/// Generator identified by name; `fn` must be pure.
struct Derived {
  std::string id;
  std::shared_ptr<const std::function<BigInt(std::uint64_t)>> fn;
};

}  // namespace rules

/// Row index m of the triangular example for position n: m(m-1)/2 < n <= m(m+1)/2.
inline std::uint64_t triangle_row(std::uint64_t n) {
  BigInt disc = big(n) * 8 + 1;
  BigInt root;
  mpz_sqrt(root.get_mpz_t(), disc.get_mpz_t());
  std::uint64_t m = to_u64((root - 1) / 2);
  while (static_cast<unsigned __int128>(m) * (m + 1) / 2 < n) ++m;
  return m;
}

inline BigInt isqrt(const BigInt& v) {
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

/// Named generators reachable from `derived:<id>` rule strings.
inline std::function<BigInt(std::uint64_t)> derived_generator(std::string_view id) {
  if (id == "isqrt_plus2") return [](std::uint64_t n) { return BigInt(isqrt(big(n)) + 2); };
  if (id == "log2_plus2") {
    return [](std::uint64_t n) { return BigInt(big(mpz_sizeinbase(big(n).get_mpz_t(), 2) + 1)); };
  }
  throw Error(ErrorCode::ParseError, "unknown derived generator '" + std::string(id) + "'");
}

class BasicSequence {
 public:
  using Rule = std::variant<rules::Constant, rules::Affine, rules::PowerOfTwoTower, rules::TriangularExample,
                            rules::ExplicitList, rules::Derived>;

  explicit BasicSequence(Rule rule) : rule_(std::move(rule)) { validate(); }

  static BasicSequence constant(const BigInt& b) { return BasicSequence(rules::Constant{b}); }
  static BasicSequence affine(const BigInt& slope, const BigInt& offset) {
    return BasicSequence(rules::Affine{slope, offset});
  }
  static BasicSequence tower() { return BasicSequence(rules::PowerOfTwoTower{}); }
  static BasicSequence triangular() { return BasicSequence(rules::TriangularExample{}); }
  static BasicSequence list(std::vector<BigInt> values, std::string source = {}) {
    return BasicSequence(
        rules::ExplicitList{std::make_shared<const std::vector<BigInt>>(std::move(values)), std::move(source)});
  }
  static BasicSequence derived(std::string id, std::function<BigInt(std::uint64_t)> fn) {
    return BasicSequence(rules::Derived{
        std::move(id), std::make_shared<const std::function<BigInt(std::uint64_t)>>(std::move(fn))});
  }

  /// Parses `constant:2`, `affine:1,1`, `tower2`, `triangular`, `list:@file.csv`, `list:2,3,5`,
  /// `derived:<id>`. Relative list paths resolve against `base_dir`.
  static BasicSequence parse(std::string_view text, const std::filesystem::path& base_dir = {});

  /// q_n for n >= 1.
  BigInt at(std::uint64_t n) const;

  /// (q_1, ..., q_count).
  std::vector<BigInt> prefix(std::uint64_t count) const;

  /// Number of defined terms for list rules; unbounded rules report UINT64_MAX.
  std::uint64_t defined_length() const {
    if (const auto* l = std::get_if<rules::ExplicitList>(&rule_)) return l->values->size();
    return UINT64_MAX;
  }

  const Rule& rule() const { return rule_; }

  std::string to_string() const;

 private:
  void validate() const;
  BigInt checked(BigInt v, std::uint64_t n) const {
    if (v < 2) {
      throw Error(ErrorCode::InvalidSequence,
                  "basic sequence " + to_string() + " has q_" + std::to_string(n) + " = " + v.get_str() + " < 2");
    }
    return v;
  }

  Rule rule_;
};

inline void BasicSequence::validate() const {
  std::visit(
      [this](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rules::Constant>) {
          checked(r.base, 1);
        } else if constexpr (std::is_same_v<T, rules::Affine>) {
          if (r.slope < 0) throw Error(ErrorCode::InvalidSequence, "affine rule with negative slope falls below 2");
          checked(r.slope + r.offset, 1);
        } else if constexpr (std::is_same_v<T, rules::ExplicitList>) {
          if (!r.values) throw Error(ErrorCode::InvalidSequence, "list rule without values");
          for (std::size_t i = 0; i < r.values->size(); ++i) checked((*r.values)[i], i + 1);
        } else if constexpr (std::is_same_v<T, rules::Derived>) {
          if (!r.fn || !*r.fn) throw Error(ErrorCode::InvalidSequence, "derived rule without generator");
        }
      },
      rule_);
}

inline BigInt BasicSequence::at(std::uint64_t n) const {
  if (n == 0) throw Error(ErrorCode::IndexOutOfRange, "basic sequences are indexed from 1");
  return std::visit(
      [&](const auto& r) -> BigInt {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rules::Constant>) {
          return r.base;
        } else if constexpr (std::is_same_v<T, rules::Affine>) {
          return r.slope * big(n) + r.offset;
        } else if constexpr (std::is_same_v<T, rules::PowerOfTwoTower>) {
          if (n > 40) throw Error(ErrorCode::IndexOutOfRange, "tower term too large to materialize");
          BigInt v;
          mpz_ui_pow_ui(v.get_mpz_t(), 2, 1ul << n);
          return v;
        } else if constexpr (std::is_same_v<T, rules::TriangularExample>) {
          return big(2 * triangle_row(n));
        } else if constexpr (std::is_same_v<T, rules::ExplicitList>) {
          if (n > r.values->size()) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "list rule defines " + std::to_string(r.values->size()) + " terms, asked for q_" +
                            std::to_string(n));
          }
          return (*r.values)[n - 1];
        } else {
          return checked((*r.fn)(n), n);
        }
      },
      rule_);
}

inline std::vector<BigInt> BasicSequence::prefix(std::uint64_t count) const {
  std::vector<BigInt> out;
  out.reserve(count);
  if (const auto* t = std::get_if<rules::TriangularExample>(&rule_)) {
    (void)t;
    std::uint64_t m = 1, used = 0;
    for (std::uint64_t n = 1; n <= count; ++n) {
      if (used == m) {
        ++m;
        used = 0;
      }
      ++used;
      out.emplace_back(big(2 * m));
    }
    return out;
  }
  if (const auto* a = std::get_if<rules::Affine>(&rule_)) {
    BigInt v = a->slope + a->offset;
    for (std::uint64_t n = 1; n <= count; ++n, v += a->slope) out.push_back(v);
    return out;
  }
  for (std::uint64_t n = 1; n <= count; ++n) out.push_back(at(n));
  return out;
}

inline std::string BasicSequence::to_string() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rules::Constant>) {
          return "constant:" + r.base.get_str();
        } else if constexpr (std::is_same_v<T, rules::Affine>) {
          return "affine:" + r.slope.get_str() + "," + r.offset.get_str();
        } else if constexpr (std::is_same_v<T, rules::PowerOfTwoTower>) {
          return "tower2";
        } else if constexpr (std::is_same_v<T, rules::TriangularExample>) {
          return "triangular";
        } else if constexpr (std::is_same_v<T, rules::ExplicitList>) {
          if (!r.source.empty()) return "list:" + r.source;
          std::string s = "list:";
          for (std::size_t i = 0; i < r.values->size(); ++i) {
            if (i) s += ',';
            s += (*r.values)[i].get_str();
          }
          return s;
        } else {
          return "derived:" + r.id;
        }
      },
      rule_);
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// One integer per line (blank lines and '#' comments skipped).
inline std::vector<BigInt> read_integer_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<BigInt> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    // Digit cache rows "n,q_n,E_n" contribute their q_n column.
    const auto cols = detail::split(t, ',');
    values.push_back(parse_bigint(detail::trim(cols.size() == 3 ? cols[1] : t)));
  }
  return values;
}

inline BasicSequence BasicSequence::parse(std::string_view text, const std::filesystem::path& base_dir) {
  text = detail::trim(text);
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  try {
    if (head == "tower2" && body.empty()) return tower();
    if (head == "triangular" && body.empty()) return triangular();
    if (head == "constant") return constant(parse_bigint(detail::trim(body)));
    if (head == "affine") {
      const auto parts = detail::split(body, ',');
      if (parts.size() != 2) throw Error(ErrorCode::ParseError, "affine rule needs 'affine:a,c'");
      return affine(parse_bigint(detail::trim(parts[0])), parse_bigint(detail::trim(parts[1])));
    }
    if (head == "list") {
      if (!body.empty() && body.front() == '@') {
        std::filesystem::path p(std::string(body.substr(1)));
        const auto resolved = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        return list(read_integer_column(resolved), std::string(body));
      }
      std::vector<BigInt> values;
      for (auto part : detail::split(body, ',')) values.push_back(parse_bigint(detail::trim(part)));
      return list(std::move(values));
    }
    if (head == "derived") return derived(std::string(body), derived_generator(body));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSequence || e.code() == ErrorCode::Io) throw;
    throw Error(ErrorCode::ParseError, "bad sequence rule '" + std::string(text) + "': " + e.what());
  }
  throw Error(ErrorCode::ParseError, "unknown sequence rule '" + std::string(text) + "'");
}

inline BigInt q_at(const BasicSequence& q, std::uint64_t n) { return q.at(n); }

/// q_1 * ... * q_n; the empty product is 1.
inline BigInt partial_product(const BasicSequence& q, std::uint64_t n) {
  if (n == 0) return 1;
  const auto terms = q.prefix(n);
  return product(terms);
}

/// Q_n^{(k)} = sum_{j=1}^{n} 1 / (q_j q_{j+1} ... q_{j+k-1}).
inline Rational qnk(const BasicSequence& q, std::uint64_t n, std::uint64_t k) {
  if (n == 0 || k == 0) throw Error(ErrorCode::InvalidArgument, "qnk needs n >= 1 and k >= 1");
  const auto terms = q.prefix(n + k - 1);
  std::vector<BigInt> dens(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    dens[j] = product(std::span<const BigInt>(terms).subspan(j, k));
  }
  return sum_reciprocals(dens);
}

/// Finite-prefix growth diagnostics for Q_n^{(k)}. Never a divergence verdict.
struct DivergenceReport {
  std::uint64_t k = 1;
  std::uint64_t length = 0;
  std::vector<Rational> qnk_values;   // entry n-1 holds Q_n^{(k)}
  std::uint64_t window_start = 1;     // trailing window [window_start, length]
  BigInt window_min;                  // min q_n over the trailing window
};

inline DivergenceReport divergence_report(const BasicSequence& q, std::uint64_t k, std::uint64_t length,
                                          std::uint64_t window = 0) {
  if (length == 0 || k == 0) throw Error(ErrorCode::InvalidArgument, "divergence_report needs N >= 1, k >= 1");
  if (window == 0) window = std::max<std::uint64_t>(1, length / 2);
  window = std::min(window, length);
  DivergenceReport rep;
  rep.k = k;
  rep.length = length;
  const auto terms = q.prefix(length + k - 1);
  Rational acc = 0;
  rep.qnk_values.reserve(length);
  for (std::uint64_t j = 0; j < length; ++j) {
    acc += Rational(1, product(std::span<const BigInt>(terms).subspan(j, k)));
    rep.qnk_values.push_back(acc);
  }
  rep.window_start = length - window + 1;
  rep.window_min = *std::min_element(terms.begin() + static_cast<std::ptrdiff_t>(rep.window_start - 1),
                                     terms.begin() + static_cast<std::ptrdiff_t>(length));
  return rep;
}

/// #{n <= N : p_n != q_n} / N.
inline Rational density_of_disagreement(const BasicSequence& p, const BasicSequence& q, std::uint64_t length) {
  if (length == 0) throw Error(ErrorCode::InvalidArgument, "density_of_disagreement needs N >= 1");
  const auto ps = p.prefix(length);
  const auto qs = q.prefix(length);
  std::uint64_t differ = 0;
  for (std::uint64_t i = 0; i < length; ++i) differ += ps[i] != qs[i];
  return make_rational(big(differ), big(length));
}

}  // namespace cantor
