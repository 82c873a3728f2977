#pragma once

// Desk-scale acceptance checks at their pinned thresholds. Shared by `cantorlab verify` and the
// acceptance test binary; every check is deterministic given its seed.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cantor/basic_sequence.hpp"
#include "cantor/constructions.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/discrepancy.hpp"
#include "cantor/normality.hpp"
#include "cantor/orbit.hpp"
#include "cantor/rational.hpp"
#include "cantor/rng.hpp"
#include "cantor/streaming.hpp"

namespace cantor::experiment {

inline constexpr std::uint64_t kPerturbationSeed = 38;
inline constexpr std::uint64_t kOracleSeed = 0xD15C;
inline constexpr std::uint64_t kPsiSeed = 36;
inline constexpr std::uint64_t kMainSeed = 20240601;
inline constexpr std::uint64_t kTransformSeed = 31;

struct Measurement {
  std::string label;
  std::string observed;
  std::string threshold;
  bool pass = true;
};

struct CheckResult {
  int criterion = 0;
  std::string suite;
  std::string title;
  std::vector<Measurement> items;
  std::vector<std::string> notes;

  bool pass() const {
    return std::all_of(items.begin(), items.end(), [](const Measurement& m) { return m.pass; });
  }

  std::string summary_line() const {
    std::string s = "criterion " + std::to_string(criterion) + (pass() ? " PASS " : " FAIL ") + "[" + suite + "] " +
                    title + ":";
    for (std::size_t i = 0; i < items.size(); ++i) {
      s += (i ? "; " : " ") + items[i].label + " = " + items[i].observed + " (need " + items[i].threshold + ")";
    }
    return s;
  }
};

struct CheckContext {
  std::optional<std::filesystem::path> cache_root;  // reuse and store generated streams here
};

namespace detail {

/// Exact text for short rationals; long ones print as a decimal plus the size of the exact form.
inline std::string show(const Rational& r) {
  std::ostringstream out;
  const auto digits = mpz_sizeinbase(r.get_den().get_mpz_t(), 10);
  if (digits <= 24) {
    out << r.get_str();
    if (r.get_den() != 1) out << " ~ " << r.get_d();
  } else {
    out.precision(10);
    out << r.get_d() << " (exact, " << digits << "-digit denominator)";
  }
  return out.str();
}

inline std::string show_ratio(std::uint64_t num, std::uint64_t den) { return show(make_rational(big(num), big(den))); }

/// Loads `<cache_root>/verify/<key>.csv` when present with enough digits, else generates and stores.
inline DigitStream cached_stream(const CheckContext& ctx, const std::string& key, std::size_t length,
                                 std::uint64_t seed, const std::function<DigitStream()>& generate) {
  if (!ctx.cache_root) return generate();
  const auto path = *ctx.cache_root / "verify" / (key + ".csv");
  if (std::filesystem::exists(path)) {
    try {
      auto c = read_digit_cache(path);
      if (c.stream.size() >= length && c.seed == seed) return std::move(c.stream);
    } catch (const Error&) {
      // fall through and regenerate a damaged cache
    }
  }
  auto s = generate();
  write_digit_cache(path, s, seed);
  return s;
}

inline Rational random_unit_rational(Rng& rng, std::uint64_t max_den) {
  const std::uint64_t den = 1 + rng.below(max_den);
  return make_rational(big(rng.below(den)), big(den));
}

}  // namespace detail

/// Triangular example: the orbit of x is well spread, the orbit of x/2 sits in [0, 1/2).
inline CheckResult check_example(const CheckContext& ctx = {}, std::size_t length = 20000) {
  CheckResult r{1, "example", "example reproduction (N=" + std::to_string(length) + ")", {}, {}};
  const auto x = detail::cached_stream(ctx, "example-" + std::to_string(length), length, 0,
                                       [&] { return example_sequences(length); });
  const DigitStream xs{x.radix, x.integer_part, {x.digits.begin(), x.digits.begin() + length}, Tail::Unknown};
  const StreamOrbit ox(xs);
  const Rational dx = discrepancy_exact(ox);
  r.items.push_back({"D_N(orbit x)", detail::show(dx), "<= 1/20", dx <= Rational(1, 20)});

  const auto half = scale_stream(1, 2, xs);
  const StreamOrbit oy(half.stream);
  const std::size_t n = oy.size();
  const auto below = interval_count(oy, Interval(0, Rational(1, 2)), n);
  r.items.push_back({"A_N([0,1/2), orbit x/2)/N", detail::show_ratio(below, n), ">= 19/20",
                     make_rational(big(below), big(n)) >= Rational(19, 20)});
  const Rational dy = discrepancy_exact(oy);
  r.items.push_back({"D_N(orbit x/2)", detail::show(dy), ">= 9/20", dy >= Rational(9, 20)});
  r.notes.push_back("x/2 certified on " + std::to_string(n) + " of " + std::to_string(length) + " digits");
  return r;
}

/// |D_N(X) - D_N(Y)| <= 2 eps + #{n : |x_n - y_n| > eps} / N on random perturbed pairs.
inline CheckResult check_perturbation(std::size_t trials = 100, std::size_t points = 200, std::uint64_t seed = kPerturbationSeed) {
  CheckResult r{2, "lemma38", "perturbation bound (" + std::to_string(trials) + " pairs of " +
                                  std::to_string(points) + " points)", {}, {}};
  Rng rng(seed, 1);
  std::size_t held = 0;
  std::size_t first_failure = 0;
  const std::vector<Rational> eps_choices{0, Rational(1, 1000), Rational(1, 100), Rational(1, 20), Rational(1, 5)};
  for (std::size_t t = 1; t <= trials; ++t) {
    std::vector<Rational> xs, ys;
    const auto shake = detail::random_unit_rational(rng, 1000);  // scale of the small perturbations
    for (std::size_t i = 0; i < points; ++i) {
      xs.push_back(detail::random_unit_rational(rng, 1000000));
      if (rng.below(10) < 7) {
        Rational d = shake * detail::random_unit_rational(rng, 1000) / 10;
        if (rng.below(2)) d = -d;
        ys.push_back(frac_of(xs.back() + d));
      } else {
        ys.push_back(detail::random_unit_rational(rng, 1000000));
      }
    }
    const Rational eps = rng.below(6) == 5 ? detail::random_unit_rational(rng, 100) : eps_choices[rng.below(5)];
    if (perturbation_bound_check(xs, ys, eps).holds) {
      ++held;
    } else if (!first_failure) {
      first_failure = t;
    }
  }
  r.items.push_back({"trials holding", std::to_string(held) + "/" + std::to_string(trials),
                     std::to_string(trials) + "/" + std::to_string(trials), held == trials});
  if (first_failure) r.notes.push_back("first failing trial " + std::to_string(first_failure));
  return r;
}

/// Sorted-point formula against endpoint enumeration, plus three hand cases.
inline CheckResult check_discrepancy_oracle(std::size_t instances = 200, std::uint64_t seed = kOracleSeed) {
  CheckResult r{3, "discrepancy", "discrepancy oracle equivalence (" + std::to_string(instances) + " prefixes)", {}, {}};
  struct Hand {
    std::vector<Rational> pts;
    Rational expected;
  };
  const std::vector<Hand> hand{{{Rational(1, 2)}, 1},
                               {{Rational(1, 4), Rational(3, 4)}, Rational(1, 2)},
                               {{0, Rational(1, 3), Rational(2, 3)}, Rational(1, 3)}};
  std::size_t hand_ok = 0;
  for (const auto& h : hand) hand_ok += discrepancy_exact(h.pts) == h.expected && discrepancy_brute(h.pts) == h.expected;
  r.items.push_back({"hand cases", std::to_string(hand_ok) + "/3", "3/3", hand_ok == 3});

  Rng rng(seed, 3);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t n = 1 + rng.below(500);
    // Small denominators force ties and shared endpoints; large ones exercise the generic case.
    const std::uint64_t max_den = (i % 3 == 0) ? 1 + rng.below(40) : 1000000000;
    std::vector<Rational> pts;
    for (std::size_t j = 0; j < n; ++j) pts.push_back(detail::random_unit_rational(rng, max_den));
    agree += discrepancy_exact(pts) == discrepancy_brute(pts);
  }
  r.items.push_back({"random prefixes agreeing", std::to_string(agree) + "/" + std::to_string(instances),
                     std::to_string(instances) + "/" + std::to_string(instances), agree == instances});
  return r;
}

/// Chained digit clamps change block counts by a bounded amount.
inline CheckResult check_psi(std::size_t instances = 20, std::size_t half_length = 10000, std::uint64_t seed = kPsiSeed) {
  CheckResult r{4, "psi", "block counts under chained clamps (" + std::to_string(instances) + " instances)", {}, {}};
  const std::vector<std::string> family{"affine:1,2", "affine:2,1", "affine:3,5", "derived:isqrt_plus2",
                                        "derived:log2_plus2"};
  const std::size_t length = 2 * half_length;
  Rng rng(seed, 4);
  std::size_t bounded = 0;
  std::uint64_t worst = 0;
  std::size_t min_hypothesis = SIZE_MAX;
  for (std::size_t i = 0; i < instances; ++i) {
    std::vector<BasicSequence> chain;
    const std::size_t depth = 2 + rng.below(3);
    for (std::size_t j = 0; j < depth; ++j) chain.push_back(BasicSequence::parse(family[rng.below(family.size())]));
    std::vector<BigInt> entries(1 + i % 2);
    for (auto& e : entries) e = big(rng.below(3));
    const Block block(entries);

    const auto x = random_stream(chain[0], length, seed, 100 + i);
    DigitStream image = x;
    for (std::size_t j = 1; j < chain.size(); ++j) image = psi_map(image, chain[j]);

    // E_n < min_{r >= 2} (q_{r,n} - 1) in the second half: the hypothesis, seen on the prefix.
    std::vector<std::vector<BigInt>> qs;
    for (std::size_t j = 1; j < chain.size(); ++j) qs.push_back(chain[j].prefix(length));
    std::size_t hypothesis = 0;
    for (std::size_t n = half_length; n < length; ++n) {
      bool below = true;
      for (const auto& q : qs) below = below && x.digits[n] < q[n] - 1;
      hypothesis += below;
    }
    min_hypothesis = std::min(min_hypothesis, hypothesis);

    std::int64_t cx = 0, cy = 0;
    std::uint64_t c_first = 0, c_all = 0;
    const std::size_t k = block.size();
    for (std::size_t n = 1; n <= length; ++n) {
      if (n >= k) {
        cx += cantor::detail::block_at(x.digits, n - k, block);
        cy += cantor::detail::block_at(image.digits, n - k, block);
      }
      const auto diff = static_cast<std::uint64_t>(cx > cy ? cx - cy : cy - cx);
      if (n <= half_length) c_first = std::max(c_first, diff);
      c_all = std::max(c_all, diff);
    }
    bounded += c_all <= c_first;
    worst = std::max(worst, c_all);
  }
  r.items.push_back({"instances with max_{n<=2M}|diff| <= max_{n<=M}|diff|",
                     std::to_string(bounded) + "/" + std::to_string(instances),
                     std::to_string(instances) + "/" + std::to_string(instances), bounded == instances});
  r.notes.push_back("largest count difference " + std::to_string(worst));
  r.notes.push_back("fewest second-half indices meeting the digit hypothesis " + std::to_string(min_hypothesis));
  return r;
}

/// (Q, x) from (P, y) with p_n = n + 1: sparse changes, multiples of x stop producing digit 1.
inline CheckResult check_main(const CheckContext& ctx = {}, std::size_t length = 100000,
                              std::uint32_t max_multiplier = 4, std::uint64_t seed = kMainSeed) {
  CheckResult r{5, "main", "multiples losing digit 1 (p_n = n+1, N=" + std::to_string(length) + ", seed " +
                               std::to_string(seed) + ")", {}, {}};
  const auto p = BasicSequence::affine(1, 1);
  // A few spare digits so the multiples of y certify the whole region.
  const std::size_t spare = 64;
  const auto y = detail::cached_stream(ctx, "main-y-" + std::to_string(seed) + "-" + std::to_string(length + spare),
                                       length + spare, seed,
                                       [&] { return random_stream(p, length + spare, seed); });
  const auto st = main_construction(p, y, length, max_multiplier);
  const std::size_t n = st.length();
  for (const auto& d : st.diagnostics) r.notes.push_back(d);
  r.notes.push_back("constructed region " + std::to_string(n) + ", |A| = " + std::to_string(st.changed.size()));

  const auto density = make_rational(big(st.changed.size()), big(n));
  r.items.push_back({"density(A)", detail::show(density), "<= 1/20", density <= Rational(1, 20)});

  const std::size_t window = std::min<std::size_t>(50000, n);
  for (std::uint32_t m = 2; m <= max_multiplier; ++m) {
    const auto c = check_multiple(st, m);
    // N_n constant on [end - window + 1, end] iff no digit 1 at positions end - window + 2 .. end.
    const std::size_t from = c.certified >= window ? c.certified - window + 2 : 1;
    const auto late = std::count_if(c.ones_anywhere.begin(), c.ones_anywhere.end(),
                                    [&](std::size_t pos) { return pos >= from; });
    const auto last = c.ones_anywhere.empty() ? std::string("none") : std::to_string(c.ones_anywhere.back());
    r.items.push_back({"digit-1 changes in last " + std::to_string(window) + " of " + std::to_string(m) + "x",
                       std::to_string(late) + " (last 1 at " + last + ")", "0", late == 0});
    if (!c.ones_in_range.empty()) {
      r.notes.push_back(std::to_string(m) + "x has digit 1 at " + std::to_string(c.ones_in_range.size()) +
                        " positions with M(n) >= " + std::to_string(m));
    }
  }

  const auto qs = st.q.prefix(n);
  std::vector<Rational> ratios(n);
  for (std::size_t i = 0; i < n; ++i) ratios[i] = make_rational(st.x.digits[i], qs[i]);
  const Rational d = discrepancy_exact(ratios);
  r.items.push_back({"D_N(E_n/q_n)", detail::show(d), "<= 1/20", d <= Rational(1, 20)});

  const Rational ratio = qnk(st.q, n, 1) / qnk(p, n, 1);
  r.items.push_back({"Q_N^(1)/P_N^(1)", detail::show(ratio), "in [19/20, 21/20]",
                     ratio >= Rational(19, 20) && ratio <= Rational(21, 20)});
  return r;
}

/// Replacing every digit 0 by 1 roughly doubles the 1-count and leaves no zeros.
inline CheckResult check_transform(std::size_t length = 1000000, std::uint64_t seed = kTransformSeed) {
  CheckResult r{6, "transform", "zero-to-one transform (q_n = floor(sqrt n)+2, N=" + std::to_string(length) + ")",
                {}, {}};
  const auto q = BasicSequence::parse("derived:isqrt_plus2");
  const auto s = random_stream(q, length, seed);
  const auto t = zero_to_one_transform(s);
  const auto ones = count_block(t, Block{1}, length);
  const auto zeros = count_block(t, Block{0}, length);
  const Rational ratio = Rational(big(ones)) / qnk(q, length, 1);
  r.items.push_back({"N_N((1))/Q_N^(1)", detail::show(ratio), "in [17/10, 23/10]",
                     ratio >= Rational(17, 10) && ratio <= Rational(23, 10)});
  r.items.push_back({"N_N((0)) after transform", std::to_string(zeros), "0", zeros == 0});
  return r;
}

/// x in Phi_{Q,b} driven by van der Corput; frequency of [0, c/b) along the orbit of (a/b) x.
inline CheckResult check_phi(const CheckContext& ctx = {}, std::size_t length = 100000) {
  const BigInt a = 3, b = 2;
  const BigInt c = mod_floor(a, b);
  CheckResult r{7, "phi", "rational multiple of a Phi point (q_n = n+10, b=2, a=3, N=" + std::to_string(length) + ")",
                {}, {}};
  const auto q = BasicSequence::affine(1, 10);
  const auto x = detail::cached_stream(ctx, "phi-" + std::to_string(length), length, 0, [&] {
    return phi_sample(q, b, [](std::uint64_t n) { return vdc_driver(n); }, length).stream;
  });
  const DigitStream xs{x.radix, 0, {x.digits.begin(), x.digits.begin() + length}, Tail::Unknown};
  const Rational target = rational_multiple_limit(a, b, c);
  const auto multiple = scale_stream(a, b, xs);
  const StreamOrbit om(multiple.stream);
  const auto hits = interval_count(om, Interval(0, make_rational(c, b)), om.size());
  const auto freq = make_rational(big(hits), big(om.size()));
  r.items.push_back({"A_N([0,1/2), orbit (3/2)x)/N", detail::show(freq), "in [" + detail::show(target) + " -/+ 1/20]",
                     abs_of(freq - target) <= Rational(1, 20)});
  const StreamOrbit ox(xs);
  const Rational dx = discrepancy_exact(ox);
  r.items.push_back({"D_N(orbit x)", detail::show(dx), "<= 1/20", dx <= Rational(1, 20)});
  r.notes.push_back("(floor(a/b)+1)c/a = " + detail::show(rational_multiple_frequency(a, b)) +
                    " is the frequency obtained by integrating over the digit windows");
  return r;
}

/// Moran partials for power-of-two towers against a log2-exponent oracle.
struct ExponentOracle {
  std::vector<BigInt> exponents;  // q_k = 2^{e_k}

  /// k-th partial with b = 2, or nothing when some omega(i), i <= k + 1, vanishes.
  std::vector<std::optional<Rational>> partials(std::size_t depth) const {
    std::vector<std::optional<BigInt>> w;  // omega(k) = 2^{w_k}
    BigInt sum = 0;                        // log2 of q_1 ... q_{k-1}
    std::vector<BigInt> sums;              // log2 of q_1 ... q_k
    for (std::size_t k = 0; k <= depth; ++k) {
      const BigInt d = exponents[k] - sum;
      w.push_back(d >= 1 ? std::optional<BigInt>(d - 1) : std::nullopt);
      sum += exponents[k];
      sums.push_back(sum);
    }
    std::vector<std::optional<Rational>> out;
    for (std::size_t k = 1; k <= depth; ++k) {
      bool ok = true;
      BigInt top = 0;
      for (std::size_t i = 0; i <= k; ++i) ok = ok && w[i].has_value();
      if (!ok) {
        out.emplace_back();
        continue;
      }
      for (std::size_t i = 0; i < k; ++i) top += *w[i];
      out.emplace_back(make_rational(top, sums[k] - *w[k]));
    }
    return out;
  }
};

inline CheckResult check_moran(std::size_t depth = 6) {
  CheckResult r{8, "moran", "Moran bound partials (b=2, K<=" + std::to_string(depth) + ")", {}, {}};
  const BigInt b = 2;
  const auto tower = moran_bound_partial(BasicSequence::tower(), b, depth);
  const auto k3 = tower.partials.size() >= 3 && tower.partials[2].value ? tower.partials[2].value->exact()
                                                                        : std::optional<Rational>{};
  r.items.push_back({"tower partial k=3", k3 ? detail::show(*k3) : "undefined", "= 3/29", k3 && *k3 == Rational(3, 29)});

  struct Family {
    std::string name;
    std::function<BigInt(std::uint64_t)> exponent;
  };
  const std::vector<Family> families{
      {"2^(2^k)", [](std::uint64_t k) { return BigInt(BigInt(1) << static_cast<mp_bitcnt_t>(k)); }},
      {"2^(3^k)", [](std::uint64_t k) { BigInt v; mpz_ui_pow_ui(v.get_mpz_t(), 3, k); return v; }},
      {"2^(k+1)", [](std::uint64_t k) { return big(k + 1); }},
      {"2^(2k+1)", [](std::uint64_t k) { return big(2 * k + 1); }},
      {"2^(k^2+1)", [](std::uint64_t k) { return big(k * k + 1); }},
      {"2^(k!+1)", [](std::uint64_t k) { BigInt v; mpz_fac_ui(v.get_mpz_t(), k); return BigInt(v + 1); }},
  };
  std::size_t matched = 0, compared = 0;
  for (const auto& f : families) {
    ExponentOracle oracle;
    std::vector<BigInt> qs;
    for (std::uint64_t k = 1; k <= depth + 1; ++k) {
      oracle.exponents.push_back(f.exponent(k));
      qs.push_back(BigInt(1) << static_cast<mp_bitcnt_t>(to_u64(oracle.exponents.back())));
    }
    const auto expected = oracle.partials(depth);
    const auto got = moran_bound_partial(BasicSequence::list(qs, f.name), b, depth);
    for (std::size_t k = 0; k < depth; ++k) {
      ++compared;
      const auto& v = got.partials[k].value;
      const auto exact = v ? v->exact() : std::optional<Rational>{};
      if (v && !exact) continue;  // a power-of-two input must evaluate exactly
      matched += expected[k] == exact;
    }
  }
  r.items.push_back({"partials matching the exponent oracle", std::to_string(matched) + "/" + std::to_string(compared),
                     std::to_string(compared) + "/" + std::to_string(compared), matched == compared});
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"example", "lemma38", "discrepancy", "psi",
                                              "main",    "transform", "phi",       "moran"};
  return names;
}

/// Runs one suite by name, or every suite for "all".
inline std::vector<CheckResult> run_suite(const std::string& suite, const CheckContext& ctx = {}) {
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  if (all || suite == "example") out.push_back(check_example(ctx));
  if (all || suite == "lemma38") out.push_back(check_perturbation());
  if (all || suite == "discrepancy") out.push_back(check_discrepancy_oracle());
  if (all || suite == "psi") out.push_back(check_psi());
  if (all || suite == "main") out.push_back(check_main(ctx));
  if (all || suite == "transform") out.push_back(check_transform());
  if (all || suite == "phi") out.push_back(check_phi(ctx));
  if (all || suite == "moran") out.push_back(check_moran());
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "unknown verify suite '" + suite + "'");
  return out;
}

}  // namespace cantor::experiment
