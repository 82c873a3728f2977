#include <gtest/gtest.h>

#include <filesystem>
#include <vector>

#include "cantor/constructions.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/rng.hpp"

using namespace cantor;

namespace {

DigitStream stream(const BasicSequence& q, std::vector<BigInt> digits, BigInt e0 = 0) {
  return DigitStream{q, std::move(e0), std::move(digits), Tail::Unknown};
}

using Digits = std::vector<BigInt>;

}  // namespace

TEST(DigitsFromRational, Examples) {
  EXPECT_EQ(digits_from_rational(Rational(1, 2), BasicSequence::constant(2), 3).digits, (Digits{1, 0, 0}));
  EXPECT_EQ(digits_from_rational(Rational(1, 2), BasicSequence::constant(3), 4).digits, (Digits{1, 1, 1, 1}));
  EXPECT_EQ(digits_from_rational(Rational(1, 3), BasicSequence::triangular(), 3).digits, (Digits{0, 2, 2}));
}

TEST(DigitsFromRational, IntegerPartAndTerminatingTail) {
  const auto s = digits_from_rational(Rational(-7, 4), BasicSequence::constant(2), 4);
  EXPECT_EQ(s.integer_part, -2);
  EXPECT_EQ(s.digits, (Digits{0, 1, 0, 0}));
  EXPECT_EQ(s.tail, Tail::Zero);
  EXPECT_EQ(digits_from_rational(Rational(1, 3), BasicSequence::constant(2), 5).tail, Tail::Unknown);
}

TEST(ValueBounds, Examples) {
  const auto a = value_bounds(stream(BasicSequence::constant(2), {1, 0}));
  EXPECT_EQ(a.lo, Rational(1, 2));
  EXPECT_EQ(a.hi, Rational(3, 4));
  const auto b = value_bounds(stream(BasicSequence::triangular(), {0, 2}));
  EXPECT_EQ(b.lo, Rational(1, 4));
  EXPECT_EQ(b.hi, Rational(3, 8));
  const auto c = value_bounds(stream(BasicSequence::constant(2), {}, 2));
  EXPECT_EQ(c.lo, 2);
  EXPECT_EQ(c.hi, 3);
  EXPECT_THROW(value_bounds(stream(BasicSequence::constant(2), {2})), Error);
}

TEST(PsiMap, Examples) {
  const auto src = stream(BasicSequence::constant(20), {5, 7});
  EXPECT_EQ(psi_map(src, BasicSequence::list({4, 10})).digits, (Digits{3, 7}));
  EXPECT_EQ(psi_map(stream(BasicSequence::constant(20), {0, 1, 2}), BasicSequence::constant(9)).digits,
            (Digits{0, 1, 2}));
  EXPECT_EQ(psi_map(stream(BasicSequence::constant(20), {3, 3}), BasicSequence::constant(2)).digits, (Digits{1, 1}));
  const auto moved = psi_map(stream(BasicSequence::constant(20), {3}, 4), BasicSequence::constant(2));
  EXPECT_EQ(moved.integer_part, 4);
  EXPECT_EQ(moved.radix.to_string(), "constant:2");
}

TEST(ZeroToOne, Examples) {
  const auto q = BasicSequence::constant(10);
  EXPECT_EQ(zero_to_one_transform(stream(q, {0, 5, 0, 3})).digits, (Digits{1, 5, 1, 3}));
  EXPECT_EQ(zero_to_one_transform(stream(q, {1, 2, 3})).digits, (Digits{1, 2, 3}));
  EXPECT_EQ(zero_to_one_transform(stream(q, {0, 0, 0})).digits, (Digits{1, 1, 1}));
}

TEST(ZeroToOne, ChangesExactlyTheZeros) {
  const auto s = random_stream(BasicSequence::parse("derived:log2_plus2"), 5000, 12);
  const auto t = zero_to_one_transform(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s.digits[i] != t.digits[i], s.digits[i] == 0);
  }
}

TEST(ValidateStream, Examples) {
  const auto q = BasicSequence::constant(2);
  EXPECT_TRUE(validate_stream(stream(q, {1, 0})).issues.empty());
  const auto bad = validate_stream(stream(q, {2, 0}));
  ASSERT_EQ(bad.issues.size(), 1u);
  EXPECT_EQ(bad.issues[0].kind, StreamIssue::Kind::DigitOutOfRange);
  EXPECT_EQ(bad.issues[0].index, 1u);
  EXPECT_FALSE(bad.ok());
  const auto maxed = validate_stream(stream(q, {1, 1}));
  ASSERT_EQ(maxed.issues.size(), 1u);
  EXPECT_EQ(maxed.issues[0].kind, StreamIssue::Kind::AllMaxWindow);
  EXPECT_TRUE(maxed.ok());
  EXPECT_EQ(validate_stream(stream(q, {0, 1, 1})).last_non_max, 1u);
}

TEST(DigitCache, RoundTripsLosslessly) {
  const auto dir = std::filesystem::temp_directory_path() / "cantor_cache_test";
  std::filesystem::remove_all(dir);
  const auto x = example_sequences(30);
  write_digit_cache(dir / "example.csv", x, 99);
  const auto back = read_digit_cache(dir / "example.csv");
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.rule, "triangular");
  EXPECT_EQ(back.stream.digits, x.digits);
  EXPECT_EQ(back.stream.radix.to_string(), "triangular");

  // A rule that cannot be rebuilt falls back to the stored q column.
  auto odd = digits_from_rational(Rational(-3, 7), BasicSequence::derived("opaque", [](std::uint64_t n) {
                                    return BigInt(n % 3 + 2);
                                  }), 12);
  write_digit_cache(dir / "odd.csv", odd, 1);
  const auto odd_back = read_digit_cache(dir / "odd.csv");
  EXPECT_EQ(odd_back.stream.digits, odd.digits);
  EXPECT_EQ(odd_back.stream.integer_part, -1);
  EXPECT_EQ(odd_back.stream.radix.prefix(12), odd.radix.prefix(12));
  EXPECT_EQ(format_digit_cache(odd_back.stream, 1).substr(format_digit_cache(odd_back.stream, 1).find('\n')),
            format_digit_cache(odd, 1).substr(format_digit_cache(odd, 1).find('\n')));
  EXPECT_THROW(read_digit_cache(dir / "missing.csv"), Error);
}

TEST(DigitStreamProperty, RoundTripBracketsTheValue) {
  const std::vector<BasicSequence> rules{BasicSequence::constant(2), BasicSequence::constant(10),
                                         BasicSequence::affine(1, 1), BasicSequence::triangular(),
                                         BasicSequence::tower(), BasicSequence::parse("derived:isqrt_plus2"),
                                         BasicSequence::list({3, 2, 7, 5, 2, 2, 9, 4, 3, 2, 6, 5})};
  Rng rng(2024, 7);
  for (int i = 0; i < 500; ++i) {
    const auto& q = rules[static_cast<std::size_t>(i) % rules.size()];
    const BigInt den = 1 + rng.below(BigInt(1) << 40);
    const Rational x = make_rational(rng.below(BigInt(den) * 6) - BigInt(den) * 3, den);
    const std::size_t len = q.to_string() == "tower2" ? 1 + rng.below(6) : 1 + rng.below(12);
    const auto s = digits_from_rational(x, q, len);
    const auto v = value_bounds(s);
    EXPECT_LE(v.lo, x);
    EXPECT_LT(x, v.hi);
    EXPECT_EQ(v.hi - v.lo, Rational(1, partial_product(q, len)));
    if (s.tail == Tail::Zero) {
      EXPECT_EQ(v.lo, x);
    }
  }
}
