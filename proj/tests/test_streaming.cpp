#include <gtest/gtest.h>

#include <vector>

#include "cantor/constructions.hpp"
#include "cantor/rng.hpp"
#include "cantor/streaming.hpp"

using namespace cantor;

namespace {

using Digits = std::vector<BigInt>;

DigitStream exact(const BasicSequence& q, Digits digits) { return {q, 0, std::move(digits), Tail::Zero}; }
DigitStream open(const BasicSequence& q, Digits digits) { return {q, 0, std::move(digits), Tail::Unknown}; }

bool is_prefix(const Digits& a, const Digits& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

TEST(ScaleStream, Examples) {
  const auto four = BasicSequence::constant(4);
  const auto doubled = scale_stream(2, 1, exact(four, {1, 0, 0}));
  EXPECT_EQ(doubled.stream.digits, (Digits{2, 0, 0}));
  EXPECT_TRUE(doubled.complete());
  EXPECT_EQ(doubled.stream.tail, Tail::Zero);
  EXPECT_TRUE(is_prefix(scale_stream(2, 1, open(four, {1, 0, 0})).stream.digits, {2, 0, 0}));

  EXPECT_EQ(scale_stream(1, 2, exact(four, {2, 0})).stream.digits, (Digits{1, 0}));

  const Digits halved{0, 0, 1, 0, 1, 2, 0, 1, 2, 3};
  auto x = example_sequences(10);
  x.tail = Tail::Zero;
  EXPECT_EQ(scale_stream(1, 2, x).stream.digits, halved);
  x.tail = Tail::Unknown;  // every digit is even, so halving needs no look-ahead
  EXPECT_EQ(scale_stream(1, 2, x).stream.digits, halved);
}

TEST(ScaleStream, WithholdsWhatTheTailCouldChange) {
  // x in [1/2, 3/4) against base 2: 3x spans [3/2, 9/4), so not even frac's first digit is pinned.
  const auto r = scale_stream(3, 1, open(BasicSequence::constant(2), {1, 0}));
  EXPECT_EQ(r.stream.size() + r.withheld, 2u);
  EXPECT_FALSE(r.complete());
}

TEST(ScaleStream, RejectsBadArguments) {
  const auto x = exact(BasicSequence::constant(2), {1});
  EXPECT_THROW(scale_stream(2, 4, x), Error);
  EXPECT_THROW(scale_stream(1, 0, x), Error);
  EXPECT_THROW(scale_stream(1, 2, exact(BasicSequence::constant(2), {3})), Error);
  const auto zero = scale_stream(0, 1, x);
  EXPECT_EQ(zero.stream.digits, (Digits{0}));
  EXPECT_EQ(zero.stream.tail, Tail::Zero);
}

TEST(ShiftRational, Examples) {
  const auto two = BasicSequence::constant(2);
  const auto x = open(two, {1, 0, 1, 1, 0});
  EXPECT_EQ(shift_rational(0, x).stream.digits, x.digits);
  EXPECT_EQ(shift_rational(Rational(1, 2), exact(two, {0, 0})).stream.digits, (Digits{1, 0}));
  EXPECT_EQ(shift_rational(Rational(1, 4), exact(two, {1, 0, 0})).stream.digits, (Digits{1, 1, 0}));
  // Integer shifts only move the integer part, which frac drops.
  EXPECT_EQ(shift_rational(Rational(5), x).stream.digits, x.digits);
}

// Certified digits agree with greedy extraction from the exact product, whatever the tail.
TEST(StreamingProperty, CertifiedPrefixAgreesWithExactDigits) {
  const std::vector<BasicSequence> rules{BasicSequence::constant(2), BasicSequence::constant(3),
                                         BasicSequence::affine(1, 1), BasicSequence::triangular(),
                                         BasicSequence::parse("derived:log2_plus2"),
                                         BasicSequence::list({2, 2, 3, 7, 2, 5, 2, 2, 2, 11, 3, 2, 2, 4, 2, 2,
                                                              3, 3, 2, 2, 2, 2, 5, 2, 2, 2, 2, 9, 2, 2})};
  Rng rng(77, 2);
  std::size_t total_certified = 0, total = 0;
  for (int i = 0; i < 600; ++i) {
    const auto& q = rules[static_cast<std::size_t>(i) % rules.size()];
    const BigInt den = 1 + rng.below(BigInt(1) << 30);
    const Rational x = make_rational(rng.below(BigInt(den) * 4) - BigInt(den) * 2, den);
    const std::size_t len = 1 + rng.below(30);
    const auto s = digits_from_rational(x, q, len);

    BigInt a = big_signed(static_cast<std::int64_t>(rng.below(41)) - 20);
    BigInt b = big(1 + rng.below(12));
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (g != 1) {
      a /= g;
      b /= g;
    }
    const auto scaled = scale_stream(a, b, s);
    const auto oracle = digits_from_rational(frac_of(Rational(a, b) * x), q, len);
    ASSERT_TRUE(is_prefix(scaled.stream.digits, oracle.digits)) << "x=" << x << " a/b=" << a << "/" << b;
    EXPECT_EQ(scaled.stream.size() + scaled.withheld, len);
    if (s.tail == Tail::Zero) {
      EXPECT_TRUE(scaled.complete());
    }

    const Rational r = make_rational(big_signed(static_cast<std::int64_t>(rng.below(200)) - 100), big(1 + rng.below(30)));
    const auto shifted = shift_rational(r, s);
    const auto shift_oracle = digits_from_rational(frac_of(r + x), q, len);
    ASSERT_TRUE(is_prefix(shifted.stream.digits, shift_oracle.digits)) << "x=" << x << " r=" << r;
    total_certified += scaled.stream.size() + shifted.stream.size();
    total += 2 * len;
  }
  // Withholding is the exception, not the rule.
  EXPECT_GT(total_certified * 10, total * 8);
}
