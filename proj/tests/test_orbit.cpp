#include <gtest/gtest.h>

#include <vector>

#include "cantor/constructions.hpp"
#include "cantor/orbit.hpp"
#include "cantor/rng.hpp"

using namespace cantor;

namespace {

using Points = std::vector<Rational>;

}  // namespace

TEST(TOrbit, Examples) {
  EXPECT_EQ(t_orbit(Rational(1, 2), BasicSequence::constant(2), 2).values, (Points{Rational(1, 2), 0, 0}));
  EXPECT_EQ(t_orbit(Rational(1, 3), BasicSequence::constant(2), 3).values,
            (Points{Rational(1, 3), Rational(2, 3), Rational(1, 3), Rational(2, 3)}));
  EXPECT_EQ(t_orbit(Rational(1, 4), BasicSequence::triangular(), 2).values, (Points{Rational(1, 4), Rational(1, 2), 0}));
}

TEST(TOrbit, StartsFromTheFractionalPart) {
  EXPECT_EQ(t_orbit(Rational(-3, 2), BasicSequence::constant(3), 0).values, (Points{Rational(1, 2)}));
}

// The n-th digit is floor(q_n T_{n-1}), so greedy extraction and the orbit must agree.
TEST(TOrbit, DigitsAreFloorsOfTheScaledOrbit) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const BigInt den = 1 + rng.below(BigInt(1000000));
    const Rational x = make_rational(rng.below(den), den);
    const auto q = i % 2 ? BasicSequence::affine(1, 1) : BasicSequence::triangular();
    const auto orbit = t_orbit(x, q, 40);
    const auto s = digits_from_rational(x, q, 40);
    const auto qs = q.prefix(40);
    for (std::size_t n = 0; n < 40; ++n) EXPECT_EQ(floor_of(orbit.values[n] * qs[n]), s.digits[n]);
  }
}

TEST(StreamOrbit, ExactPointsMatchTheRecurrence) {
  const auto s = random_stream(BasicSequence::affine(1, 1), 60, 11);
  const StreamOrbit orbit(s);
  const Rational lo = value_bounds(DigitStream{s.radix, 0, s.digits, Tail::Zero}).lo;
  const auto reference = t_orbit(lo, s.radix, s.size());
  ASSERT_EQ(orbit.size(), s.size());
  for (std::size_t n = 0; n < orbit.size(); ++n) {
    EXPECT_EQ(orbit.exact(n), reference.values[n]);
    EXPECT_NEAR(orbit.approx(n), reference.values[n].get_d(), StreamOrbit::kApproxError);
  }
}

TEST(StreamOrbit, ComparisonsAgreeWithExactValues) {
  // Repeating digits make many orbit points coincide or nearly coincide, forcing exact refinement.
  DigitStream s{BasicSequence::constant(3), 0, {}, Tail::Unknown};
  for (int i = 0; i < 300; ++i) s.digits.push_back(i % 7 == 6 ? 2 : (i % 2));
  const StreamOrbit orbit(s);
  Rng rng(12);
  for (int t = 0; t < 2000; ++t) {
    const auto i = rng.below(orbit.size());
    const auto j = rng.below(orbit.size());
    EXPECT_EQ(orbit.compare(i, j), cmp(orbit.exact(i), orbit.exact(j)) <=> 0) << i << " " << j;
    const Rational r = orbit.exact(j);
    EXPECT_EQ(orbit.compare(i, r), cmp(orbit.exact(i), r) <=> 0);
  }
}

TEST(StreamOrbit, HandlesTheExamplePrefix) {
  const auto s = example_sequences(50);
  const StreamOrbit orbit(s);
  const Rational lo = value_bounds(DigitStream{s.radix, 0, s.digits, Tail::Zero}).lo;
  const auto reference = t_orbit(lo, s.radix, s.size());
  for (std::size_t n = 0; n < orbit.size(); ++n) EXPECT_EQ(orbit.exact(n), reference.values[n]);
}
