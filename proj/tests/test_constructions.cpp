#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "cantor/constructions.hpp"
#include "cantor/discrepancy.hpp"
#include "cantor/rng.hpp"

using namespace cantor;

namespace {

using Digits = std::vector<BigInt>;

}  // namespace

TEST(ExampleSequences, Examples) {
  const auto s = example_sequences(10);
  EXPECT_EQ(s.digits, (Digits{0, 0, 2, 0, 2, 4, 0, 2, 4, 6}));
  EXPECT_EQ(s.radix.prefix(10), (Digits{2, 4, 4, 6, 6, 6, 8, 8, 8, 8}));
  const auto one = example_sequences(1);
  EXPECT_EQ(one.digits, (Digits{0}));
  EXPECT_EQ(one.radix.at(1), 2);
  const auto eleven = example_sequences(11);
  EXPECT_EQ(eleven.digit(11), 0);
  EXPECT_EQ(eleven.radix.at(11), 10);
  EXPECT_THROW(example_sequences(0), Error);
}

// Row m holds q = 2m and the digits 0, 2, ..., 2(m - 1), one per cell.
TEST(ExampleSequencesProperty, RowsAreEvenStaircases) {
  const auto s = example_sequences(5050);
  std::size_t n = 1;
  for (std::uint64_t m = 1; m <= 100; ++m) {
    for (std::uint64_t cell = 0; cell < m; ++cell, ++n) {
      ASSERT_EQ(s.digit(n), 2 * cell);
      ASSERT_EQ(s.radix.at(n), 2 * m);
    }
  }
  EXPECT_TRUE(validate_stream(s).ok());
}

TEST(VanDerCorput, Examples) {
  EXPECT_EQ(vdc_driver(1), Rational(1, 2));
  EXPECT_EQ(vdc_driver(2), Rational(1, 4));
  EXPECT_EQ(vdc_driver(3), Rational(3, 4));
  EXPECT_EQ(vdc_driver(6), Rational(3, 8));
  EXPECT_THROW(vdc_driver(0), Error);
}

TEST(PhiWindow, Examples) {
  const auto ten = BasicSequence::constant(10);
  EXPECT_EQ(phi_window(ten, 2, Rational(37, 100), 1).center, 2);

  const auto first = phi_window(ten, 2, Rational(1, 2), 1);
  EXPECT_EQ(first.f.exact(), Rational(0));
  EXPECT_EQ(first.omega, 5);

  const auto tower = phi_window(BasicSequence::tower(), 2, Rational(1, 3), 3);
  EXPECT_EQ(tower.q, 256);
  EXPECT_EQ(tower.f.exact(), Rational(3, 4));
  EXPECT_EQ(tower.omega, 2);
}

TEST(PhiWindow, WindowIsCenteredAndClipped) {
  const auto w = detail::make_phi_window(4, 1000, BigInt(10), 2, Rational(1, 2));
  EXPECT_EQ(w.omega, 50);
  EXPECT_EQ(w.center, 500);
  EXPECT_EQ(w.first, 450);
  EXPECT_EQ(w.last, 550);
  EXPECT_FALSE(w.clipped);
  EXPECT_EQ(w.size(), 51);

  const auto edge = detail::make_phi_window(4, 1000, BigInt(10), 2, Rational(1, 1000));
  EXPECT_EQ(edge.first, 0);
  EXPECT_TRUE(edge.clipped);
  EXPECT_TRUE(edge.contains(50));
  EXPECT_FALSE(edge.contains(51));
  EXPECT_THROW(detail::make_phi_window(1, 10, BigInt(1), 1, Rational(1, 2)), Error);
  EXPECT_THROW(detail::make_phi_window(1, 10, BigInt(1), 2, Rational(1)), Error);
}

TEST(PhiSample, ZeroDriverGivesZeroDigits) {
  const auto s = phi_sample(BasicSequence::affine(1, 10), 2, [](std::uint64_t) { return Rational(0); }, 200);
  for (const auto& d : s.stream.digits) EXPECT_EQ(d, 0);
  EXPECT_EQ(s.clamps, 0u);
}

TEST(PhiSample, DigitsAreMultiplesOfB) {
  for (long b : {2, 3, 5}) {
    const auto s = phi_sample(BasicSequence::affine(1, 10), b, vdc_driver, 2000, uniform_chooser(static_cast<std::uint64_t>(b)));
    for (std::size_t n = 0; n < s.stream.size(); ++n) {
      EXPECT_EQ(mod_floor(s.stream.digits[n], b), 0);
      EXPECT_TRUE(s.windows[n].contains(s.stream.digits[n]));
    }
    EXPECT_TRUE(validate_stream(s.stream).ok());
  }
}

TEST(PhiSample, TracksTheDriver) {
  const auto q = BasicSequence::affine(1, 10);
  const std::size_t n = 100000;
  const auto s = phi_sample(q, 2, vdc_driver, n);
  const auto qs = q.prefix(n);
  std::vector<Rational> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(make_rational(s.stream.digits[i], qs[i]));
  EXPECT_LE(discrepancy_exact(points), Rational(1, 50));
}

TEST(PhiSample, TowerWindowsAreEnumerable) {
  // Cycles through V_n so every member is produced at least once over repeated sampling.
  auto counter = std::make_shared<std::uint64_t>(0);
  PhiChooser cycle = [counter](const PhiWindow& w) { return BigInt(w.first + w.b * ((*counter)++ % to_u64(w.size()))); };
  const auto q = BasicSequence::tower();
  const auto s = phi_sample(q, 2, vdc_driver, 5, cycle);
  EXPECT_EQ(s.clamps, 0u);
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto& w = s.windows[n - 1];
    const auto expected = phi_window(q, 2, vdc_driver(n), n);
    EXPECT_EQ(w.omega, expected.omega);
    EXPECT_EQ(w.first, expected.first);
    EXPECT_EQ(w.last, expected.last);
    EXPECT_LE(w.size(), w.omega + 1);
  }
}

TEST(RationalMultiple, Examples) {
  EXPECT_EQ(rational_multiple_limit(3, 2, 1), Rational(1, 3));
  EXPECT_EQ(rational_multiple_limit(1, 2, 1), 0);
  EXPECT_EQ(rational_multiple_limit(5, 3, 2), Rational(2, 5));
  EXPECT_THROW(rational_multiple_limit(0, 2, 0), Error);
  EXPECT_THROW(rational_multiple_limit(2, 4, 2), Error);
  EXPECT_THROW(rational_multiple_limit(3, 2, 0), Error);

  // Independently: fraction of u in [0, 1/b) with frac(a u) < c/b.
  EXPECT_EQ(rational_multiple_frequency(3, 2), Rational(2, 3));
  EXPECT_EQ(rational_multiple_frequency(1, 2), 1);
  EXPECT_EQ(rational_multiple_frequency(5, 3), Rational(4, 5));
}

// Midpoint sampling of [0, 1/b) on a fine grid as an oracle for the corrected frequency.
TEST(RationalMultipleProperty, FrequencyMatchesGridCount) {
  for (long a = 1; a <= 12; ++a) {
    for (long b = 2; b <= 7; ++b) {
      if (std::gcd(a, b) != 1) continue;
      const long c = a % b;
      const long grid = 27720;  // lcm(1..12): every breakpoint (j b + c) / (a b) lands on the grid
      long hits = 0;
      for (long i = 0; i < grid; ++i) {
        const Rational u = make_rational(2 * i + 1, 2 * grid * b);
        hits += frac_of(u * a) < Rational(c, b);
      }
      EXPECT_EQ(rational_multiple_frequency(a, b), make_rational(hits, grid)) << a << "/" << b;
    }
  }
}

TEST(Moran, Examples) {
  const auto tower = moran_bound_partial(BasicSequence::tower(), 2, 3);
  ASSERT_EQ(tower.partials.size(), 3u);
  ASSERT_TRUE(tower.partials[2].value);
  EXPECT_EQ(tower.partials[2].value->exact(), Rational(3, 29));

  const auto two = moran_bound_partial(BasicSequence::list({4, 16}), 2, 1);
  ASSERT_TRUE(two.partials[0].value);
  EXPECT_EQ(two.omegas[1], 2);
  EXPECT_EQ(two.partials[0].value->exact(), Rational(1, 5));

  // q_{n+1} = 2 q_1 ... q_n makes every omega equal to 1.
  const auto ones = moran_bound_partial(BasicSequence::list({2, 4, 16, 256, 65536}), 2, 4);
  for (const auto& w : ones.omegas) EXPECT_EQ(w, 1);
  for (const auto& p : ones.partials) EXPECT_EQ(p.value->exact(), Rational(0));

  const auto flat = moran_bound_partial(BasicSequence::constant(4), 2, 3);
  EXPECT_EQ(flat.omegas[0], 2);
  EXPECT_EQ(flat.omegas[1], 0);
  EXPECT_FALSE(flat.diagnostic.empty());
  EXPECT_THROW(moran_bound_partial(BasicSequence::tower(), 2, 0), Error);
}

TEST(MoranProperty, TowerPartialsFollowTheClosedForm) {
  const auto ev = moran_bound_partial(BasicSequence::tower(), 2, 7);
  for (const auto& p : ev.partials) {
    const auto k = static_cast<long>(p.k);
    EXPECT_EQ(p.value->exact(), make_rational(k, (1L << (k + 2)) - 3)) << "k = " << k;
  }
}

TEST(MainConstruction, NoOnesMeansNothingChanges) {
  const auto p = BasicSequence::affine(1, 1);
  const DigitStream y{p, 0, Digits(500, 0), Tail::Zero};
  const auto st = main_construction(p, y, 500, 4);
  EXPECT_TRUE(st.changed.empty());
  EXPECT_EQ(st.q.prefix(500), p.prefix(500));
  EXPECT_EQ(st.x.digits, y.digits);
  EXPECT_EQ(st.interpretation_flags.size(), 3u);
}

TEST(MainConstruction, MultiplesAvoidDigitOneWhereCovered) {
  const auto p = BasicSequence::affine(1, 1);
  const std::size_t n = 10000;
  const auto y = random_stream(p, n + 64, 20240601);
  const auto st = main_construction(p, y, n, 4);
  ASSERT_EQ(st.length(), n);
  EXPECT_LE(Rational(big(st.changed.size()), big(n)), Rational(1, 20));
  EXPECT_EQ(st.ell.front(), 1u);
  for (std::size_t i = 1; i < st.ell.size(); ++i) EXPECT_LE(st.ell[i - 1], st.ell[i]);
  for (std::size_t i = 1; i < n; ++i) EXPECT_LE(st.m[i - 1], st.m[i]);
  for (std::uint32_t m = 2; m <= 4; ++m) {
    const auto c = check_multiple(st, m);
    EXPECT_GT(c.certified, n / 2);
    EXPECT_TRUE(c.ones_in_range.empty()) << "m = " << m << " first at " << c.ones_in_range.front();
  }
  // Q only differs from P by the recorded multipliers.
  const auto qs = st.q.prefix(n);
  const auto ps = p.prefix(n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(qs[i], ps[i] * st.multiplier[i]);
  EXPECT_THROW(st.q.at(n + 1), Error);
}
