#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "cantor/basic_sequence.hpp"

using namespace cantor;

TEST(BasicSequence, QAtExamples) {
  EXPECT_EQ(q_at(BasicSequence::constant(2), 5), 2);
  EXPECT_EQ(q_at(BasicSequence::triangular(), 4), 6);
  EXPECT_EQ(q_at(BasicSequence::tower(), 3), 256);
}

TEST(BasicSequence, TriangularPrefixIsTheListedOne) {
  const std::vector<BigInt> listed{2, 4, 4, 6, 6, 6, 8, 8, 8, 8, 10};
  EXPECT_EQ(BasicSequence::triangular().prefix(11), listed);
  // prefix() takes a fast path; at() must agree with it.
  const auto q = BasicSequence::triangular();
  const auto pre = q.prefix(200);
  for (std::uint64_t n = 1; n <= 200; ++n) EXPECT_EQ(q.at(n), pre[n - 1]) << n;
}

TEST(BasicSequence, RejectsTermsBelowTwo) {
  EXPECT_THROW(BasicSequence::constant(1), Error);
  EXPECT_THROW(BasicSequence::affine(1, 0), Error);   // q_1 = 1
  EXPECT_THROW(BasicSequence::affine(-1, 50), Error);  // eventually below 2
  EXPECT_THROW(BasicSequence::list({3, 1, 4}), Error);
  const auto bad = BasicSequence::derived("bad", [](std::uint64_t n) { return BigInt(n == 3 ? 1 : 5); });
  EXPECT_EQ(bad.at(2), 5);
  EXPECT_THROW(bad.at(3), Error);
  EXPECT_THROW(BasicSequence::constant(2).at(0), Error);
}

TEST(BasicSequence, ParsesRuleStrings) {
  EXPECT_EQ(BasicSequence::parse("constant:7").at(9), 7);
  EXPECT_EQ(BasicSequence::parse("affine:3,2").at(4), 14);
  EXPECT_EQ(BasicSequence::parse("tower2").at(2), 16);
  EXPECT_EQ(BasicSequence::parse("triangular").at(7), 8);
  EXPECT_EQ(BasicSequence::parse("list:2,3,5").at(3), 5);
  EXPECT_EQ(BasicSequence::parse("derived:isqrt_plus2").at(16), 6);
  EXPECT_EQ(BasicSequence::parse("derived:log2_plus2").at(8), 5);
  EXPECT_THROW(BasicSequence::parse("list:2,3").at(3), Error);
  EXPECT_THROW(BasicSequence::parse("fibonacci"), Error);
  EXPECT_THROW(BasicSequence::parse("affine:1"), Error);
  EXPECT_THROW(BasicSequence::parse("derived:unknown"), Error);
  for (const char* rule : {"constant:2", "affine:1,1", "tower2", "triangular", "list:2,3,5", "derived:isqrt_plus2"}) {
    EXPECT_EQ(BasicSequence::parse(rule).to_string(), rule);
  }
}

TEST(BasicSequence, ListFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "cantor_list_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "q.csv");
    out << "# radices\n3\n4\n\n5\n";
  }
  const auto q = BasicSequence::parse("list:@q.csv", dir);
  EXPECT_EQ(q.prefix(3), (std::vector<BigInt>{3, 4, 5}));
  EXPECT_EQ(q.defined_length(), 3u);
  EXPECT_THROW(BasicSequence::parse("list:@missing.csv", dir), Error);
}

TEST(BasicSequence, PartialProductExamples) {
  EXPECT_EQ(partial_product(BasicSequence::constant(2), 0), 1);
  EXPECT_EQ(partial_product(BasicSequence::constant(3), 4), 81);
  EXPECT_EQ(partial_product(BasicSequence::triangular(), 3), 32);
}

TEST(BasicSequence, QnkExamples) {
  EXPECT_EQ(qnk(BasicSequence::constant(2), 3, 1), Rational(3, 2));
  EXPECT_EQ(qnk(BasicSequence::triangular(), 3, 1), 1);
  EXPECT_EQ(qnk(BasicSequence::constant(2), 2, 2), Rational(1, 2));
}

TEST(BasicSequence, DivergenceReportExamples) {
  EXPECT_EQ(divergence_report(BasicSequence::constant(2), 1, 3).qnk_values,
            (std::vector<Rational>{Rational(1, 2), 1, Rational(3, 2)}));
  EXPECT_EQ(divergence_report(BasicSequence::affine(1, 1), 1, 3).qnk_values,
            (std::vector<Rational>{Rational(1, 2), Rational(5, 6), Rational(13, 12)}));
  EXPECT_EQ(divergence_report(BasicSequence::tower(), 1, 2).qnk_values,
            (std::vector<Rational>{Rational(1, 4), Rational(5, 16)}));
  const auto rep = divergence_report(BasicSequence::affine(1, 1), 1, 10);
  EXPECT_EQ(rep.window_start, 6u);
  EXPECT_EQ(rep.window_min, 7);
}

TEST(BasicSequence, DensityOfDisagreementExamples) {
  EXPECT_EQ(density_of_disagreement(BasicSequence::constant(2), BasicSequence::constant(2), 100), 0);
  EXPECT_EQ(density_of_disagreement(BasicSequence::constant(2), BasicSequence::constant(3), 100), 1);
  EXPECT_EQ(density_of_disagreement(BasicSequence::constant(2), BasicSequence::list({2, 5, 2, 2}), 4),
            Rational(1, 4));
}

namespace {

std::vector<BasicSequence> families() {
  return {BasicSequence::constant(2),   BasicSequence::constant(7),        BasicSequence::affine(1, 1),
          BasicSequence::affine(3, 2),  BasicSequence::triangular(),       BasicSequence::tower(),
          BasicSequence::parse("derived:isqrt_plus2"), BasicSequence::parse("derived:log2_plus2"),
          BasicSequence::list({2, 9, 3, 3, 17, 2, 5, 4, 4, 11, 2, 3, 6, 8, 2, 2, 2, 30, 5, 3, 2, 2, 7, 9, 10, 4,
                               3, 2, 5, 6, 7, 8, 9, 2, 3, 4, 5, 6, 7, 8, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4, 4,
                               4, 4, 5, 5, 5, 5, 5})};
}

// Definition-level oracle: a running sum of 1/(q_j ... q_{j+k-1}) one term at a time.
Rational qnk_oracle(const BasicSequence& q, std::uint64_t n, std::uint64_t k) {
  Rational s = 0;
  for (std::uint64_t j = 1; j <= n; ++j) {
    BigInt den = 1;
    for (std::uint64_t i = j; i < j + k; ++i) den *= q.at(i);
    s += Rational(1, den);
  }
  return s;
}

}  // namespace

TEST(BasicSequenceProperty, TermsAtLeastTwoAndProductsChain) {
  for (const auto& q : families()) {
    const std::uint64_t len = std::min<std::uint64_t>(q.defined_length(), q.to_string() == "tower2" ? 12 : 50);
    BigInt prev = partial_product(q, 0);
    for (std::uint64_t n = 1; n <= len; ++n) {
      ASSERT_GE(q.at(n), 2);
      const BigInt next = partial_product(q, n);
      EXPECT_EQ(next, prev * q.at(n)) << q.to_string() << " n=" << n;
      prev = next;
    }
  }
}

TEST(BasicSequenceProperty, QnkMatchesOracleAndIsMonotone) {
  for (const auto& q : families()) {
    const bool tower = q.to_string() == "tower2";
    for (std::uint64_t k = 1; k <= 3; ++k) {
      const std::uint64_t limit = std::min<std::uint64_t>(tower ? 8 : 50, q.defined_length() - k + 1);
      Rational prev = 0;
      for (std::uint64_t n = 1; n <= limit; ++n) {
        const Rational v = qnk(q, n, k);
        EXPECT_EQ(v, qnk_oracle(q, n, k)) << q.to_string() << " n=" << n << " k=" << k;
        EXPECT_GT(v, prev);
        if (n + k <= q.defined_length()) {
          EXPECT_GE(v, qnk(q, n, k + 1));
        }
        prev = v;
      }
    }
  }
}
