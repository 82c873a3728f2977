#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "cantor/digit_stream.hpp"
#include "cantor/rational.hpp"

namespace cantor::detail {

enum class TailOrder {
  Less,
  Equal,
  Greater,
  GreaterOrEqual,  // alpha * t >= p, equality not decidable from the prefix
  Unknown,
};

/// Read-only view of a digit prefix used to compare mixed-radix tails against thresholds.
class TailCursor {
 public:
  TailCursor(std::span<const BigInt> digits, std::span<const BigInt> radices, Tail tail)
      : digits_(digits), radices_(radices), tail_(tail), next_nonzero_(digits.size() + 1) {
    next_nonzero_[digits.size()] = digits.size();
    for (std::size_t i = digits.size(); i-- > 0;) {
      next_nonzero_[i] = sgn(digits[i]) != 0 ? i : next_nonzero_[i + 1];
    }
  }

  std::size_t size() const { return digits_.size(); }
  Tail tail() const { return tail_; }

  /// Compares alpha * t with p, where alpha > 0 and
  /// t = sum_{j >= start} E_j / (q_start ... q_j) over 0-based positions.
  /// The state p stays in (0, alpha) between digits.
  TailOrder compare(std::size_t start, const BigInt& alpha, BigInt p) const {
    assert(sgn(alpha) > 0);
    for (std::size_t j = start;; ++j) {
      if (sgn(p) < 0) return TailOrder::Greater;
      if (p >= alpha) return TailOrder::Less;  // t < 1
      if (sgn(p) == 0) {
        if (next_nonzero_[j] < digits_.size()) return TailOrder::Greater;
        return tail_ == Tail::Zero ? TailOrder::Equal : TailOrder::GreaterOrEqual;
      }
      if (j == digits_.size()) return tail_ == Tail::Zero ? TailOrder::Less : TailOrder::Unknown;
      p *= radices_[j];
      p -= alpha * digits_[j];
    }
  }

 private:
  std::span<const BigInt> digits_;
  std::span<const BigInt> radices_;
  Tail tail_;
  std::vector<std::size_t> next_nonzero_;
};

/// floor((z + alpha * t) / beta) for the tail t starting at `start`, or nothing when the
/// prefix does not pin it down. beta > 0; alpha may have either sign.
inline std::optional<BigInt> certified_floor(const TailCursor& cur, std::size_t start, const BigInt& z,
                                             const BigInt& alpha, const BigInt& beta) {
  BigInt k = floor_div(z, beta);
  if (sgn(alpha) == 0) return k;
  if (sgn(alpha) > 0) {
    // Largest k with alpha * t >= k * beta - z.
    while (true) {
      BigInt p = (k + 1) * beta - z;
      if (p >= alpha) return k;
      switch (cur.compare(start, alpha, p)) {
        case TailOrder::Greater:
        case TailOrder::Equal:
        case TailOrder::GreaterOrEqual:
          ++k;
          break;
        case TailOrder::Less:
          return k;
        case TailOrder::Unknown:
          return std::nullopt;
      }
    }
  }
  const BigInt mag = -alpha;
  // Largest k with |alpha| * t <= z - k * beta.
  while (true) {
    BigInt p = z - k * beta;
    if (p >= mag) return k;
    switch (cur.compare(start, mag, p)) {
      case TailOrder::Less:
      case TailOrder::Equal:
        return k;
      case TailOrder::Greater:
        --k;
        break;
      case TailOrder::GreaterOrEqual:
      case TailOrder::Unknown:
        return std::nullopt;
    }
  }
}

}  // namespace cantor::detail
