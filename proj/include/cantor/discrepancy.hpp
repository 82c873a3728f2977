#pragma once

// Extreme discrepancy D_N = sup_{0 <= a <= b <= 1} |A_N([a, b)) / N - (b - a)| of points in [0, 1).

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "cantor/error.hpp"
#include "cantor/orbit.hpp"
#include "cantor/rational.hpp"

namespace cantor {

namespace detail {

inline void require_unit_interval(std::span<const Rational> points) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "discrepancy of an empty sequence");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (sgn(points[i]) < 0 || points[i] >= 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "point " + std::to_string(i) + " = " + points[i].get_str() + " outside [0, 1)");
    }
  }
}

}  // namespace detail

/// D_N = 1/N + max_i (i/N - x_(i)) - min_i (i/N - x_(i)) over the sorted points.
inline Rational discrepancy_exact(std::span<const Rational> points) {
  detail::require_unit_interval(points);
  std::vector<const Rational*> sorted(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) sorted[i] = &points[i];
  std::sort(sorted.begin(), sorted.end(), [](const Rational* a, const Rational* b) { return *a < *b; });
  const BigInt n = big(points.size());
  Rational hi, lo;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    Rational d = Rational(big(i + 1), n) - *sorted[i];
    if (i == 0 || d > hi) hi = d;
    if (i == 0 || d < lo) lo = std::move(d);
  }
  Rational out = Rational(1, n) + hi - lo;
  out.canonicalize();
  return out;
}

namespace detail {

// Every extremal interval has endpoints in {0, 1} or at a sample value v, either including v
// (left end v, right end v+) or excluding it (left end v+, right end v). Points are integers
// on a common denominator `scale`.
template <typename Int>
Rational brute_on_grid(const std::vector<Int>& pts, const Int& scale) {
  std::vector<Int> vals(pts);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  const std::size_t n = pts.size();
  auto count_less = [&](const Int& v) {
    std::size_t c = 0;
    for (const auto& p : pts) c += p < v;
    return c;
  };
  auto count_leq = [&](const Int& v) {
    std::size_t c = 0;
    for (const auto& p : pts) c += p <= v;
    return c;
  };
  struct End {
    Int at;
    bool plus;        // the right-limit v+
    std::size_t below;  // number of points strictly left of this cut
  };
  std::vector<End> cuts;
  cuts.push_back({Int(0), false, 0});
  for (const auto& v : vals) {
    cuts.push_back({v, false, count_less(v)});
    cuts.push_back({v, true, count_leq(v)});
  }
  cuts.push_back({scale, false, n});
  Int best = 0;
  const Int nn = static_cast<Int>(n);
  for (const auto& a : cuts) {
    for (const auto& b : cuts) {
      if (b.at < a.at) continue;
      if (b.at == a.at && a.plus && !b.plus) continue;  // [v+, v) is not an interval
      const Int count = b.below >= a.below ? static_cast<Int>(b.below - a.below) : Int(0);
      Int diff = count * scale - nn * (b.at - a.at);
      if (diff < 0) diff = -diff;
      if (diff > best) best = diff;
    }
  }
  return make_rational(BigInt(best), BigInt(nn * scale));
}

}  // namespace detail

/// Definition-level enumeration of all candidate intervals. Oracle for discrepancy_exact.
inline Rational discrepancy_brute(std::span<const Rational> points) {
  detail::require_unit_interval(points);
  if (points.size() > 2000) throw Error(ErrorCode::InvalidArgument, "discrepancy_brute is limited to N <= 2000");
  BigInt scale = 1;
  for (const auto& p : points) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), p.get_den().get_mpz_t());
  std::vector<BigInt> grid;
  grid.reserve(points.size());
  for (const auto& p : points) grid.push_back(p.get_num() * (scale / p.get_den()));
  if (mpz_sizeinbase(scale.get_mpz_t(), 2) < 40) {
    std::vector<long> small;
    for (const auto& g : grid) small.push_back(g.get_si());
    return detail::brute_on_grid<long>(small, scale.get_si());
  }
  return detail::brute_on_grid<BigInt>(grid, scale);
}

/// Exact discrepancy of the first `count` orbit points T_0, ..., T_{count-1}.
inline Rational discrepancy_exact(const StreamOrbit& orbit, std::size_t count) {
  if (count == 0 || count > orbit.size()) throw Error(ErrorCode::InvalidArgument, "bad orbit prefix length");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return orbit.compare(a, b) < 0; });
  // Locate the extremes of i/N - x_(i) with doubles, then settle every near-tie exactly.
  const double inv = 1.0 / static_cast<double>(count);
  std::vector<double> d(count);
  for (std::size_t i = 0; i < count; ++i) d[i] = static_cast<double>(i + 1) * inv - orbit.approx(order[i]);
  const double dmax = *std::max_element(d.begin(), d.end());
  const double dmin = *std::min_element(d.begin(), d.end());
  const double slack = 4 * StreamOrbit::kApproxError + 1e-15;
  const BigInt n = big(count);
  auto settle = [&](bool want_max) {
    Rational best;
    bool have = false;
    for (std::size_t i = 0; i < count; ++i) {
      if (want_max ? d[i] < dmax - slack : d[i] > dmin + slack) continue;
      Rational v = Rational(big(i + 1), n) - orbit.exact(order[i]);
      if (!have || (want_max ? v > best : v < best)) best = std::move(v);
      have = true;
    }
    return best;
  };
  Rational out = Rational(1, n) + settle(true) - settle(false);
  out.canonicalize();
  return out;
}

inline Rational discrepancy_exact(const StreamOrbit& orbit) { return discrepancy_exact(orbit, orbit.size()); }

struct PerturbationCheck {
  Rational lhs;  // |D_N(X) - D_N(Y)|
  Rational rhs;  // 2 eps + #{n : |x_n - y_n| > eps} / N
  bool holds = false;
};

inline PerturbationCheck perturbation_bound_check(std::span<const Rational> xs, std::span<const Rational> ys,
                                                  const Rational& eps) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "perturbation check needs equal lengths");
  if (sgn(eps) < 0) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");
  PerturbationCheck c;
  c.lhs = abs_of(discrepancy_exact(xs) - discrepancy_exact(ys));
  std::size_t exceed = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) exceed += abs_of(xs[i] - ys[i]) > eps;
  c.rhs = 2 * eps + make_rational(big(exceed), big(xs.size()));
  c.holds = c.lhs <= c.rhs;
  return c;
}

}  // namespace cantor
