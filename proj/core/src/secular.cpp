#include "gapgraph/secular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "gapgraph/error.hpp"

namespace gapgraph {

double star_secular_determinant(std::span<const double> lengths, double k) {
  double total = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    double term = std::sin(k * lengths[i]);
    for (std::size_t j = 0; j < lengths.size(); ++j)
      if (j != i) term *= std::cos(k * lengths[j]);
    total += term;
  }
  return total;
}

SecularRoot star_secular_root(std::span<const double> lengths) {
  if (lengths.empty()) throw Error(ErrorCode::BracketingFailure, "star has no edges");
  for (double l : lengths)
    if (!(l > 0.0)) throw Error(ErrorCode::BracketingFailure, "edge lengths must be positive");

  const double lmax = *std::max_element(lengths.begin(), lengths.end());
  const double p1 = std::numbers::pi / (2.0 * lmax);
  int shared = 0;
  for (double l : lengths)
    if (std::abs(l - lmax) <= 1e-12 * lmax) ++shared;
  if (shared >= 2) return {p1, true, shared - 1};

  double p2 = 3.0 * p1;
  for (double l : lengths) {
    const double first = std::numbers::pi / (2.0 * l);
    if (first > p1 * (1 + 1e-12)) p2 = std::min(p2, first);
  }

  auto f = [&](double k) {
    double s = 0.0;
    for (double l : lengths) s += std::tan(k * l);
    return s;
  };
  const double delta = 1e-10 * (p2 - p1);
  double lo = p1 + delta, hi = p2 - delta;
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) throw Error(ErrorCode::BracketingFailure, "no sign change between poles");
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  if (iters >= 200) throw Error(ErrorCode::BracketingFailure, "root search did not converge");
  return {0.5 * (a + b), false, 1};
}

}  // namespace gapgraph
