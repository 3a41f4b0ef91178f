#pragma once
// Helpers shared by the unit suites.

#include <algorithm>
#include <random>

#include "bopp/grid.hpp"
#include "doctest.h"

namespace testutil {

using namespace bopp;

// Code of the bopp::Error thrown by fn; fails the test when nothing is thrown.
template <typename F>
Errc error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a bopp::Error");
  return Errc::InvalidArgument;
}

// Sum of three random complex Gaussian bumps centred in [-1.5, 1.5]^d.
inline SampledField random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.5, 1.5), w(0.7, 1.4), ph(0.0, 2.0 * kPi);
  std::vector<std::vector<double>> centers(3);
  std::vector<double> widths(3);
  std::vector<cplx> amps(3);
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < g.dim; ++a) centers[b].push_back(c(rng));
    widths[b] = w(rng);
    amps[b] = std::polar(1.0, ph(rng));
  }
  return SampledField::sample(g, [&](const double* z) {
    cplx s = 0.0;
    for (int b = 0; b < 3; ++b) {
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) r2 += (z[a] - centers[b][a]) * (z[a] - centers[b][a]);
      s += amps[b] * std::exp(-r2 / (2.0 * widths[b] * widths[b]));
    }
    return s;
  });
}

inline SampledField gaussian(const GridSpec& g, double width = 1.0, cplx amp = 1.0) {
  return SampledField::sample(g, [&](const double* z) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += z[a] * z[a];
    return amp * std::exp(-r2 / (2.0 * width * width));
  });
}

inline double max_abs(const SampledField& U) {
  double m = 0.0;
  for (const auto& v : U.values) m = std::max(m, std::abs(v));
  return m;
}

// max |U - V| / max |V|
inline double rel_max(const SampledField& U, const SampledField& V) { return max_abs(U - V) / max_abs(V); }

inline RVec vec(std::initializer_list<double> xs) {
  RVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace testutil
