#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "nnls/field.hpp"

namespace nnls::test {

inline Grid default_grid() { return Grid(1024, 40.0); }

inline double sup(const Field& f) { return norm_lp(f, INFINITY); }

// Independent closed forms used as oracles.
inline double sech(double x) { return 1.0 / std::cosh(x); }
inline double q_exact(double x) { return std::numbers::sqrt2 * sech(x); }

// Smooth random field built from Gaussian bumps.
inline Field random_field(const Grid& g, std::mt19937_64& rng, double spread = 5.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  const auto x = g.points();
  for (int k = 0; k < 5; ++k) {
    const cplx c(u(rng), u(rng));
    const double x0 = spread * u(rng);
    const double w = 1.0 + 0.5 * u(rng);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] += c * std::exp(-(x[j] - x0) * (x[j] - x0) / (w * w));
  }
  return f;
}

}  // namespace nnls::test
