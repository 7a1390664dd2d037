#include "nnls/solitons.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace nnls {

namespace {

void require_positive(double alpha, const char* name) {
  if (!(alpha > 0.0)) throw ConfigError(std::string(name) + " must be positive");
}

// Periodic image sum sum_m f(x + m L). A profile decaying like e^{-rate |x|} has
// images below e^{-40} of its peak once |m| L - L/2 exceeds 40 / rate, so the
// sampled field is smooth across the box edge instead of kinked there.
Field periodized(const Grid& grid, double rate, const std::function<cplx(double)>& f) {
  const double L = grid.length();
  const int images = static_cast<int>(std::ceil((40.0 / rate + 0.5 * L) / L));
  return Field::from_function(grid, [&](double x) {
    cplx sum = f(x);
    for (int m = 1; m <= images; ++m) sum += f(x + m * L) + f(x - m * L);
    return sum;
  });
}

}  // namespace

double ground_state_value(double alpha, double x) {
  return std::numbers::sqrt2 * alpha / std::cosh(alpha * x);
}

double ground_state_alpha_derivative(double alpha, double x, int order) {
  const double s = 1.0 / std::cosh(alpha * x);
  const double t = std::tanh(alpha * x);
  switch (order) {
    case 0:
      return std::numbers::sqrt2 * alpha * s;
    case 1:
      return std::numbers::sqrt2 * s * (1.0 - alpha * x * t);
    case 2:
      return std::numbers::sqrt2 * s * (-2.0 * x * t + alpha * x * x * (t * t - s * s));
    default:
      throw ConfigError("alpha derivative order must be 0, 1 or 2");
  }
}

Field ground_state(double alpha, const Grid& grid) {
  require_positive(alpha, "alpha");
  return periodized(grid, alpha, [alpha](double x) { return cplx(ground_state_value(alpha, x)); });
}

Field ground_state_dalpha(double alpha, const Grid& grid) {
  require_positive(alpha, "alpha");
  return periodized(grid, alpha, [alpha](double x) { return cplx(ground_state_alpha_derivative(alpha, x, 1)); });
}

Field ground_state_d2alpha(double alpha, const Grid& grid) {
  require_positive(alpha, "alpha");
  return periodized(grid, alpha, [alpha](double x) { return cplx(ground_state_alpha_derivative(alpha, x, 2)); });
}

Field standing_wave(double alpha, double t, const Grid& grid) {
  return std::polar(1.0, -t * alpha * alpha) * ground_state(alpha, grid);
}

cplx two_param_soliton_value(double alpha, double beta, double t, double x) {
  const cplx denom = std::exp(cplx(alpha * x, alpha * alpha * t)) + std::exp(cplx(-beta * x, beta * beta * t));
  if (std::abs(denom) < 1e-12) {
    throw SingularEvaluation("two-parameter soliton is singular at t=" + std::to_string(t) +
                             ", x=" + std::to_string(x));
  }
  return std::numbers::sqrt2 * (alpha + beta) / denom;
}

Field two_param_soliton(double alpha, double beta, double t, const Grid& grid) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  return periodized(grid, std::min(alpha, beta), [=](double x) { return two_param_soliton_value(alpha, beta, t, x); });
}

Field two_param_soliton_dt(double alpha, double beta, double t, const Grid& grid) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  return periodized(grid, std::min(alpha, beta), [=](double x) {
    const cplx ea = std::exp(cplx(alpha * x, alpha * alpha * t));
    const cplx eb = std::exp(cplx(-beta * x, beta * beta * t));
    const cplx d = ea + eb;
    const cplx d_t = cplx(0.0, alpha * alpha) * ea + cplx(0.0, beta * beta) * eb;
    return -std::numbers::sqrt2 * (alpha + beta) * d_t / (d * d);
  });
}

std::optional<double> blowup_time(double alpha, double beta) {
  const double gap = std::abs(alpha * alpha - beta * beta);
  if (gap == 0.0) return std::nullopt;
  return std::numbers::pi / gap;
}

Field q_prime(const Grid& grid) { return ground_state_dalpha(1.0, grid); }

const QProfiles& q_profiles(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::unique_ptr<QProfiles>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{grid.size(), grid.length()}];
  if (!slot) {
    Field q = ground_state(1.0, grid);
    Field qp = ground_state_dalpha(1.0, grid);
    Field dq = periodized(grid, 1.0, [](double x) {
      return cplx(-std::numbers::sqrt2 * std::tanh(x) / std::cosh(x));
    });
    Field xq = periodized(grid, 1.0, [](double x) { return cplx(x * ground_state_value(1.0, x)); });
    slot = std::make_unique<QProfiles>(QProfiles{std::move(q), std::move(qp), std::move(dq), std::move(xq)});
  }
  return *slot;
}

}  // namespace nnls
