#include <doctest.h>

#include "nnls/dynamics.hpp"
#include "nnls/linops.hpp"
#include "nnls/solitons.hpp"
#include "support.hpp"

using namespace nnls;
using namespace nnls::test;

TEST_CASE("ground state values and ODE") {
  const Grid g = default_grid();
  const Field q = ground_state(1.0, g);
  CHECK(std::abs(q[512] - std::sqrt(2.0)) < 1e-15);  // x = 0 sits at index n/2
  CHECK(ground_state_value(1.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  for (std::size_t j = 0; j < q.size(); ++j) {
    CHECK(q[j].imag() == 0.0);
    CHECK(q[j].real() > 0.0);
  }
  CHECK(sup(q - reflect(q)) < 1e-14);
  Field res = -derivative(q, 2) + q;
  for (std::size_t j = 0; j < q.size(); ++j) res[j] -= q[j] * q[j] * q[j];
  CHECK(sup(res) < 1e-8);
  CHECK_THROWS_AS(ground_state(0.0, g), ConfigError);
  CHECK_THROWS_AS(ground_state(-1.0, g), ConfigError);
}

TEST_CASE("ground state against the sech closed form and scaling") {
  const Grid g = default_grid();
  const Field q = ground_state(1.0, g);
  const auto x = g.points();
  for (std::size_t j = 0; j < q.size(); j += 7) CHECK(std::abs(q[j].real() - q_exact(x[j])) < 1e-8);
  for (double a : {0.7, 1.3, 2.0}) {
    for (double xx : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
      CHECK(std::abs(ground_state_value(a, xx) - a * ground_state_value(1.0, a * xx)) < 1e-12);
    }
  }
  CHECK(std::abs(ground_state_value(2.0, 0.8) - 2.0 * ground_state_value(1.0, 1.6)) < 1e-12);
}

TEST_CASE("alpha derivatives match finite differences in alpha") {
  for (double a : {0.9, 1.0, 1.05}) {
    for (double x : {-2.0, -0.5, 0.0, 0.3, 1.7, 4.0}) {
      const double h = 1e-4;
      const double fd1 = (ground_state_value(a + h, x) - ground_state_value(a - h, x)) / (2 * h);
      const double fd2 = (ground_state_value(a + h, x) - 2 * ground_state_value(a, x) + ground_state_value(a - h, x)) /
                         (h * h);
      CHECK(std::abs(ground_state_alpha_derivative(a, x, 1) - fd1) < 1e-7);
      CHECK(std::abs(ground_state_alpha_derivative(a, x, 2) - fd2) < 1e-5);
    }
  }
  CHECK_THROWS_AS(ground_state_alpha_derivative(1.0, 0.0, 3), ConfigError);
}

TEST_CASE("standing wave") {
  const Grid g = default_grid();
  const Field q = ground_state(1.0, g);
  CHECK(sup(standing_wave(1.0, 0.0, g) - q) == 0.0);
  CHECK(sup(standing_wave(1.0, std::numbers::pi, g) + q) < 1e-14);
  // i u_t - u_xx - u^2 u* with u_t = -i a^2 u
  for (double a : {1.0, 1.2}) {
    const double t = 0.37;
    const Field u = standing_wave(a, t, g);
    Field r = (a * a) * u - derivative(u, 2) - nonlinearity(u, true);
    CHECK(sup(r) < 1e-8);
  }
}

TEST_CASE("two-parameter soliton") {
  const Grid g = default_grid();
  CHECK(std::abs(two_param_soliton_value(1.0, 0.9, 0.0, 0.0) - std::sqrt(2.0) * 1.9 / 2.0) < 1e-14);
  CHECK(std::abs(two_param_soliton_value(1.0, 0.9, 0.0, 0.0) - 1.34350) < 1e-5);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ut(-10.0, 10.0), ux(-15.0, 15.0), ua(0.5, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double a = ua(rng), t = ut(rng), x = ux(rng);
    const cplx expected = std::polar(1.0, -t * a * a) * ground_state_value(a, x);
    CHECK(std::abs(two_param_soliton_value(a, a, t, x) - expected) < 1e-12);
  }
  CHECK(sup(two_param_soliton(1.0, 1.0, 2.3, g) - standing_wave(1.0, 2.3, g)) < 1e-12);

  // residual of the equation with the analytic time derivative
  const double T = *blowup_time(1.0, 0.9);
  for (double t : {0.0, 0.25 * T, 0.5 * T, -0.3 * T}) {
    const Field u = two_param_soliton(1.0, 0.9, t, g);
    const cplx I(0.0, 1.0);
    const Field r = I * two_param_soliton_dt(1.0, 0.9, t, g) - derivative(u, 2) - nonlinearity(u, true);
    CHECK(sup(r) < 1e-7);
  }
  // the analytic time derivative against a central difference
  const double h = 1e-5, t0 = 3.0;
  const Field fd = (1.0 / (2 * h)) * (two_param_soliton(1.0, 0.9, t0 + h, g) - two_param_soliton(1.0, 0.9, t0 - h, g));
  CHECK(sup(fd - two_param_soliton_dt(1.0, 0.9, t0, g)) < 1e-8);

  // norm inflation approaching blow-up
  CHECK(norm_lp(two_param_soliton(1.0, 0.9, 0.95 * T, g), 2.0) > norm_lp(two_param_soliton(1.0, 0.9, 0.0, g), 2.0));
  // the pole sits at x = 0 when t = T
  CHECK_THROWS_AS(two_param_soliton_value(1.0, 0.9, T, 0.0), SingularEvaluation);
  CHECK_THROWS_AS(two_param_soliton(0.0, 0.9, 0.0, g), ConfigError);
}

TEST_CASE("blow-up time") {
  CHECK(*blowup_time(1.0, 0.9) == doctest::Approx(16.53469).epsilon(1e-6));
  CHECK(*blowup_time(1.0, 0.9) == *blowup_time(0.9, 1.0));
  CHECK(*blowup_time(1.0, 0.99) == doctest::Approx(std::numbers::pi / 0.0199).epsilon(1e-12));
  CHECK_FALSE(blowup_time(1.0, 1.0).has_value());
}

TEST_CASE("root-space profiles") {
  const Grid g = default_grid();
  const QProfiles& p = q_profiles(g);
  CHECK(&p == &q_profiles(Grid(1024, 40.0)));  // cached per grid
  CHECK(std::abs(p.q_prime[512] - std::sqrt(2.0)) < 1e-14);
  CHECK(sup(p.q_prime - q_prime(g)) == 0.0);
  // Q' = (1 + x dx) Q against the sech closed form: sqrt2 sech x (1 - x tanh x)
  // sampled profiles are periodic image sums; the nearest images suffice at 1e-14
  const auto x = g.points();
  const double L = g.length();
  auto images = [L](auto f, double y) { return f(y) + f(y - L) + f(y + L); };
  auto qp = [](double y) { return q_exact(y) * (1.0 - y * std::tanh(y)); };
  auto dq = [](double y) { return -q_exact(y) * std::tanh(y); };
  auto xq = [](double y) { return y * q_exact(y); };
  for (std::size_t j = 0; j < p.q.size(); j += 5) {
    CHECK(std::abs(p.q_prime[j].real() - images(qp, x[j])) < 1e-14);
    CHECK(std::abs(p.dx_q[j].real() - images(dq, x[j])) < 1e-14);
    CHECK(std::abs(p.x_q[j].real() - images(xq, x[j])) < 1e-13);
    // and the unperiodized closed form away from the box edge
    if (std::abs(x[j]) < 10.0) CHECK(std::abs(p.x_q[j].real() - xq(x[j])) < 1e-10);
  }
  // the spectral derivative of Q reproduces dx Q
  CHECK(sup(derivative(p.q, 1) - p.dx_q) < 1e-10);
  CHECK(sup(p.q - reflect(p.q)) < 1e-14);
  CHECK(sup(p.q_prime - reflect(p.q_prime)) < 1e-14);
  CHECK(sup(p.dx_q + reflect(p.dx_q)) < 1e-14);
  CHECK(sup(p.x_q + reflect(p.x_q)) < 1e-14);
  CHECK(sup(apply(OperatorKind::L_plus, p.q_prime) + 2.0 * p.q) < 1e-7);
  CHECK(std::abs(semi_inner(p.q, p.q_prime) - 2.0) < 1e-8);
}
