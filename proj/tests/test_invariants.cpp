#include <doctest.h>

#include "nnls/dynamics.hpp"
#include "nnls/invariants.hpp"
#include "nnls/solitons.hpp"
#include "support.hpp"

using namespace nnls;
using namespace nnls::test;

namespace {
const cplx I(0.0, 1.0);
}

TEST_CASE("quadrature oracles for the sech integrals") {
  const Grid g = default_grid();
  const Field q = ground_state(1.0, g);
  const Field qx = derivative(q, 1);
  double q2 = 0.0, qx2 = 0.0, q4 = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    q2 += std::norm(q[j]);
    qx2 += std::norm(qx[j]);
    q4 += std::norm(q[j]) * std::norm(q[j]);
  }
  q2 *= g.spacing();
  qx2 *= g.spacing();
  q4 *= g.spacing();
  CHECK(q2 == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(qx2 == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(q4 == doctest::Approx(16.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("quasipower") {
  const Grid g = default_grid();
  const QProfiles& p = q_profiles(g);
  CHECK(std::abs(quasipower(p.q) - 2.0) < 1e-8);
  for (double phi : {0.3, 1.0, 2.5}) {
    CHECK(std::abs(quasipower(std::polar(1.0, phi) * p.q) - 2.0) < 1e-8);
  }
  // i dxQ pairs with -i(-dxQ): M = -1/2 int (dxQ)^2 = -2/3
  const cplx m = quasipower(I * p.dx_q);
  CHECK(std::abs(m.imag()) < 1e-14);
  CHECK(m.real() == doctest::Approx(-2.0 / 3.0).epsilon(1e-9));

  std::mt19937_64 rng(23);
  for (int r = 0; r < 10; ++r) {
    const Field f = random_field(g, rng);
    const cplx m0 = quasipower(f);
    CHECK(std::abs(quasipower(std::polar(1.0, 0.77) * f) - m0) < 1e-12 * (1.0 + std::abs(m0)));
  }
}

TEST_CASE("hamiltonian") {
  const Grid g = default_grid();
  const QProfiles& p = q_profiles(g);
  // conserved pairing: -1/2 int u_x conj(u_x(-x)) - 1/4 int u^2 (u*)^2; for real even Q
  // u_x(-x) = -u_x(x), so the kinetic term is +1/2 int Q_x^2 = 2/3 and H(Q) = 2/3 - 4/3
  CHECK(std::abs(hamiltonian(p.q) + 2.0 / 3.0) < 1e-8);
  CHECK(std::abs(hamiltonian(Field(g))) == 0.0);
}

TEST_CASE("symplectic forms") {
  const Grid g = default_grid();
  const QProfiles& p = q_profiles(g);
  CHECK(symplectic(p.q, I * p.q) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(symplectic_nls(p.q, I * p.q) == doctest::Approx(4.0).epsilon(1e-9));
  std::mt19937_64 rng(29);
  for (int r = 0; r < 10; ++r) {
    Field f = random_field(g, rng);
    const Field h = random_field(g, rng);
    CHECK(std::abs(symplectic(p.q, h) - symplectic_nls(p.q, h)) < 1e-12);
    Field re(g);
    for (std::size_t j = 0; j < f.size(); ++j) re[j] = f[j].real();
    CHECK(std::abs(symplectic(re, re)) < 1e-14);
    // bilinearity over reals
    const double a = 0.3, b = -1.7;
    CHECK(std::abs(symplectic(a * f + b * h, p.q) - (a * symplectic(f, p.q) + b * symplectic(h, p.q))) < 1e-12);
    // antisymmetry on PT-symmetric fields: even real part plus odd imaginary part
    auto pt = [&](const Field& x) { return 0.5 * (x + reflect_conjugate(x)); };
    const Field s1 = pt(f), s2 = pt(h);
    CHECK(std::abs(symplectic(s1, s2) + symplectic(s2, s1)) < 1e-12);
    CHECK(std::abs(symplectic_nls(s1, s2) + symplectic_nls(s2, s1)) < 1e-12);
  }
}

TEST_CASE("distance to the Q orbit") {
  const Grid g = default_grid();
  const QProfiles& p = q_profiles(g);
  CHECK(distance_to_q(p.q).distance < 1e-12);
  CHECK(std::abs(distance_to_q(p.q).phase) < 1e-14);
  const DistanceToQ d = distance_to_q(std::polar(1.0, 0.7) * p.q);
  CHECK(d.distance < 1e-6);  // sqrt of a cancellation at 1e-12 level
  CHECK(d.phase == doctest::Approx(0.7).epsilon(1e-12));

  // brute force over a beta grid of 1e5 points using precomputed H1 pairings
  std::mt19937_64 rng(31);
  auto check_against_grid = [&](const Field& u) {
    const double uu = std::pow(norm_hs(u, 1.0), 2), qq = std::pow(norm_hs(p.q, 1.0), 2);
    const cplx uq = inner_hs(u, p.q, 1.0);
    const int m = 100000;
    const double h = 2.0 * std::numbers::pi / m;
    auto d2 = [&](double b) { return uu + qq - 2.0 * (std::polar(1.0, -b) * uq).real(); };
    int arg = 0;
    for (int i = 1; i < m; ++i) {
      if (d2(-std::numbers::pi + h * i) < d2(-std::numbers::pi + h * arg)) arg = i;
    }
    // parabola through the best grid point and its neighbours
    const double b0 = -std::numbers::pi + h * arg;
    const double fm = d2(b0 - h), f0 = d2(b0), fp = d2(b0 + h);
    const double best = f0 - 0.125 * (fp - fm) * (fp - fm) / (fp - 2.0 * f0 + fm);
    const double bf = std::sqrt(std::max(best, 0.0));
    CHECK(std::abs(distance_to_q(u).distance - bf) < 1e-8);
    // direct evaluation at the returned phase
    CHECK(std::abs(norm_hs(u - std::polar(1.0, distance_to_q(u).phase) * p.q, 1.0) - distance_to_q(u).distance) <
          1e-10);
  };
  check_against_grid(p.q + 0.01 * (I * p.q));
  for (int r = 0; r < 50; ++r) check_against_grid(p.q + 0.05 * random_field(g, rng));
}
