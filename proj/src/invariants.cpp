#include "nnls/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "nnls/solitons.hpp"

namespace nnls {

cplx quasipower(const Field& u) {
  const Field us = reflect_conjugate(u);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += u[j] * us[j];
  return 0.5 * acc * u.grid().spacing();
}

cplx hamiltonian(const Field& u) {
  const Field du = derivative(u, 1);
  const Field du_star = reflect_conjugate(du);
  const Field us = reflect_conjugate(u);
  cplx kinetic = 0.0, potential = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    kinetic += du[j] * du_star[j];
    const cplx p = u[j] * us[j];
    potential += p * p;
  }
  const double dx = u.grid().spacing();
  return -0.5 * kinetic * dx - 0.25 * potential * dx;
}

InvariantReport invariants(const Field& u, double time) { return {quasipower(u), hamiltonian(u), time}; }

double symplectic(const Field& f, const Field& g) {
  f.require_same_grid(g);
  const Field fs = reflect_conjugate(f);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += fs[j] * g[j];
  return (acc * f.grid().spacing()).imag();
}

double symplectic_nls(const Field& f, const Field& g) {
  f.require_same_grid(g);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += std::conj(f[j]) * g[j];
  return (acc * f.grid().spacing()).imag();
}

DistanceToQ distance_to_q(const Field& u) {
  const Field& q = q_profiles(u.grid()).q;
  // ||u - e^{ib} Q||^2 = |u|^2 + |Q|^2 - 2 Re(e^{-ib} (u, Q)), minimised at b = arg (u, Q).
  // The norm is then evaluated directly; expanding the square cancels badly near Q.
  const cplx uq = inner_hs(u, q, 1.0);
  const double phase = std::abs(uq) > 0.0 ? std::arg(uq) : 0.0;
  return {norm_hs(u - std::polar(1.0, phase) * q, 1.0), phase};
}

}  // namespace nnls
