#pragma once

#include "nnls/field.hpp"

namespace nnls {

struct InvariantReport {
  cplx quasipower;
  cplx hamiltonian;
  double time = 0.0;
};

/// M[u] = 1/2 int u u* dx with u* the reflected conjugate. Complex in general.
cplx quasipower(const Field& u);

/// H[u] = -1/2 int dx(u) (dx u)* dx - 1/4 int u^2 (u*)^2 dx.
///
/// The kinetic pairing reflects-and-conjugates the derivative, (dx u)*(x) =
/// conj(u_x(-x)); this is the form conserved by the flow. H[Q] = -2/3.
cplx hamiltonian(const Field& u);

InvariantReport invariants(const Field& u, double time);

/// omega(f, g) = Im int f*(x) g(x) dx (reflected conjugate in the first slot).
double symplectic(const Field& f, const Field& g);
/// omega_NLS(f, g) = Im int conj(f) g dx.
double symplectic_nls(const Field& f, const Field& g);

struct DistanceToQ {
  double distance = 0.0;
  double phase = 0.0;  // minimising beta in (-pi, pi]
};

/// inf_beta ||u - e^{i beta} Q||_{H^1}, closed-form minimisation over beta.
DistanceToQ distance_to_q(const Field& u);

}  // namespace nnls
