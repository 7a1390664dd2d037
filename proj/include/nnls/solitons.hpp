#pragma once

// Closed-form solutions of i u_t - u_xx = u^2 u*(x), with u*(x) = conj(u(-x)).
//
//   Q_a(x)        = 2 sqrt(2) a / (e^{a x} + e^{-a x})          ground state
//   u_a(t, x)     = e^{-i t a^2} Q_a(x)                          standing wave
//   u_{a,b}(t, x) = sqrt(2)(a + b) / (e^{i a^2 t + a x} + e^{i b^2 t - b x})
//
// Grid samplers return the periodic image sum sum_m f(x + m L) of the closed
// form, the smooth periodic representative of a line profile on the box; the
// scalar *_value functions are the bare closed forms.
//
// Q means Q_1. Q' is the dilation derivative d/da Q_a at a = 1, never the
// spatial derivative, which is spelled dQ / "dx_Q" throughout.

#include <optional>

#include "nnls/field.hpp"

namespace nnls {

struct SolitonParams {
  double alpha = 1.0;
  double beta = 1.0;
};

double ground_state_value(double alpha, double x);
/// d^order/d alpha^order Q_alpha(x) for order in {0, 1, 2}, in closed form.
double ground_state_alpha_derivative(double alpha, double x, int order);

Field ground_state(double alpha, const Grid& grid);
/// Closed-form d/d alpha Q_alpha sampled on the grid.
Field ground_state_dalpha(double alpha, const Grid& grid);
/// Closed-form d^2/d alpha^2 Q_alpha sampled on the grid.
Field ground_state_d2alpha(double alpha, const Grid& grid);

Field standing_wave(double alpha, double t, const Grid& grid);

/// Throws SingularEvaluation where the denominator modulus drops below 1e-12.
cplx two_param_soliton_value(double alpha, double beta, double t, double x);
Field two_param_soliton(double alpha, double beta, double t, const Grid& grid);
/// Analytic d/dt of the two-parameter soliton.
Field two_param_soliton_dt(double alpha, double beta, double t, const Grid& grid);

/// pi / |alpha^2 - beta^2|; nullopt when alpha == beta (no blow-up).
std::optional<double> blowup_time(double alpha, double beta);

/// Q' = (1 + x d/dx) Q = d/d alpha Q_alpha at alpha = 1.
Field q_prime(const Grid& grid);

/// The four profiles spanning the root spaces at zero.
struct QProfiles {
  Field q;       // Q
  Field q_prime; // (1 + x dx) Q
  Field dx_q;    // dQ/dx
  Field x_q;     // x Q
};

/// Built once per grid and cached; thread-safe.
const QProfiles& q_profiles(const Grid& grid);

}  // namespace nnls
