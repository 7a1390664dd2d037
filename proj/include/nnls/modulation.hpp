#pragma once

// Coordinates around the ground state.
//
// A state close to the orbit of Q is written u = e^{i theta} (Q_alpha + v) with
// (theta, alpha) fixed by
//     <i v | Q'_alpha> = <v | Q_alpha> = 0,
// and v is split into even and odd parts,
//     v_e = a_e iQ + b_e Q' + eta_e,        v_o = a_o i dxQ + b_o xQ + eta_o,
// where the residuals satisfy
//     <eta_e | Q> = <i eta_e | Q'> = <eta_o | dxQ> = <i eta_o | xQ> = 0.
// All inner products are <f | g> = Re int f conj(g) dx.

#include <optional>

#include "nnls/dynamics.hpp"
#include "nnls/field.hpp"

namespace nnls {

struct ModulationCoords {
  double theta = 0.0;
  double alpha = 1.0;
  double a_e = 0.0, b_e = 0.0, a_o = 0.0, b_o = 0.0;
  Field eta_e;
  Field eta_o;
  Field v;  // e^{-i theta} u - Q_alpha
};

struct ModulationGuess {
  double theta = 0.0;
  double alpha = 1.0;
};

struct ModulationFit {
  double theta = 0.0;
  double alpha = 1.0;
  int iterations = 0;
  double residual_phase = 0.0;  // <i(u - e^{i th} Q_a) | e^{i th} Q'_a>
  double residual_scale = 0.0;  // <u - e^{i th} Q_a | e^{i th} Q_a>
};

struct FitOptions {
  double tolerance = 1e-11;
  int max_iterations = 50;
};

/// 2D Newton iteration on the two orthogonality residuals. Theta is not
/// wrapped, so a warm start from the previous snapshot keeps it continuous.
/// Throws FitFailure after max_iterations.
ModulationFit fit_modulation(const Field& u, ModulationGuess guess = {}, FitOptions options = {});

/// Quasipower of Q on the given grid (= 2 up to quadrature error).
double mass_of_q(const Grid& grid);

ModulationCoords decompose(const Field& u, double theta, double alpha);

/// v rebuilt from the root-space coefficients and residuals.
Field reconstruct_perturbation(const ModulationCoords& c);
/// e^{i theta} (Q_alpha + v).
Field reconstruct(const ModulationCoords& c);

/// Root-space coefficients of the data increment w0 = u0 - Q.
struct InitialCoefficients {
  double a_e = 0.0, b_e = 0.0, a_o = 0.0, b_o = 0.0;
};

struct InitialSeeds {
  std::optional<Field> eta_e;
  std::optional<Field> eta_o;
};

struct InitialData {
  Field u0;
  Field eta_e;  // projected seeds actually used
  Field eta_o;
  double distance_h1 = 0.0;  // ||u0 - Q||_{H^1}
};

/// Remove the even root-space components (iQ, Q') from the even part of f.
Field project_even_residual(const Field& f);
/// Remove the odd root-space components (i dxQ, xQ) from the odd part of f.
Field project_odd_residual(const Field& f);

/// u0 = Q + a_e iQ + b_e Q' + eta_e + a_o i dxQ + b_o xQ + eta_o.
///
/// Seeds are projected to satisfy the residual orthogonality conditions. The
/// sizes are validated against the tiers
///     |a_e| + |b_e| + |a_o|                 <= tier_constant * eps,
///     |b_o| + |eta_e|_{H1} + |eta_o|_{H1}   <= tier_constant * eps^2,
/// and a ConfigError naming the dominant offending term is thrown otherwise.
InitialData build_initial_data(const Grid& grid, double epsilon, const InitialCoefficients& coeffs,
                               const InitialSeeds& seeds = {}, double tier_constant = 1.0);

struct BootstrapObservables {
  double lambda = 0.0;  // |a_e|+|b_e|+|a_o|+|b_o|+|eta_e|_{H1}+|eta_o|_{H1}+|alpha-1|
  double xi = 0.0;      // |1 + theta_dot| + |alpha_dot|
};

BootstrapObservables bootstrap_observables(const ModulationCoords& c, double theta_dot, double alpha_dot);

ModulationSample summarize(const ModulationCoords& c, double time);

}  // namespace nnls
