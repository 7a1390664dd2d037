#pragma once

// Evolution of the modulation coordinates.
//
// Substituting u = e^{i theta}(Q_a + v) into the equation gives
//     i v_t + Lv = (1 + theta_dot)(Q_a + v) + (a^2 - 1) Q_a - i alpha_dot Q'_a
//                  + (Q_a^2 - Q^2)(2v + v*) + N_a(v, v*),
//     Lv  = -v_xx + v - 2Q^2 v - Q^2 v*,
//     N_a = Q_a v^2 + 2 Q_a v v* + v^2 v*.
// Differentiating the two orthogonality constraints gives a 2x2 linear system
// for (theta_dot, alpha_dot). Projecting i v_t on the root-space profiles gives
// the four coefficient derivatives.

#include <optional>
#include <string>
#include <vector>

#include "nnls/dynamics.hpp"
#include "nnls/modulation.hpp"

namespace nnls {

struct PhaseScaleRates {
  double theta_dot = 0.0;
  double alpha_dot = 0.0;
};

/// Exact constraint-derived system. Throws DegenerateState when
/// |det| < 1e-8 M(Q)^2.
PhaseScaleRates eval_theta_alpha_dot(const ModulationCoords& c);

/// The two scalar identities written in terms of M(Q), L+ and L-, transcribed
/// term by term. They drop the (a^2 - 1) Q_a forcing, so they agree with the
/// exact system only at alpha = 1; kept for comparison.
PhaseScaleRates eval_theta_alpha_dot_display(const ModulationCoords& c);

/// Even and odd parts of N_a(v, v*) built from v_e, v_o:
///   N_e = (N(v_e + v_o, conj(v_e - v_o)) + N(v_e - v_o, conj(v_e + v_o))) / 2
/// and N_o with the difference.
std::pair<Field, Field> nonlinear_even_odd(const Field& v_e, const Field& v_o, double alpha);

/// One addend of i v_t and its contribution to each coefficient derivative.
struct RhsTerm {
  std::string label;
  double a_e_dot = 0.0, b_e_dot = 0.0, a_o_dot = 0.0, b_o_dot = 0.0;
};

struct RhsReport {
  double theta_dot = 0.0, alpha_dot = 0.0;
  double a_e_dot = 0.0, b_e_dot = 0.0, a_o_dot = 0.0, b_o_dot = 0.0;
  /// Labels: linear, phase, dilation_forcing, alpha_dot, potential, nonlinear.
  std::vector<RhsTerm> residual_terms;
};

RhsReport eval_coefficient_dots(const ModulationCoords& c, double theta_dot, double alpha_dot);

/// Both steps together.
RhsReport eval_rhs(const ModulationCoords& c);

struct QuantityDiscrepancy {
  std::string name;
  double max_abs_discrepancy = 0.0;
  double max_abs_value = 0.0;  // largest |d/dt| seen, for relative bounds
};

struct ConsistencyReport {
  std::size_t samples = 0;
  std::vector<QuantityDiscrepancy> quantities;  // theta, alpha, a_e, b_e, a_o, b_o
  double max_discrepancy() const;
  const QuantityDiscrepancy& at(const std::string& name) const;
};

/// Three-point finite differences of the fitted series against the evaluated
/// right sides at interior samples. Needs samples carrying rhs values.
/// Throws ConfigError with fewer than 3 samples.
ConsistencyReport consistency_check(const Trajectory& traj);
ConsistencyReport consistency_check(const std::vector<ModulationSample>& samples);

struct TrackerOptions {
  bool evaluate_rhs = true;
  FitOptions fit;
};

/// Record hook that refits (theta, alpha) at every recorded time, warm-started
/// from the previous fit. A FitFailure stops tracking and records the time.
class ModulationTracker {
 public:
  explicit ModulationTracker(ModulationGuess initial = {}, TrackerOptions options = {});

  void operator()(double t, const Field& u);
  RecordHook hook();

  const std::vector<ModulationSample>& samples() const { return samples_; }
  std::optional<double> failure_time() const { return failure_time_; }
  const std::string& failure_message() const { return failure_message_; }
  /// max over samples of |<iv|Q'_a>| and |<v|Q_a>|.
  double max_constraint_residual() const { return max_constraint_; }
  /// max over samples of |a_e - <iv_e|Q'_a - Q'>/M(Q)|.
  double max_a_e_identity_residual() const { return max_a_e_identity_; }
  /// max of |1 + theta_dot| + |alpha_dot| over samples with rhs.
  double max_xi() const { return max_xi_; }
  double max_lambda() const { return max_lambda_; }

 private:
  ModulationGuess guess_;
  TrackerOptions options_;
  std::vector<ModulationSample> samples_;
  std::optional<double> failure_time_;
  std::string failure_message_;
  double max_constraint_ = 0.0;
  double max_a_e_identity_ = 0.0;
  double max_xi_ = 0.0;
  double max_lambda_ = 0.0;
};

}  // namespace nnls
