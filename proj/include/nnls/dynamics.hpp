#pragma once

// Time integration of i u_t - u_xx = u^2 u*(x) (nonlocal) and, as a comparison,
// of the local cubic NLS i u_t - u_xx = |u|^2 u.
//
// The linear flow is exact in Fourier space, u_hat(t) = e^{i k^2 t} u_hat(0).
// Two schemes are offered:
//   strang_rk4  half linear step, RK4 on u_t = -i N(u), half linear step
//               (second order in time);
//   if_rk4      integrating-factor (Lawson) RK4 on the full right side
//               (fourth order in time).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nnls/field.hpp"
#include "nnls/invariants.hpp"

namespace nnls {

enum class Scheme { strang_rk4, if_rk4 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::if_rk4;
  bool nonlocal = true;
  double blowup_linf_threshold = 1e3;
  double blowup_spectral_tail_threshold = 1e-3;
  int record_every = 1;
  /// Keep every snapshot_every-th recorded state in Trajectory::snapshots (0 = none).
  int snapshot_every = 0;
  /// Number of dt halvings used to localise the blow-up detection time.
  int blowup_refinements = 0;

  void validate() const;
};

enum class BlowupCriterion { linf, spectral_tail };
std::string to_string(BlowupCriterion c);

struct BlowupReport {
  BlowupCriterion criterion = BlowupCriterion::linf;
  double time = 0.0;
  double linf = 0.0;
  double tail_fraction = 0.0;
};

/// stopped: the caller's stop predicate ended the run before t_end.
enum class Termination { completed, blowup_detected, resolution_lost, stopped };
std::string to_string(Termination t);

struct Diagnostics {
  double time = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double h1 = 0.0;
  InvariantReport invariants;
};

/// Scalar summary of the modulation coordinates at one recorded time, plus the
/// evaluated modulation equations when available.
struct ModulationSample {
  double time = 0.0;
  double theta = 0.0;
  double alpha = 1.0;
  double a_e = 0.0, b_e = 0.0, a_o = 0.0, b_o = 0.0;
  double eta_e_h1 = 0.0, eta_o_h1 = 0.0;
  double eta_e_l2 = 0.0, eta_o_l2 = 0.0;
  bool has_rhs = false;
  double theta_dot = 0.0, alpha_dot = 0.0;
  double a_e_dot = 0.0, b_e_dot = 0.0, a_o_dot = 0.0, b_o_dot = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Diagnostics> diagnostics;
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;
  /// Empty unless a modulation tracker was attached; aligned with times otherwise.
  std::vector<ModulationSample> modulation;
  Termination termination = Termination::completed;
  std::optional<BlowupReport> blowup;
  double final_time = 0.0;
  std::optional<Field> final_state;
};

/// Called at every recorded time with the current state.
using RecordHook = std::function<void(double t, const Field& u)>;
/// Checked after every record; returning true ends the run.
using StopPredicate = std::function<bool(double t, const Field& u)>;

/// u^2 u*(x) when nonlocal, |u|^2 u otherwise.
Field nonlinearity(const Field& u, bool nonlocal);

/// Fraction of spectral mass carried by |k| >= 0.9 k_max.
double spectral_tail_fraction(const Field& u);

std::optional<BlowupReport> detect_blowup(const Field& u, const SolverConfig& cfg, double time = 0.0);

/// One step of size dt with the configured scheme. dt = 0 is the identity.
Field step(const Field& u, double dt, const SolverConfig& cfg);

Diagnostics diagnose(const Field& u, double time);

/// Fixed-step integration to cfg.t_end. Never throws on numerical failure:
/// blow-up and non-finite states end the run with the matching termination.
Trajectory evolve(const Field& u0, const SolverConfig& cfg, const RecordHook& hook = {},
                  const StopPredicate& stop = {});

/// PT transform (x, u) -> (-x, conj u); maps a forward solution to a backward one.
inline Field pt_transform(const Field& u) { return reflect_conjugate(u); }

}  // namespace nnls
