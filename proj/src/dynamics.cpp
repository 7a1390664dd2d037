#include "nnls/dynamics.hpp"

#include <cmath>

namespace nnls {

std::string to_string(Scheme s) { return s == Scheme::strang_rk4 ? "strang_rk4" : "if_rk4"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "strang_rk4") return Scheme::strang_rk4;
  if (s == "if_rk4") return Scheme::if_rk4;
  throw ConfigError("unknown scheme '" + s + "'");
}

std::string to_string(BlowupCriterion c) { return c == BlowupCriterion::linf ? "linf" : "spectral_tail"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup_detected: return "blowup_detected";
    case Termination::resolution_lost: return "resolution_lost";
    case Termination::stopped: return "stopped";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("solver.dt must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("solver.t_end must be non-negative");
  if (!(blowup_linf_threshold > 0.0)) throw ConfigError("solver.blowup_linf_threshold must be positive");
  if (!(blowup_spectral_tail_threshold > 0.0)) {
    throw ConfigError("solver.blowup_spectral_tail_threshold must be positive");
  }
  if (record_every < 1) throw ConfigError("solver.record_every must be >= 1");
  if (snapshot_every < 0) throw ConfigError("solver.snapshot_every must be >= 0");
  if (blowup_refinements < 0) throw ConfigError("solver.blowup_refinements must be >= 0");
}

Field nonlinearity(const Field& u, bool nonlocal) {
  const Field partner = nonlocal ? reflect_conjugate(u) : conj(u);
  Field out(u.grid());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] * u[j] * partner[j];
  return out;
}

double spectral_tail_fraction(const Field& u) {
  const auto s = to_spectral(u);
  const auto k = u.grid().wavenumbers();
  const double cut = 0.9 * u.grid().max_wavenumber();
  double total = 0.0, tail = 0.0;
  for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
    const double p = std::norm(s.coeffs[m]);
    total += p;
    if (std::abs(k[m]) >= cut) tail += p;
  }
  return total > 0.0 ? tail / total : 0.0;
}

std::optional<BlowupReport> detect_blowup(const Field& u, const SolverConfig& cfg, double time) {
  const double linf = norm_lp(u, INFINITY);
  const double tail = spectral_tail_fraction(u);
  if (linf > cfg.blowup_linf_threshold) return BlowupReport{BlowupCriterion::linf, time, linf, tail};
  if (tail > cfg.blowup_spectral_tail_threshold) {
    return BlowupReport{BlowupCriterion::spectral_tail, time, linf, tail};
  }
  return std::nullopt;
}

namespace {

// -i N(u) from Fourier coefficients, returned as Fourier coefficients. work is scratch.
void nonlinear_rhs_spectral(const Grid& grid, const std::vector<cplx>& coeffs, bool nonlocal, std::vector<cplx>& work,
                            std::vector<cplx>& out) {
  const std::size_t n = coeffs.size();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) work[j] = coeffs[j] * scale;
  grid.backward(work);
  out.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx partner = nonlocal ? std::conj(work[(n - j) % n]) : std::conj(work[j]);
    out[j] = cplx(0.0, -1.0) * work[j] * work[j] * partner;
  }
  grid.forward(out);
}

Field strang_step(const Field& u, double dt, bool nonlocal) {
  const Grid& grid = u.grid();
  const auto k = grid.wavenumbers();
  auto half_linear = [&](const Field& f) {
    auto s = to_spectral(f);
    for (std::size_t m = 0; m < s.coeffs.size(); ++m) s.coeffs[m] *= std::polar(1.0, 0.5 * k[m] * k[m] * dt);
    return from_spectral(s);
  };
  auto rhs = [&](const Field& f) { return cplx(0.0, -1.0) * nonlinearity(f, nonlocal); };

  Field w = half_linear(u);
  const Field k1 = rhs(w);
  const Field k2 = rhs(w + (0.5 * dt) * k1);
  const Field k3 = rhs(w + (0.5 * dt) * k2);
  const Field k4 = rhs(w + dt * k3);
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return half_linear(w);
}

Field if_rk4_step(const Field& u, double dt, bool nonlocal) {
  const Grid& grid = u.grid();
  const auto k = grid.wavenumbers();
  const std::size_t n = u.size();
  // Phase factors are reused while (grid, dt) stays the same.
  thread_local std::vector<cplx> e_half, e_full;
  thread_local int cached_n = 0;
  thread_local double cached_length = 0.0, cached_dt = 0.0;
  if (cached_n != grid.size() || cached_length != grid.length() || cached_dt != dt) {
    e_half.resize(n);
    e_full.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      e_half[m] = std::polar(1.0, 0.5 * k[m] * k[m] * dt);
      e_full[m] = e_half[m] * e_half[m];
    }
    cached_n = grid.size();
    cached_length = grid.length();
    cached_dt = dt;
  }
  const std::vector<cplx> v = to_spectral(u).coeffs;
  std::vector<cplx> tmp(n), work(n), k1, k2, k3, k4;

  nonlinear_rhs_spectral(grid, v, nonlocal, work, k1);
  for (std::size_t m = 0; m < n; ++m) tmp[m] = e_half[m] * (v[m] + 0.5 * dt * k1[m]);
  nonlinear_rhs_spectral(grid, tmp, nonlocal, work, k2);
  for (std::size_t m = 0; m < n; ++m) tmp[m] = e_half[m] * v[m] + 0.5 * dt * k2[m];
  nonlinear_rhs_spectral(grid, tmp, nonlocal, work, k3);
  for (std::size_t m = 0; m < n; ++m) tmp[m] = e_full[m] * v[m] + dt * e_half[m] * k3[m];
  nonlinear_rhs_spectral(grid, tmp, nonlocal, work, k4);

  for (std::size_t m = 0; m < n; ++m) {
    tmp[m] = e_full[m] * v[m] + dt / 6.0 * (e_full[m] * k1[m] + 2.0 * e_half[m] * (k2[m] + k3[m]) + k4[m]);
  }
  return from_spectral(SpectralField{grid, std::move(tmp)});
}

}  // namespace

Field step(const Field& u, double dt, const SolverConfig& cfg) {
  if (dt == 0.0) return u;
  return cfg.scheme == Scheme::strang_rk4 ? strang_step(u, dt, cfg.nonlocal) : if_rk4_step(u, dt, cfg.nonlocal);
}

Diagnostics diagnose(const Field& u, double time) {
  return {time, norm_lp(u, 2.0), norm_lp(u, INFINITY), norm_hs(u, 1.0), invariants(u, time)};
}

Trajectory evolve(const Field& u0, const SolverConfig& cfg, const RecordHook& hook, const StopPredicate& stop) {
  cfg.validate();
  Trajectory traj;
  int recorded = 0;
  bool stop_requested = false;
  auto record = [&](double t, const Field& u) {
    traj.times.push_back(t);
    traj.diagnostics.push_back(diagnose(u, t));
    if (cfg.snapshot_every > 0 && recorded % cfg.snapshot_every == 0) {
      traj.snapshot_times.push_back(t);
      traj.snapshots.push_back(u);
    }
    ++recorded;
    if (hook) hook(t, u);
    if (stop && stop(t, u)) stop_requested = true;
  };

  Field u = u0;
  if (!u.is_finite()) {
    traj.termination = Termination::resolution_lost;
    traj.final_state = u;
    return traj;
  }
  if (auto b = detect_blowup(u, cfg, 0.0)) {
    record(0.0, u);
    traj.termination = Termination::blowup_detected;
    traj.blowup = b;
    traj.final_state = u;
    return traj;
  }
  record(0.0, u);
  if (stop_requested) {
    traj.termination = Termination::stopped;
    traj.final_state = u;
    return traj;
  }

  const long total_steps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  double t_base = 0.0;      // time of the last accepted state
  double dt = cfg.dt;
  int refinements_left = cfg.blowup_refinements;
  long base_steps = 0;

  while (base_steps < total_steps && t_base < cfg.t_end) {
    const double dt_step =
        (dt == cfg.dt) ? std::min(dt, cfg.t_end - base_steps * cfg.dt) : std::min(dt, cfg.t_end - t_base);
    Field next = step(u, dt_step, cfg);
    const double t_next = (dt == cfg.dt) ? (base_steps + 1 == total_steps ? cfg.t_end : (base_steps + 1) * cfg.dt)
                                         : t_base + dt_step;
    if (!next.is_finite()) {
      if (refinements_left > 0) {
        --refinements_left;
        dt *= 0.5;
        continue;
      }
      traj.termination = Termination::resolution_lost;
      break;
    }
    if (auto b = detect_blowup(next, cfg, t_next)) {
      if (refinements_left > 0) {
        --refinements_left;
        dt *= 0.5;
        continue;
      }
      u = std::move(next);
      t_base = t_next;
      record(t_base, u);
      traj.termination = Termination::blowup_detected;
      traj.blowup = b;
      break;
    }
    u = std::move(next);
    t_base = t_next;
    if (dt == cfg.dt) {
      ++base_steps;
      if (base_steps % cfg.record_every == 0 || base_steps == total_steps) record(t_base, u);
      if (stop_requested && base_steps < total_steps) {
        traj.termination = Termination::stopped;
        break;
      }
    }
    // After a refinement the run only continues until detection.
  }
  traj.final_time = t_base;
  traj.final_state = u;
  return traj;
}

}  // namespace nnls
