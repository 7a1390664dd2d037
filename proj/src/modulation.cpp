#include "nnls/modulation.hpp"

#include <cmath>
#include <sstream>

#include "nnls/invariants.hpp"
#include "nnls/solitons.hpp"

namespace nnls {

namespace {

// int f g dx for real profiles.
double dot(std::span<const double> f, std::span<const double> g, double dx) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * g[j];
  return acc * dx;
}

struct FitTerms {
  double r1, r2;
  double j11, j12, j21, j22;
};

FitTerms fit_terms(const Field& u, double theta, double alpha) {
  const Grid& grid = u.grid();
  const auto x = grid.points();
  const double dx = grid.spacing();
  const std::size_t n = u.size();
  std::vector<double> re_w(n), im_w(n), qa(n), dqa(n), d2qa(n);
  const cplx rot = std::polar(1.0, -theta);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx w = rot * u[j];
    re_w[j] = w.real();
    im_w[j] = w.imag();
    qa[j] = ground_state_alpha_derivative(alpha, x[j], 0);
    dqa[j] = ground_state_alpha_derivative(alpha, x[j], 1);
    d2qa[j] = ground_state_alpha_derivative(alpha, x[j], 2);
  }
  FitTerms t{};
  // With w = e^{-i theta} u:
  //   r1 = <i(w - Q_a) | Q'_a> = -int Im(w) Q'_a,   r2 = int Re(w) Q_a - int Q_a^2.
  t.r1 = -dot(im_w, dqa, dx);
  t.r2 = dot(re_w, qa, dx) - dot(qa, qa, dx);
  t.j11 = dot(re_w, dqa, dx);
  t.j12 = -dot(im_w, d2qa, dx);
  t.j21 = dot(im_w, qa, dx);
  t.j22 = dot(re_w, dqa, dx) - 2.0 * dot(qa, dqa, dx);
  return t;
}

}  // namespace

ModulationFit fit_modulation(const Field& u, ModulationGuess guess, FitOptions options) {
  double theta = guess.theta;
  double alpha = guess.alpha;
  if (!(alpha > 0.0)) throw ConfigError("modulation guess alpha must be positive");
  FitTerms t = fit_terms(u, theta, alpha);
  auto size = [](const FitTerms& f) { return std::max(std::abs(f.r1), std::abs(f.r2)); };
  int it = 0;
  while (size(t) >= options.tolerance) {
    if (it == options.max_iterations) {
      throw FitFailure("modulation fit did not converge in " + std::to_string(it) + " iterations", t.r1, t.r2, it);
    }
    ++it;
    const double det = t.j11 * t.j22 - t.j12 * t.j21;
    if (!std::isfinite(det) || det == 0.0) {
      throw FitFailure("singular modulation Jacobian", t.r1, t.r2, it);
    }
    const double d_theta = -(t.j22 * t.r1 - t.j12 * t.r2) / det;
    const double d_alpha = -(-t.j21 * t.r1 + t.j11 * t.r2) / det;
    // Backtrack while the step leaves the admissible range or grows the residual.
    double lambda = 1.0;
    FitTerms trial{};
    for (int k = 0; k < 30; ++k) {
      const double a_try = alpha + lambda * d_alpha;
      if (a_try > 0.0) {
        trial = fit_terms(u, theta + lambda * d_theta, a_try);
        if (size(trial) < size(t) || k == 29) break;
      }
      lambda *= 0.5;
    }
    theta += lambda * d_theta;
    alpha += lambda * d_alpha;
    t = trial;
    if (!std::isfinite(theta) || !std::isfinite(alpha) || !(alpha > 0.0)) {
      throw FitFailure("modulation fit left the admissible range", t.r1, t.r2, it);
    }
  }
  return {theta, alpha, it, t.r1, t.r2};
}

double mass_of_q(const Grid& grid) { return quasipower(q_profiles(grid).q).real(); }

ModulationCoords decompose(const Field& u, double theta, double alpha) {
  const Grid& grid = u.grid();
  const QProfiles& p = q_profiles(grid);
  const double mq = mass_of_q(grid);
  const cplx i(0.0, 1.0);

  Field v = std::polar(1.0, -theta) * u - ground_state(alpha, grid);
  auto [v_e, v_o] = even_odd_split(v);

  const double a_e = -semi_inner(i * v_e, p.q_prime) / mq;
  const double b_e = semi_inner(v_e, p.q) / mq;
  const double a_o = semi_inner(i * v_o, p.x_q) / mq;
  const double b_o = -semi_inner(v_o, p.dx_q) / mq;

  Field eta_e = v_e - (a_e * i) * p.q - cplx(b_e) * p.q_prime;
  Field eta_o = v_o - (a_o * i) * p.dx_q - cplx(b_o) * p.x_q;
  return {theta, alpha, a_e, b_e, a_o, b_o, std::move(eta_e), std::move(eta_o), std::move(v)};
}

Field reconstruct_perturbation(const ModulationCoords& c) {
  const QProfiles& p = q_profiles(c.eta_e.grid());
  const cplx i(0.0, 1.0);
  return (c.a_e * i) * p.q + cplx(c.b_e) * p.q_prime + c.eta_e + (c.a_o * i) * p.dx_q + cplx(c.b_o) * p.x_q +
         c.eta_o;
}

Field reconstruct(const ModulationCoords& c) {
  const Grid& grid = c.eta_e.grid();
  return std::polar(1.0, c.theta) * (ground_state(c.alpha, grid) + reconstruct_perturbation(c));
}

Field project_even_residual(const Field& f) {
  const QProfiles& p = q_profiles(f.grid());
  const double mq = mass_of_q(f.grid());
  const cplx i(0.0, 1.0);
  Field e = even_odd_split(f).first;
  const double a = -semi_inner(i * e, p.q_prime) / mq;
  const double b = semi_inner(e, p.q) / mq;
  return e - (a * i) * p.q - cplx(b) * p.q_prime;
}

Field project_odd_residual(const Field& f) {
  const QProfiles& p = q_profiles(f.grid());
  const double mq = mass_of_q(f.grid());
  const cplx i(0.0, 1.0);
  Field o = even_odd_split(f).second;
  const double a = semi_inner(i * o, p.x_q) / mq;
  const double b = -semi_inner(o, p.dx_q) / mq;
  return o - (a * i) * p.dx_q - cplx(b) * p.x_q;
}

InitialData build_initial_data(const Grid& grid, double epsilon, const InitialCoefficients& c,
                               const InitialSeeds& seeds, double tier_constant) {
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (!(tier_constant > 0.0)) throw ConfigError("tier constant must be positive");
  const QProfiles& p = q_profiles(grid);
  Field eta_e = seeds.eta_e ? project_even_residual(*seeds.eta_e) : Field(grid);
  Field eta_o = seeds.eta_o ? project_odd_residual(*seeds.eta_o) : Field(grid);
  if (seeds.eta_e) seeds.eta_e->require_same_grid(eta_e);
  if (seeds.eta_o) seeds.eta_o->require_same_grid(eta_o);

  const double eta_e_h1 = norm_hs(eta_e, 1.0);
  const double eta_o_h1 = norm_hs(eta_o, 1.0);
  const double slack = 1.0 + 1e-12;
  const double tier1 = std::abs(c.a_e) + std::abs(c.b_e) + std::abs(c.a_o);
  const double tier2 = std::abs(c.b_o) + eta_e_h1 + eta_o_h1;

  auto offender = [](std::initializer_list<std::pair<const char*, double>> terms) {
    const char* name = "";
    double best = -1.0;
    for (const auto& [k, v] : terms) {
      if (v > best) {
        best = v;
        name = k;
      }
    }
    return std::string(name);
  };
  if (tier1 > tier_constant * epsilon * slack) {
    std::ostringstream os;
    os << "first-tier coefficients exceed " << tier_constant << "*eps (sum " << tier1 << "); offending coefficient: "
       << offender({{"a_e", std::abs(c.a_e)}, {"b_e", std::abs(c.b_e)}, {"a_o", std::abs(c.a_o)}});
    throw ConfigError(os.str());
  }
  if (tier2 > tier_constant * epsilon * epsilon * slack) {
    std::ostringstream os;
    os << "second-tier terms exceed " << tier_constant << "*eps^2 (sum " << tier2 << "); offending coefficient: "
       << offender({{"b_o", std::abs(c.b_o)}, {"eta_e", eta_e_h1}, {"eta_o", eta_o_h1}});
    throw ConfigError(os.str());
  }

  const cplx i(0.0, 1.0);
  Field w0 = (c.a_e * i) * p.q + cplx(c.b_e) * p.q_prime + eta_e + (c.a_o * i) * p.dx_q + cplx(c.b_o) * p.x_q + eta_o;
  const double dist = norm_hs(w0, 1.0);
  return {p.q + w0, std::move(eta_e), std::move(eta_o), dist};
}

BootstrapObservables bootstrap_observables(const ModulationCoords& c, double theta_dot, double alpha_dot) {
  BootstrapObservables b;
  b.lambda = std::abs(c.a_e) + std::abs(c.b_e) + std::abs(c.a_o) + std::abs(c.b_o) + norm_hs(c.eta_e, 1.0) +
             norm_hs(c.eta_o, 1.0) + std::abs(c.alpha - 1.0);
  b.xi = std::abs(1.0 + theta_dot) + std::abs(alpha_dot);
  return b;
}

ModulationSample summarize(const ModulationCoords& c, double time) {
  ModulationSample s;
  s.time = time;
  s.theta = c.theta;
  s.alpha = c.alpha;
  s.a_e = c.a_e;
  s.b_e = c.b_e;
  s.a_o = c.a_o;
  s.b_o = c.b_o;
  s.eta_e_h1 = norm_hs(c.eta_e, 1.0);
  s.eta_o_h1 = norm_hs(c.eta_o, 1.0);
  s.eta_e_l2 = norm_lp(c.eta_e, 2.0);
  s.eta_o_l2 = norm_lp(c.eta_o, 2.0);
  return s;
}

}  // namespace nnls
