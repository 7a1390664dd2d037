#include "nnls/modulation_rhs.hpp"

#include <cmath>

#include "nnls/linops.hpp"
#include "nnls/solitons.hpp"

namespace nnls {

namespace {

const cplx I(0.0, 1.0);

// N(a, b) = Q_a a^2 + 2 Q_a a b + a^2 b, pointwise.
Field nonlinear_term(const Field& qa, const Field& a, const Field& b) {
  Field out(a.grid());
  for (std::size_t j = 0; j < a.size(); ++j) {
    out[j] = qa[j] * a[j] * a[j] + 2.0 * qa[j] * a[j] * b[j] + a[j] * a[j] * b[j];
  }
  return out;
}

Field potential_difference(const Field& qa, const Field& q) {
  Field out(q.grid());
  for (std::size_t j = 0; j < q.size(); ++j) out[j] = qa[j] * qa[j] - q[j] * q[j];
  return out;
}

}  // namespace

std::pair<Field, Field> nonlinear_even_odd(const Field& v_e, const Field& v_o, double alpha) {
  const Field qa = ground_state(alpha, v_e.grid());
  const Field plus = nonlinear_term(qa, v_e + v_o, conj(v_e - v_o));
  const Field minus = nonlinear_term(qa, v_e - v_o, conj(v_e + v_o));
  return {0.5 * (plus + minus), 0.5 * (plus - minus)};
}

PhaseScaleRates eval_theta_alpha_dot(const ModulationCoords& c) {
  const Grid& grid = c.v.grid();
  const double mq = mass_of_q(grid);
  const Field qa = ground_state(c.alpha, grid);
  const Field dqa = ground_state_dalpha(c.alpha, grid);
  const Field d2qa = ground_state_d2alpha(c.alpha, grid);
  const Field w = qa + c.v;
  // R(w) = w_xx + w^2 w*
  Field r = derivative(w, 2);
  r += nonlinearity(w, true);

  // theta_dot <w|Q'_a> + alpha_dot <iv|Q''_a> = -<R|Q'_a>
  // theta_dot <-iw|Q_a> + alpha_dot (<v|Q'_a> - <Q'_a|Q_a>) = <iR|Q_a>
  const double m11 = semi_inner(w, dqa);
  const double m12 = semi_inner(I * c.v, d2qa);
  const double m21 = semi_inner(-I * w, qa);
  const double m22 = semi_inner(c.v, dqa) - semi_inner(dqa, qa);
  const double r1 = -semi_inner(r, dqa);
  const double r2 = semi_inner(I * r, qa);
  const double det = m11 * m22 - m12 * m21;
  if (!(std::abs(det) >= 1e-8 * mq * mq)) throw DegenerateState("modulation system is singular at this state");
  return {(r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det};
}

PhaseScaleRates eval_theta_alpha_dot_display(const ModulationCoords& c) {
  const Grid& grid = c.v.grid();
  const QProfiles& p = q_profiles(grid);
  const double mq = mass_of_q(grid);
  const Field qa = ground_state(c.alpha, grid);
  const Field dqa = ground_state_dalpha(c.alpha, grid);
  const Field d2qa = ground_state_d2alpha(c.alpha, grid);
  const auto [v_e, v_o] = even_odd_split(c.v);
  const Field n_e = nonlinear_even_odd(v_e, v_o, c.alpha).first;
  const Field dq = qa - p.q;
  const Field ddq = dqa - p.q_prime;
  const Field pot = potential_difference(qa, p.q);

  const double a_coef = mq + semi_inner(ddq, qa) + semi_inner(p.q_prime, dq) - semi_inner(v_e, dqa);
  const double a_rhs = semi_inner(I * v_e, apply(OperatorKind::L_minus, dq)) +
                       semi_inner(I * multiply(pot, v_e), qa) + semi_inner(I * n_e, qa);
  // The bracket carries <Q_a - Q|Q'> twice, as transcribed.
  const double b_coef = mq + semi_inner(dq, p.q_prime) + semi_inner(v_e, p.q_prime) + semi_inner(dq, ddq) +
                        semi_inner(dq, p.q_prime) + semi_inner(p.q + v_e, ddq);
  if (!(std::abs(a_coef * b_coef) >= 1e-8 * mq * mq)) {
    throw DegenerateState("modulation system is singular at this state");
  }
  const double alpha_dot = a_rhs / a_coef;
  const double b_rhs = -alpha_dot * semi_inner(I * v_e, d2qa) - semi_inner(v_e, apply(OperatorKind::L_plus, ddq)) -
                       2.0 * mq * c.b_e - semi_inner(n_e, p.q_prime);
  return {b_rhs / b_coef - 1.0, alpha_dot};
}

RhsReport eval_coefficient_dots(const ModulationCoords& c, double theta_dot, double alpha_dot) {
  const Grid& grid = c.v.grid();
  const QProfiles& p = q_profiles(grid);
  const double mq = mass_of_q(grid);
  const Field qa = ground_state(c.alpha, grid);
  const Field dqa = ground_state_dalpha(c.alpha, grid);
  const Field& v = c.v;
  const Field vs = reflect_conjugate(v);
  const Field two_v_vs = 2.0 * v + vs;

  std::vector<std::pair<std::string, Field>> terms;
  {
    // -Lv = v_xx - v + Q^2 (2v + v*)
    Field t = derivative(v, 2) - v;
    for (std::size_t j = 0; j < t.size(); ++j) t[j] += p.q[j] * p.q[j] * two_v_vs[j];
    terms.emplace_back("linear", std::move(t));
  }
  terms.emplace_back("phase", (1.0 + theta_dot) * (qa + v));
  terms.emplace_back("dilation_forcing", (c.alpha * c.alpha - 1.0) * qa);
  terms.emplace_back("alpha_dot", (-I * alpha_dot) * dqa);
  terms.emplace_back("potential", multiply(potential_difference(qa, p.q), two_v_vs));
  terms.emplace_back("nonlinear", nonlinear_term(qa, v, vs));

  RhsReport rep;
  rep.theta_dot = theta_dot;
  rep.alpha_dot = alpha_dot;
  for (auto& [label, t] : terms) {
    RhsTerm rt;
    rt.label = label;
    rt.a_e_dot = -semi_inner(t, p.q_prime) / mq;
    rt.b_e_dot = semi_inner(-I * t, p.q) / mq;
    rt.a_o_dot = semi_inner(t, p.x_q) / mq;
    rt.b_o_dot = semi_inner(I * t, p.dx_q) / mq;
    rep.a_e_dot += rt.a_e_dot;
    rep.b_e_dot += rt.b_e_dot;
    rep.a_o_dot += rt.a_o_dot;
    rep.b_o_dot += rt.b_o_dot;
    rep.residual_terms.push_back(std::move(rt));
  }
  return rep;
}

RhsReport eval_rhs(const ModulationCoords& c) {
  const PhaseScaleRates r = eval_theta_alpha_dot(c);
  return eval_coefficient_dots(c, r.theta_dot, r.alpha_dot);
}

double ConsistencyReport::max_discrepancy() const {
  double m = 0.0;
  for (const auto& q : quantities) m = std::max(m, q.max_abs_discrepancy);
  return m;
}

const QuantityDiscrepancy& ConsistencyReport::at(const std::string& name) const {
  for (const auto& q : quantities) {
    if (q.name == name) return q;
  }
  throw ConfigError("no quantity named '" + name + "'");
}

ConsistencyReport consistency_check(const Trajectory& traj) { return consistency_check(traj.modulation); }

ConsistencyReport consistency_check(const std::vector<ModulationSample>& s) {
  if (s.size() < 3) throw ConfigError("consistency check needs at least 3 modulation samples");
  using Get = double (*)(const ModulationSample&);
  struct Q {
    const char* name;
    Get value;
    Get rate;
  };
  const Q qs[] = {
      {"theta", [](const ModulationSample& m) { return m.theta; }, [](const ModulationSample& m) { return m.theta_dot; }},
      {"alpha", [](const ModulationSample& m) { return m.alpha; }, [](const ModulationSample& m) { return m.alpha_dot; }},
      {"a_e", [](const ModulationSample& m) { return m.a_e; }, [](const ModulationSample& m) { return m.a_e_dot; }},
      {"b_e", [](const ModulationSample& m) { return m.b_e; }, [](const ModulationSample& m) { return m.b_e_dot; }},
      {"a_o", [](const ModulationSample& m) { return m.a_o; }, [](const ModulationSample& m) { return m.a_o_dot; }},
      {"b_o", [](const ModulationSample& m) { return m.b_o; }, [](const ModulationSample& m) { return m.b_o_dot; }},
  };
  ConsistencyReport rep;
  for (const Q& q : qs) rep.quantities.push_back({q.name, 0.0, 0.0});
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!s[i].has_rhs) continue;
    const double h1 = s[i].time - s[i - 1].time;
    const double h2 = s[i + 1].time - s[i].time;
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw ConfigError("modulation samples must have increasing times");
    const double c0 = -h2 / (h1 * (h1 + h2));
    const double c1 = (h2 - h1) / (h1 * h2);
    const double c2 = h1 / (h2 * (h1 + h2));
    ++rep.samples;
    for (std::size_t k = 0; k < std::size(qs); ++k) {
      const double fd = c0 * qs[k].value(s[i - 1]) + c1 * qs[k].value(s[i]) + c2 * qs[k].value(s[i + 1]);
      const double rate = qs[k].rate(s[i]);
      auto& out = rep.quantities[k];
      out.max_abs_discrepancy = std::max(out.max_abs_discrepancy, std::abs(fd - rate));
      out.max_abs_value = std::max(out.max_abs_value, std::abs(rate));
    }
  }
  return rep;
}

ModulationTracker::ModulationTracker(ModulationGuess initial, TrackerOptions options)
    : guess_(initial), options_(options) {}

void ModulationTracker::operator()(double t, const Field& u) {
  if (failure_time_) return;
  ModulationFit fit;
  try {
    fit = fit_modulation(u, guess_, options_.fit);
  } catch (const FitFailure& e) {
    failure_time_ = t;
    failure_message_ = e.what();
    return;
  }
  guess_ = {fit.theta, fit.alpha};
  const ModulationCoords c = decompose(u, fit.theta, fit.alpha);
  const Grid& grid = u.grid();
  const Field qa = ground_state(c.alpha, grid);
  const Field dqa = ground_state_dalpha(c.alpha, grid);
  const double mq = mass_of_q(grid);
  max_constraint_ =
      std::max({max_constraint_, std::abs(semi_inner(I * c.v, dqa)), std::abs(semi_inner(c.v, qa))});
  const Field v_e = even_odd_split(c.v).first;
  const double a_e_alt = semi_inner(I * v_e, dqa - q_profiles(grid).q_prime) / mq;
  max_a_e_identity_ = std::max(max_a_e_identity_, std::abs(c.a_e - a_e_alt));

  ModulationSample s = summarize(c, t);
  if (options_.evaluate_rhs) {
    try {
      const RhsReport r = eval_rhs(c);
      s.has_rhs = true;
      s.theta_dot = r.theta_dot;
      s.alpha_dot = r.alpha_dot;
      s.a_e_dot = r.a_e_dot;
      s.b_e_dot = r.b_e_dot;
      s.a_o_dot = r.a_o_dot;
      s.b_o_dot = r.b_o_dot;
      const BootstrapObservables b = bootstrap_observables(c, r.theta_dot, r.alpha_dot);
      max_xi_ = std::max(max_xi_, b.xi);
      max_lambda_ = std::max(max_lambda_, b.lambda);
    } catch (const DegenerateState&) {
      s.has_rhs = false;
    }
  }
  samples_.push_back(s);
}

RecordHook ModulationTracker::hook() {
  return [this](double t, const Field& u) { (*this)(t, u); };
}

}  // namespace nnls
