#include "nnls/linops.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "nnls/solitons.hpp"

namespace nnls {

namespace {

constexpr int kMaxDenseN = 2048;

const cplx I(0.0, 1.0);

std::vector<double> q_squared(const Grid& grid) {
  const Field& q = q_profiles(grid).q;
  std::vector<double> out(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) out[j] = std::norm(q[j]);
  return out;
}

// (-dx^2 + 1 - c Q^2) f
Field schrodinger(const Field& f, double c) {
  const auto q2 = q_squared(f.grid());
  Field out = derivative(f, 2);
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = -out[j] + f[j] - c * q2[j] * f[j];
  return out;
}

Field cal_l(const Field& f, double sign) {
  const auto q2 = q_squared(f.grid());
  Field out = derivative(f, 2);
  for (std::size_t j = 0; j < f.size(); ++j) {
    out[j] = -out[j] + f[j] - 2.0 * q2[j] * f[j] + sign * q2[j] * std::conj(f[j]);
  }
  return out;
}

double sup(const Field& f) { return norm_lp(f, INFINITY); }
double sup(const FieldPair& p) { return std::max(sup(p.first), sup(p.second)); }

FieldPair operator-(const FieldPair& a, const FieldPair& b) { return {a.first - b.first, a.second - b.second}; }

Eigen::VectorXcd to_vector(const Field& f) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j) v[static_cast<Eigen::Index>(j)] = f[j];
  return v;
}

Field from_vector(const Grid& grid, const Eigen::VectorXcd& v, Eigen::Index offset = 0) {
  Field f(grid);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = v[offset + static_cast<Eigen::Index>(j)];
  return f;
}

Field random_field(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> centre(-0.25 * grid.length(), 0.25 * grid.length());
  std::uniform_real_distribution<double> width(0.5, 3.0);
  Field f(grid);
  const auto x = grid.points();
  for (int b = 0; b < 4; ++b) {
    const cplx amp(gauss(rng), gauss(rng));
    const double x0 = centre(rng);
    const double w = width(rng);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] += amp * std::exp(-(x[j] - x0) * (x[j] - x0) / (w * w));
  }
  return f;
}

}  // namespace

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::L_plus: return "L_plus";
    case OperatorKind::L_minus: return "L_minus";
    case OperatorKind::calL_plus: return "calL_plus";
    case OperatorKind::calL_minus: return "calL_minus";
    case OperatorKind::H_e: return "H_e";
    case OperatorKind::H_o: return "H_o";
    case OperatorKind::PinvHeP: return "PinvHeP";
    case OperatorKind::PinvHoP: return "PinvHoP";
    case OperatorKind::free: return "free";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& s) {
  for (auto k : {OperatorKind::L_plus, OperatorKind::L_minus, OperatorKind::calL_plus, OperatorKind::calL_minus,
                 OperatorKind::H_e, OperatorKind::H_o, OperatorKind::PinvHeP, OperatorKind::PinvHoP,
                 OperatorKind::free}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown operator kind '" + s + "'");
}

bool acts_on_pairs(OperatorKind k) {
  return k == OperatorKind::H_e || k == OperatorKind::H_o || k == OperatorKind::PinvHeP || k == OperatorKind::PinvHoP;
}

bool is_real_linear(OperatorKind k) { return k == OperatorKind::calL_plus || k == OperatorKind::calL_minus; }

Field apply(OperatorKind k, const Field& f) {
  switch (k) {
    case OperatorKind::L_plus: return schrodinger(f, 3.0);
    case OperatorKind::L_minus: return schrodinger(f, 1.0);
    case OperatorKind::free: return schrodinger(f, 0.0);
    case OperatorKind::calL_plus: return cal_l(f, 1.0);
    case OperatorKind::calL_minus: return cal_l(f, -1.0);
    default: throw ConfigError(to_string(k) + " acts on field pairs");
  }
}

FieldPair apply(OperatorKind k, const FieldPair& p) {
  p.first.require_same_grid(p.second);
  switch (k) {
    case OperatorKind::H_e:
    case OperatorKind::H_o: {
      // (A - 2q) f -+ q g,  +-q f - (A - 2q) g
      const double s = k == OperatorKind::H_e ? 1.0 : -1.0;
      const auto q2 = q_squared(p.first.grid());
      Field a = apply(OperatorKind::free, p.first);
      Field b = apply(OperatorKind::free, p.second);
      for (std::size_t j = 0; j < a.size(); ++j) {
        const cplx f = p.first[j], g = p.second[j];
        a[j] = a[j] - 2.0 * q2[j] * f - s * q2[j] * g;
        b[j] = s * q2[j] * f - b[j] + 2.0 * q2[j] * g;
      }
      return {std::move(a), std::move(b)};
    }
    case OperatorKind::PinvHeP:
      return {I * apply(OperatorKind::L_minus, p.second), -I * apply(OperatorKind::L_plus, p.first)};
    case OperatorKind::PinvHoP:
      return {I * apply(OperatorKind::L_plus, p.second), -I * apply(OperatorKind::L_minus, p.first)};
    default: throw ConfigError(to_string(k) + " acts on single fields");
  }
}

FieldPair apply_p(const FieldPair& p) {
  const double s = 1.0 / std::sqrt(2.0);
  return {s * (p.first + I * p.second), s * (p.first - I * p.second)};
}

FieldPair apply_p_inverse(const FieldPair& p) {
  const double s = 1.0 / std::sqrt(2.0);
  return {s * (p.first + p.second), s * (-I * p.first + I * p.second)};
}

Eigen::MatrixXd second_derivative_matrix(const Grid& grid) {
  const int n = grid.size();
  Eigen::MatrixXd d2(n, n);
  Field e(grid);
  for (int c = 0; c < n; ++c) {
    e[static_cast<std::size_t>(c)] = 1.0;
    const Field col = derivative(e, 2);
    for (int r = 0; r < n; ++r) d2(r, c) = col[static_cast<std::size_t>(r)].real();
    e[static_cast<std::size_t>(c)] = 0.0;
  }
  return d2;
}

OperatorHandle::OperatorHandle(OperatorKind kind, const Grid& grid) : kind_(kind), grid_(grid) {
  const int n = grid.size();
  if (n > kMaxDenseN) throw ConfigError("dense operator assembly limited to n <= 2048");
  const Eigen::MatrixXd d2 = second_derivative_matrix(grid);
  const auto q2v = q_squared(grid);
  const Eigen::VectorXd q2 = Eigen::Map<const Eigen::VectorXd>(q2v.data(), n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a = -d2 + id;
  const Eigen::MatrixXd lp = a - Eigen::MatrixXd(3.0 * q2.asDiagonal());
  const Eigen::MatrixXd lm = a - Eigen::MatrixXd(q2.asDiagonal());
  const Eigen::MatrixXd qd = q2.asDiagonal();

  switch (kind) {
    case OperatorKind::L_plus: complex_ = lp.cast<cplx>(); break;
    case OperatorKind::L_minus: complex_ = lm.cast<cplx>(); break;
    case OperatorKind::free: complex_ = a.cast<cplx>(); break;
    case OperatorKind::calL_plus:
    case OperatorKind::calL_minus:
      // On (Re v, Im v): calL+ = diag(L-, L+), calL- = diag(L+, L-).
      real_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      real_.topLeftCorner(n, n) = kind == OperatorKind::calL_plus ? lm : lp;
      real_.bottomRightCorner(n, n) = kind == OperatorKind::calL_plus ? lp : lm;
      break;
    case OperatorKind::H_e:
    case OperatorKind::H_o: {
      const double s = kind == OperatorKind::H_e ? 1.0 : -1.0;
      Eigen::MatrixXd h(2 * n, 2 * n);
      h << a - 2.0 * qd, -s * qd, s * qd, -a + 2.0 * qd;
      complex_ = h.cast<cplx>();
      break;
    }
    case OperatorKind::PinvHeP:
    case OperatorKind::PinvHoP: {
      const bool e = kind == OperatorKind::PinvHeP;
      complex_ = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
      complex_.topRightCorner(n, n) = I * (e ? lm : lp).cast<cplx>();
      complex_.bottomLeftCorner(n, n) = -I * (e ? lp : lm).cast<cplx>();
      break;
    }
  }
}

Field OperatorHandle::apply(const Field& f) const {
  if (acts_on_pairs(kind_)) throw ConfigError(to_string(kind_) + " acts on field pairs");
  if (!(f.grid() == grid_)) throw GridMismatch();
  const auto n = static_cast<Eigen::Index>(f.size());
  if (real_block()) {
    Eigen::VectorXd x(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
      x[j] = f[static_cast<std::size_t>(j)].real();
      x[n + j] = f[static_cast<std::size_t>(j)].imag();
    }
    const Eigen::VectorXd y = real_ * x;
    Field out(grid_);
    for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = cplx(y[j], y[n + j]);
    return out;
  }
  return from_vector(grid_, complex_ * to_vector(f));
}

FieldPair OperatorHandle::apply(const FieldPair& p) const {
  if (!acts_on_pairs(kind_)) throw ConfigError(to_string(kind_) + " acts on single fields");
  if (!(p.first.grid() == grid_) || !(p.second.grid() == grid_)) throw GridMismatch();
  const auto n = static_cast<Eigen::Index>(p.first.size());
  Eigen::VectorXcd x(2 * n);
  x << to_vector(p.first), to_vector(p.second);
  const Eigen::VectorXcd y = complex_ * x;
  return {from_vector(grid_, y, 0), from_vector(grid_, y, n)};
}

double ResidualReport::at(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e.value;
  }
  throw ConfigError("no residual named '" + name + "'");
}

double ResidualReport::max_checked() const {
  double m = 0.0;
  for (const auto& e : entries) {
    if (!e.informational) m = std::max(m, e.value);
  }
  return m;
}

ResidualReport identity_suite(const Grid& grid, std::uint64_t seed, int random_fields) {
  const QProfiles& p = q_profiles(grid);
  ResidualReport r;
  r.entries.push_back({"L_minus_Q", sup(apply(OperatorKind::L_minus, p.q))});
  r.entries.push_back({"L_plus_dxQ", sup(apply(OperatorKind::L_plus, p.dx_q))});
  r.entries.push_back({"L_plus_Qprime_plus_2Q", sup(apply(OperatorKind::L_plus, p.q_prime) + 2.0 * p.q)});
  r.entries.push_back({"L_minus_xQ_plus_2dxQ", sup(apply(OperatorKind::L_minus, p.x_q) + 2.0 * p.dx_q)});

  std::mt19937_64 rng(seed);
  double conj_e = 0.0, conj_o = 0.0, sigma1 = 0.0;
  for (int s = 0; s < random_fields; ++s) {
    const FieldPair f{random_field(grid, rng), random_field(grid, rng)};
    const FieldPair he = apply_p_inverse(apply(OperatorKind::H_e, apply_p(f)));
    const FieldPair ho = apply_p_inverse(apply(OperatorKind::H_o, apply_p(f)));
    const FieldPair he_explicit = apply(OperatorKind::PinvHeP, f);
    const FieldPair ho_explicit = apply(OperatorKind::PinvHoP, f);
    conj_e = std::max(conj_e, sup(he - he_explicit) / sup(he_explicit));
    conj_o = std::max(conj_o, sup(ho - ho_explicit) / sup(ho_explicit));
    const FieldPair swapped{he.second, he.first};
    sigma1 = std::max(sigma1, sup(ho - swapped) / sup(ho));
  }
  r.entries.push_back({"conjugation_He", conj_e});
  r.entries.push_back({"conjugation_Ho", conj_o});
  r.entries.push_back({"sigma1_relation", sigma1, true});
  return r;
}

ResidualReport root_space_check(const Grid& grid) {
  const QProfiles& p = q_profiles(grid);
  const Field zero(grid);
  ResidualReport r;
  auto outside_span = [](const Field& f, const Field& basis) {
    const cplx c = inner(f, basis) / inner(basis, basis);
    return sup(f - c * basis);
  };

  const FieldPair he_0q = apply(OperatorKind::PinvHeP, FieldPair{zero, p.q});
  r.entries.push_back({"He_kernel_0Q", sup(he_0q)});
  const FieldPair he_qp = apply(OperatorKind::PinvHeP, FieldPair{p.q_prime, zero});
  r.entries.push_back({"He_image_Qprime0_outside_span", std::max(sup(he_qp.first), outside_span(he_qp.second, p.q))});
  r.entries.push_back({"He_generalized_Qprime0", sup(apply(OperatorKind::PinvHeP, he_qp))});
  r.entries.push_back({"He_odd_kernel_dxQ0", sup(apply(OperatorKind::PinvHeP, FieldPair{p.dx_q, zero}))});
  const FieldPair he_xq = apply(OperatorKind::PinvHeP, FieldPair{zero, p.x_q});
  r.entries.push_back({"He_odd_generalized_0xQ", sup(apply(OperatorKind::PinvHeP, he_xq))});

  r.entries.push_back({"Ho_kernel_0dxQ", sup(apply(OperatorKind::PinvHoP, FieldPair{zero, p.dx_q}))});
  const FieldPair ho_xq = apply(OperatorKind::PinvHoP, FieldPair{p.x_q, zero});
  r.entries.push_back({"Ho_image_xQ0_outside_span", std::max(sup(ho_xq.first), outside_span(ho_xq.second, p.dx_q))});
  r.entries.push_back({"Ho_generalized_xQ0", sup(apply(OperatorKind::PinvHoP, ho_xq))});
  return r;
}

SpectrumReport discrete_spectrum(OperatorKind kind, int n_eigs, const Grid& grid, double zero_tolerance,
                                 double edge_tolerance) {
  if (n_eigs < 1) throw ConfigError("n_eigs must be positive");
  const OperatorHandle h(kind, grid);
  SpectrumReport rep;
  rep.kind = kind;
  std::vector<cplx> ev;

  const bool self_adjoint = kind == OperatorKind::L_plus || kind == OperatorKind::L_minus ||
                            kind == OperatorKind::free || is_real_linear(kind);
  if (self_adjoint) {
    const Eigen::MatrixXd m = h.real_block() ? h.real_matrix() : Eigen::MatrixXd(h.complex_matrix().real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd& vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) ev.emplace_back(vals[i], 0.0);
    const Field& q = q_profiles(grid).q;
    const Eigen::VectorXd phi = es.eigenvectors().col(0);
    const auto n = static_cast<Eigen::Index>(q.size());
    double dot = 0.0, qq = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      // For the real-block kinds the first half of phi is the real part.
      dot += phi[j] * q[static_cast<std::size_t>(j)].real();
      qq += std::norm(q[static_cast<std::size_t>(j)]);
    }
    rep.lowest_overlap_with_q = std::abs(dot) / (phi.norm() * std::sqrt(qq));
  } else if (kind == OperatorKind::H_e || kind == OperatorKind::H_o) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(h.complex_matrix().real(), false);
    const auto& vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) ev.push_back(vals[i]);
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.complex_matrix(), false);
    const auto& vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) ev.push_back(vals[i]);
  }

  std::stable_sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const cplx& l : ev) {
    const double m = std::abs(l);
    if (m <= zero_tolerance) {
      ++rep.zero_cluster;
    } else if (m < 1.0 - edge_tolerance) {
      ++rep.gap_count;
      rep.max_gap_magnitude = std::max(rep.max_gap_magnitude, m);
    }
  }
  if (static_cast<int>(ev.size()) > n_eigs) ev.resize(static_cast<std::size_t>(n_eigs));
  rep.eigenvalues = std::move(ev);
  return rep;
}

}  // namespace nnls
