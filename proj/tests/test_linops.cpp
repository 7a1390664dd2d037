#include <doctest.h>

#include "nnls/linops.hpp"
#include "nnls/solitons.hpp"
#include "support.hpp"

using namespace nnls;
using namespace nnls::test;

namespace {
const cplx I(0.0, 1.0);

Field real_of(const Field& f) {
  Field r(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) r[j] = f[j].real();
  return r;
}
Field imag_of(const Field& f) {
  Field r(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) r[j] = f[j].imag();
  return r;
}
double sup(const FieldPair& p) { return std::max(test::sup(p.first), test::sup(p.second)); }
}  // namespace

TEST_CASE("operator names") {
  for (auto k : {OperatorKind::L_plus, OperatorKind::L_minus, OperatorKind::calL_plus, OperatorKind::calL_minus,
                 OperatorKind::H_e, OperatorKind::H_o, OperatorKind::PinvHeP, OperatorKind::PinvHoP,
                 OperatorKind::free}) {
    CHECK(operator_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(operator_kind_from_string("nope"), ConfigError);
  CHECK(acts_on_pairs(OperatorKind::H_e));
  CHECK_FALSE(acts_on_pairs(OperatorKind::L_plus));
  CHECK(is_real_linear(OperatorKind::calL_minus));
}

TEST_CASE("kernel identities on the default grid") {
  const Grid g = default_grid();
  const QProfiles& p = q_profiles(g);
  CHECK(test::sup(apply(OperatorKind::L_minus, p.q)) < 1e-8);
  CHECK(test::sup(apply(OperatorKind::L_plus, p.dx_q)) < 1e-7);
  CHECK(test::sup(apply(OperatorKind::L_plus, p.q_prime) + 2.0 * p.q) < 1e-7);
  CHECK(test::sup(apply(OperatorKind::L_minus, p.x_q) + 2.0 * p.dx_q) < 1e-7);
  CHECK(test::sup(apply(OperatorKind::free, p.q) - (-derivative(p.q, 2) + p.q)) < 1e-14);
}

TEST_CASE("real-linear operators act blockwise on real and imaginary parts") {
  const Grid g = default_grid();
  std::mt19937_64 rng(67);
  for (int r = 0; r < 5; ++r) {
    const Field f = random_field(g, rng);
    const Field re = real_of(f), im = imag_of(f);
    const Field plus = apply(OperatorKind::L_minus, re) + I * apply(OperatorKind::L_plus, im);
    const Field minus = apply(OperatorKind::L_plus, re) + I * apply(OperatorKind::L_minus, im);
    CHECK(test::sup(apply(OperatorKind::calL_plus, f) - plus) < 1e-12);
    CHECK(test::sup(apply(OperatorKind::calL_minus, f) - minus) < 1e-12);
  }
}

TEST_CASE("argument shape and grid checks") {
  const Grid g(64, 20.0);
  const Field f(g);
  CHECK_THROWS_AS(apply(OperatorKind::H_e, f), ConfigError);
  CHECK_THROWS_AS(apply(OperatorKind::L_plus, FieldPair{f, f}), ConfigError);
  const OperatorHandle h(OperatorKind::L_plus, g);
  CHECK_THROWS_AS(h.apply(Field(Grid(128, 20.0))), GridMismatch);
  CHECK_THROWS_AS(h.apply(FieldPair{f, f}), ConfigError);
  CHECK_THROWS_AS(OperatorHandle(OperatorKind::free, Grid(4096, 40.0)), ConfigError);
  CHECK_THROWS_AS(discrete_spectrum(OperatorKind::free, 0, g), ConfigError);
}

TEST_CASE("dense matrices agree with matrix-free application") {
  const Grid g(128, 30.0);
  std::mt19937_64 rng(71);
  for (auto k : {OperatorKind::L_plus, OperatorKind::L_minus, OperatorKind::calL_plus, OperatorKind::calL_minus,
                 OperatorKind::H_e, OperatorKind::H_o, OperatorKind::PinvHeP, OperatorKind::PinvHoP,
                 OperatorKind::free}) {
    const OperatorHandle h(k, g);
    for (int r = 0; r < 3; ++r) {
      if (acts_on_pairs(k)) {
        const FieldPair f{random_field(g, rng), random_field(g, rng)};
        CHECK(sup(FieldPair{h.apply(f).first - apply(k, f).first, h.apply(f).second - apply(k, f).second}) < 1e-10);
      } else {
        const Field f = random_field(g, rng);
        CHECK(test::sup(h.apply(f) - apply(k, f)) < 1e-10);
      }
    }
  }
  // spectral second-derivative matrix against the spectral derivative
  const Eigen::MatrixXd d2 = second_derivative_matrix(g);
  const Field f = random_field(g, rng);
  const Field ref = derivative(real_of(f), 2);
  for (int j = 0; j < g.size(); ++j) {
    double acc = 0.0;
    for (int c = 0; c < g.size(); ++c) acc += d2(j, c) * f[static_cast<std::size_t>(c)].real();
    CHECK(std::abs(acc - ref[static_cast<std::size_t>(j)].real()) < 1e-10);
  }
}

TEST_CASE("L+ and L- are symmetric") {
  const Grid g = default_grid();
  std::mt19937_64 rng(73);
  for (int r = 0; r < 10; ++r) {
    const Field f = real_of(random_field(g, rng)), h = real_of(random_field(g, rng));
    for (auto k : {OperatorKind::L_plus, OperatorKind::L_minus}) {
      CHECK(std::abs(semi_inner(apply(k, f), h) - semi_inner(f, apply(k, h))) < 1e-9);
    }
  }
}

TEST_CASE("P conjugation") {
  const Grid g = default_grid();
  std::mt19937_64 rng(79);
  for (int r = 0; r < 5; ++r) {
    const FieldPair f{random_field(g, rng), random_field(g, rng)};
    const FieldPair back = apply_p_inverse(apply_p(f));
    CHECK(sup(FieldPair{back.first - f.first, back.second - f.second}) < 1e-14);
    const FieldPair lhs = apply_p_inverse(apply(OperatorKind::H_e, apply_p(f)));
    const FieldPair rhs = apply(OperatorKind::PinvHeP, f);
    CHECK(sup(FieldPair{lhs.first - rhs.first, lhs.second - rhs.second}) < 1e-10 * sup(rhs));
  }
}

TEST_CASE("identity suite") {
  const ResidualReport r = identity_suite(default_grid());
  for (const auto& e : r.entries) {
    MESSAGE(e.name << " = " << e.value);
    if (!e.informational) CHECK(e.value < 1e-7);
  }
  CHECK(r.at("conjugation_He") < 1e-10);
  CHECK(r.at("conjugation_Ho") < 1e-10);
  CHECK(r.at("sigma1_relation") > 0.1);  // the relation does not hold; reported only
  CHECK_THROWS_AS(r.at("missing"), ConfigError);

  const ResidualReport coarse = identity_suite(Grid(64, 20.0));
  CHECK(coarse.max_checked() < 1e-3);
}

TEST_CASE("identity residuals shrink under refinement") {
  ResidualReport prev = identity_suite(Grid(64, 40.0));
  for (int n : {128, 256}) {
    const ResidualReport next = identity_suite(Grid(n, 40.0));
    for (const auto& e : next.entries) {
      if (e.informational || e.name.rfind("conjugation", 0) == 0) continue;
      const double before = prev.at(e.name);
      MESSAGE(e.name << " n=" << n << ": " << before << " -> " << e.value);
      CHECK((e.value <= before / 10.0 || (e.value < 1e-10 && before < 1e-10)));
    }
    prev = next;
  }
}

TEST_CASE("root spaces at zero") {
  const ResidualReport r = root_space_check(default_grid());
  for (const auto& name : {"He_kernel_0Q", "He_image_Qprime0_outside_span", "He_odd_kernel_dxQ0", "Ho_kernel_0dxQ",
                           "Ho_image_xQ0_outside_span"}) {
    CHECK(r.at(name) < 1e-7);
  }
  for (const auto& name : {"He_generalized_Qprime0", "He_odd_generalized_0xQ", "Ho_generalized_xQ0"}) {
    CHECK(r.at(name) < 1e-6);
  }
}

TEST_CASE("spectra on a small grid") {
  const Grid g(256, 30.0);
  const SpectrumReport free = discrete_spectrum(OperatorKind::free, 4, g);
  CHECK(std::abs(free.eigenvalues.front()) >= 1.0 - 1e-6);
  CHECK(free.zero_cluster == 0);
  CHECK(free.gap_count == 0);

  const SpectrumReport lm = discrete_spectrum(OperatorKind::L_minus, 8, g);
  CHECK(lm.eigenvalues.size() == 8);
  CHECK(std::abs(lm.eigenvalues.front()) < 1e-8);
  CHECK(lm.lowest_overlap_with_q >= 0.999);
  for (const cplx& l : lm.eigenvalues) CHECK(l.real() > -1e-8);

  const SpectrumReport he = discrete_spectrum(OperatorKind::H_e, 16, g, 1e-4);
  CHECK(he.zero_cluster >= 2);
  CHECK(he.gap_count == 0);
  for (std::size_t i = 1; i < he.eigenvalues.size(); ++i) {
    CHECK(std::abs(he.eigenvalues[i]) >= std::abs(he.eigenvalues[i - 1]));
  }
}
