#pragma once

// Linearized operators at the ground state Q.
//
//   L+ = -dx^2 + 1 - 3Q^2,   L- = -dx^2 + 1 - Q^2          (complex linear)
//   calL+- v = -v_xx + v - 2Q^2 v +- Q^2 conj(v)           (real linear)
//   H_e = (-dx^2 + 1) s3 + Q^2 [[-2, -1], [1, 2]],   H_o = H_e^t
//   P = [[1, i], [1, -i]] / sqrt(2),   P^{-1} = P^dagger
//
// Conjugation by P gives
//   P^{-1} H_e P = [[0, i L-], [-i L+, 0]],   P^{-1} H_o P = [[0, i L+], [-i L-, 0]].
// "free" is -dx^2 + 1.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nnls/field.hpp"

namespace nnls {

enum class OperatorKind { L_plus, L_minus, calL_plus, calL_minus, H_e, H_o, PinvHeP, PinvHoP, free };

std::string to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& s);
bool acts_on_pairs(OperatorKind k);
bool is_real_linear(OperatorKind k);

struct FieldPair {
  Field first;
  Field second;
};

/// Matrix-free application. Throws ConfigError when the kind expects the
/// other argument shape.
Field apply(OperatorKind k, const Field& f);
FieldPair apply(OperatorKind k, const FieldPair& f);

/// P f and P^{-1} f, pointwise.
FieldPair apply_p(const FieldPair& f);
FieldPair apply_p_inverse(const FieldPair& f);

/// Dense representation. Complex-linear kinds are stored as a complex matrix of
/// size n (scalar) or 2n (pair). calL+- are stored as a real 2n x 2n matrix on
/// the stacked vector (Re v, Im v).
class OperatorHandle {
 public:
  /// Throws ConfigError for n > 2048.
  OperatorHandle(OperatorKind kind, const Grid& grid);

  OperatorKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  bool real_block() const { return is_real_linear(kind_); }
  const Eigen::MatrixXcd& complex_matrix() const { return complex_; }
  const Eigen::MatrixXd& real_matrix() const { return real_; }

  /// Throws GridMismatch or ConfigError on a wrong grid or shape.
  Field apply(const Field& f) const;
  FieldPair apply(const FieldPair& f) const;

 private:
  OperatorKind kind_;
  Grid grid_;
  Eigen::MatrixXcd complex_;
  Eigen::MatrixXd real_;
};

/// Dense spectral second-derivative matrix.
Eigen::MatrixXd second_derivative_matrix(const Grid& grid);

struct Residual {
  std::string name;
  double value = 0.0;
  bool informational = false;  // reported, not an expected zero
};

struct ResidualReport {
  std::vector<Residual> entries;
  double at(const std::string& name) const;
  /// Largest value among non-informational entries.
  double max_checked() const;
};

/// Sup-norm residuals of
///   L_minus_Q, L_plus_dxQ, L_plus_Qprime_plus_2Q, L_minus_xQ_plus_2dxQ,
///   conjugation_He, conjugation_Ho  (relative, max over random pairs),
///   sigma1_relation                 (relative, informational).
ResidualReport identity_suite(const Grid& grid, std::uint64_t seed = 1, int random_fields = 20);

/// Root spaces at zero of the P-conjugated operators:
///   He_kernel_0Q, He_generalized_Qprime0 (second application),
///   He_image_Qprime0_outside_span (first image minus its projection on (0, Q)),
///   He_odd_kernel_dxQ0, He_odd_generalized_0xQ,
///   Ho_kernel_0dxQ, Ho_generalized_xQ0, Ho_image_xQ0_outside_span.
ResidualReport root_space_check(const Grid& grid);

struct SpectrumReport {
  OperatorKind kind = OperatorKind::H_e;
  std::vector<cplx> eigenvalues;  // sorted by modulus, at most n_eigs
  int zero_cluster = 0;           // eigenvalues with |lambda| <= zero_tolerance
  int gap_count = 0;              // zero_tolerance < |lambda| < 1 - edge_tolerance
  double max_gap_magnitude = 0.0; // largest |lambda| counted in gap_count (0 if none)
  /// For self-adjoint kinds: |<phi_0, Q>| / (|phi_0| |Q|) for the lowest eigenvector.
  double lowest_overlap_with_q = 0.0;
};

/// Dense eigendecomposition. Throws ConfigError for n > 2048 or n_eigs < 1.
SpectrumReport discrete_spectrum(OperatorKind kind, int n_eigs, const Grid& grid, double zero_tolerance = 1e-3,
                                 double edge_tolerance = 1e-3);

}  // namespace nnls
