#pragma once

// Periodic grid, sampled complex fields and the spectral calculus used by every
// other module.
//
// Wavenumber ordering follows FFTW: index m < n/2 carries k = 2*pi*m/length,
// index m >= n/2 carries k = 2*pi*(m-n)/length. The Nyquist mode sits at
// m = n/2 with a negative wavenumber. Fourier coefficients are unnormalised
// sums over grid indices; from_spectral divides by n.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "nnls/error.hpp"

namespace nnls {

using cplx = std::complex<double>;

class Grid {
 public:
  /// Throws ConfigError unless n >= 16 is a power of two and length > 0.
  Grid(int n, double length);

  int size() const { return impl_->n; }
  double length() const { return impl_->length; }
  double spacing() const { return impl_->length / impl_->n; }
  std::span<const double> points() const { return impl_->points; }
  std::span<const double> wavenumbers() const { return impl_->wavenumbers; }
  double max_wavenumber() const;

  /// In-place unnormalised forward/backward DFT. Thread-safe.
  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.impl_ == b.impl_ || (a.size() == b.size() && a.length() == b.length());
  }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;

  struct Impl {
    Impl(int n, double length);
    ~Impl();
    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;
    int n;
    double length;
    std::vector<double> points;
    std::vector<double> wavenumbers;
    void* plan_forward = nullptr;
    void* plan_backward = nullptr;
  };
};

Grid make_grid(int n, double length);

/// Complex samples on a Grid. A value type; operations return new fields.
class Field {
 public:
  explicit Field(Grid grid);
  Field(Grid grid, std::vector<cplx> values);

  static Field from_function(const Grid& grid, const std::function<cplx(double)>& f);
  static Field from_real(const Grid& grid, std::span<const double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx operator[](std::size_t j) const { return values_[j]; }
  cplx& operator[](std::size_t j) { return values_[j]; }

  bool is_finite() const;
  void require_same_grid(const Field& other) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx scale);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator-(Field a) { return a *= -1.0; }
  friend Field operator*(cplx s, Field a) { return a *= s; }
  friend Field operator*(Field a, cplx s) { return a *= s; }

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

/// Pointwise product.
Field multiply(const Field& a, const Field& b);
/// Pointwise product with a real profile (same length as the grid).
Field multiply(const Field& a, std::span<const double> weight);
Field conj(const Field& f);
std::vector<double> real_part(const Field& f);
std::vector<double> imag_part(const Field& f);

struct SpectralField {
  Grid grid;
  std::vector<cplx> coeffs;
};

SpectralField to_spectral(const Field& f);
Field from_spectral(const SpectralField& s);

/// f(-x) by index reversal j -> (n - j) mod n.
Field reflect(const Field& f);
/// f*(x) = conj(f(-x)), computed in physical space.
Field reflect_conjugate(const Field& f);
/// Same operator, computed by conjugating the Fourier coefficients.
Field reflect_conjugate_spectral(const Field& f);

/// Spectral d/dx (order 1, Nyquist mode dropped) or d^2/dx^2 (order 2).
Field derivative(const Field& f, int order);

/// Sobolev norm with weight (1 + |k|)^(2s); s = 0 is the L2 norm.
double norm_hs(const Field& f, double s);
/// (u, v)_{H^s} with the same weight as norm_hs.
cplx inner_hs(const Field& u, const Field& v, double s);
/// Rectangle-rule L^p norm; p = infinity gives the maximum modulus.
double norm_lp(const Field& f, double p);
/// (u, v) = int u conj(v) dx.
cplx inner(const Field& u, const Field& v);
/// <u | v> = Re (u, v).
double semi_inner(const Field& u, const Field& v);

/// Returns (f_e, f_o) with f_e(x) = (f(x) + f(-x)) / 2.
std::pair<Field, Field> even_odd_split(const Field& f);

}  // namespace nnls
