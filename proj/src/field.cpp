#include "nnls/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

namespace nnls {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<cplx> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

Grid::Impl::Impl(int n_, double length_) : n(n_), length(length_) {
  const double dx = length / n;
  points.resize(n);
  wavenumbers.resize(n);
  for (int j = 0; j < n; ++j) {
    points[j] = -0.5 * length + j * dx;
    const int m = j < n / 2 ? j : j - n;
    wavenumbers[j] = 2.0 * std::numbers::pi * m / length;
  }
  std::vector<cplx> scratch(n);
  auto* buf = as_fftw(scratch);
  // FFTW_ESTIMATE keeps plan selection deterministic across runs.
  std::lock_guard lock(planner_mutex());
  plan_forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Grid::Impl::~Impl() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward));
}

Grid::Grid(int n, double length) {
  if (n < 16 || (n & (n - 1)) != 0) {
    throw ConfigError("grid size must be a power of two >= 16, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("grid length must be positive");
  }
  impl_ = std::make_shared<const Impl>(n, length);
}

Grid make_grid(int n, double length) { return Grid(n, length); }

double Grid::max_wavenumber() const { return std::numbers::pi * size() / length(); }

void Grid::forward(std::span<cplx> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(impl_->plan_forward), as_fftw(data), as_fftw(data));
}

void Grid::backward(std::span<cplx> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(impl_->plan_backward), as_fftw(data), as_fftw(data));
}

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size()) {}

Field::Field(Grid grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.size())) {
    throw ConfigError("field length does not match grid size");
  }
}

Field Field::from_function(const Grid& grid, const std::function<cplx(double)>& f) {
  Field out(grid);
  const auto x = grid.points();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = f(x[j]);
  return out;
}

Field Field::from_real(const Grid& grid, std::span<const double> values) {
  std::vector<cplx> v(values.begin(), values.end());
  return Field(grid, std::move(v));
}

bool Field::is_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void Field::require_same_grid(const Field& other) const {
  if (!(grid_ == other.grid_)) throw GridMismatch();
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

Field& Field::operator*=(cplx scale) {
  for (auto& z : values_) z *= scale;
  return *this;
}

Field multiply(const Field& a, const Field& b) {
  a.require_same_grid(b);
  Field out(a.grid());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

Field multiply(const Field& a, std::span<const double> weight) {
  Field out(a.grid());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * weight[j];
  return out;
}

Field conj(const Field& f) {
  Field out(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = std::conj(f[j]);
  return out;
}

std::vector<double> real_part(const Field& f) {
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = f[j].real();
  return out;
}

std::vector<double> imag_part(const Field& f) {
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = f[j].imag();
  return out;
}

SpectralField to_spectral(const Field& f) {
  SpectralField s{f.grid(), std::vector<cplx>(f.values().begin(), f.values().end())};
  f.grid().forward(s.coeffs);
  return s;
}

Field from_spectral(const SpectralField& s) {
  std::vector<cplx> v = s.coeffs;
  s.grid.backward(v);
  const double inv_n = 1.0 / s.grid.size();
  for (auto& z : v) z *= inv_n;
  return Field(s.grid, std::move(v));
}

Field reflect(const Field& f) {
  const std::size_t n = f.size();
  Field out(f.grid());
  out[0] = f[0];
  for (std::size_t j = 1; j < n; ++j) out[j] = f[n - j];
  return out;
}

Field reflect_conjugate(const Field& f) {
  const std::size_t n = f.size();
  Field out(f.grid());
  out[0] = std::conj(f[0]);
  for (std::size_t j = 1; j < n; ++j) out[j] = std::conj(f[n - j]);
  return out;
}

Field reflect_conjugate_spectral(const Field& f) {
  // With x_0 = -L/2 the physical-phase factor (-1)^m is real, so the
  // coefficients of f* are exactly the conjugated coefficients of f.
  auto s = to_spectral(f);
  for (auto& c : s.coeffs) c = std::conj(c);
  return from_spectral(s);
}

Field derivative(const Field& f, int order) {
  if (order != 1 && order != 2) {
    throw ConfigError("derivative order must be 1 or 2, got " + std::to_string(order));
  }
  auto s = to_spectral(f);
  const auto k = f.grid().wavenumbers();
  const std::size_t nyquist = f.size() / 2;
  for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
    if (order == 1) {
      s.coeffs[m] *= (m == nyquist) ? cplx(0.0) : cplx(0.0, k[m]);
    } else {
      s.coeffs[m] *= -k[m] * k[m];
    }
  }
  return from_spectral(s);
}

cplx inner_hs(const Field& u, const Field& v, double s) {
  u.require_same_grid(v);
  const auto su = to_spectral(u);
  const auto sv = to_spectral(v);
  const auto k = u.grid().wavenumbers();
  cplx acc = 0.0;
  for (std::size_t m = 0; m < su.coeffs.size(); ++m) {
    const double w = s == 0.0 ? 1.0 : std::pow(1.0 + std::abs(k[m]), 2.0 * s);
    acc += w * su.coeffs[m] * std::conj(sv.coeffs[m]);
  }
  // Parseval: dx * sum |f_j|^2 = (dx / n) * sum |F_m|^2.
  return acc * (u.grid().spacing() / u.size());
}

double norm_hs(const Field& f, double s) { return std::sqrt(std::max(0.0, inner_hs(f, f, s).real())); }

double norm_lp(const Field& f, double p) {
  if (!(p >= 1.0)) throw ConfigError("L^p norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& z : f.values()) m = std::max(m, std::abs(z));
    return m;
  }
  double acc = 0.0;
  for (const auto& z : f.values()) acc += std::pow(std::abs(z), p);
  return std::pow(acc * f.grid().spacing(), 1.0 / p);
}

cplx inner(const Field& u, const Field& v) {
  u.require_same_grid(v);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += u[j] * std::conj(v[j]);
  return acc * u.grid().spacing();
}

double semi_inner(const Field& u, const Field& v) { return inner(u, v).real(); }

std::pair<Field, Field> even_odd_split(const Field& f) {
  const Field r = reflect(f);
  Field even(f.grid()), odd(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) {
    even[j] = 0.5 * (f[j] + r[j]);
    odd[j] = 0.5 * (f[j] - r[j]);
  }
  return {std::move(even), std::move(odd)};
}

}  // namespace nnls
