#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "empirical.hpp"
#include "freq_grid.hpp"

namespace deconv {

struct EstimatorDiagnostics
{
  CfCurve cumulative_integral;  // exponent I(u) = int_0^u dpsi/psi~
  double clip_fraction = 0.0;
  double truncation_fraction = 0.0;
};

//! exp of the cumulative trapezoidal integral of num/den over [0,u],
//! extended to u < 0 by conjugate reflection.  The workhorse behind both
//! the modified and the raw log-derivative estimators; also reused on the
//! analytic oracle path in the tests.
inline std::pair<CfCurve, CfCurve> cf_from_log_derivative(
  const FreqGrid& grid,
  const std::vector<cplx>& num_half,
  const std::vector<cplx>& den_half,
  bool clip,
  double* clip_fraction = nullptr)
{
  if (num_half.size() != grid.half + 1 || den_half.size() != grid.half + 1)
    throw std::invalid_argument("cf_from_log_derivative: size mismatch");

  std::vector<cplx> integral(grid.half + 1);
  integral[0] = 0.0;
  cplx prev = num_half[0] / den_half[0];
  for (std::size_t k = 1; k <= grid.half; ++k) {
    const cplx cur = num_half[k] / den_half[k];
    integral[k] = integral[k - 1] + 0.5 * grid.step * (prev + cur);
    prev = cur;
  }

  std::vector<cplx> phi(grid.half + 1);
  std::size_t clipped = 0;
  for (std::size_t k = 0; k <= grid.half; ++k) {
    phi[k] = std::exp(integral[k]);
    if (clip && std::abs(phi[k]) > 1.0) {
      phi[k] = clamp_modulus(phi[k]);
      ++clipped;
    }
  }
  phi[0] = 1.0;

  if (clip_fraction)
    *clip_fraction = static_cast<double>(clipped) / static_cast<double>(grid.half + 1);

  return { curve_from_half(grid, std::move(phi), Symmetry::hermitian),
           curve_from_half(grid, std::move(integral), Symmetry::hermitian) };
}

//! Clipped estimator on the non-negative half grid, straight from the raw
//! sums S, T of a subsample of size n.  Used by the cross-validation folds,
//! where full curves would be wasted work.
inline std::vector<cplx> kotlarski_half_from_sums(const FreqGrid& grid,
                                                  const std::vector<cplx>& s,
                                                  const std::vector<cplx>& t,
                                                  double n)
{
  const double sqrt_n = std::sqrt(n);
  std::vector<cplx> phi(grid.half + 1);
  cplx integral = 0.0;
  cplx prev = (t[0] / n) / truncate_value(cplx(1.0, 0.0), sqrt_n);
  phi[0] = 1.0;
  for (std::size_t k = 1; k <= grid.half; ++k) {
    const cplx cur = (t[k] / n) / truncate_value(s[k] / n, sqrt_n);
    integral += 0.5 * grid.step * (prev + cur);
    prev = cur;
    phi[k] = clamp_modulus(std::exp(integral));
  }
  return phi;
}

//! Modified log-derivative estimator of phi_X: truncated denominator and
//! pointwise clipping of the modulus at 1.
inline std::pair<CfCurve, EstimatorDiagnostics> kotlarski_cf(
  const PanelSample& sample, const FreqGrid& grid)
{
  check_panel(sample);
  const auto sums = accumulate_half_sums(sample, grid);
  const double n = sums.count;
  const double sqrt_n = std::sqrt(n);

  std::vector<cplx> num(grid.half + 1), den(grid.half + 1);
  std::size_t truncated = 0;
  for (std::size_t k = 0; k <= grid.half; ++k) {
    num[k] = sums.t[k] / n;
    const cplx psi = (k == 0) ? cplx(1.0, 0.0) : sums.s[k] / n;
    if (sqrt_n * std::abs(psi) < 1.0) ++truncated;
    den[k] = truncate_value(psi, sqrt_n);
  }

  EstimatorDiagnostics diag;
  diag.truncation_fraction =
    static_cast<double>(truncated) / static_cast<double>(grid.half + 1);
  auto [phi, integral] =
    cf_from_log_derivative(grid, num, den, /*clip=*/true, &diag.clip_fraction);
  diag.cumulative_integral = std::move(integral);
  return { std::move(phi), std::move(diag) };
}

//! Raw log-derivative estimator: untruncated denominator, no clipping.
inline CfCurve li_vuong_cf(const PanelSample& sample, const FreqGrid& grid)
{
  check_panel(sample);
  const auto sums = accumulate_half_sums(sample, grid);
  const double n = sums.count;

  std::vector<cplx> num(grid.half + 1), den(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    num[k] = sums.t[k] / n;
    den[k] = (k == 0) ? cplx(1.0, 0.0) : sums.s[k] / n;
    if (den[k] == cplx(0.0, 0.0))
      throw std::runtime_error(
        "li_vuong_cf: empirical CF vanishes at u = " + std::to_string(grid.nonneg(k)));
  }
  return cf_from_log_derivative(grid, num, den, /*clip=*/false).first;
}

//! Plug-in estimator of phi_eps: psi_hat(0,u) over the truncated phi_hat_X.
inline CfCurve residual_cf(const PanelSample& sample, const FreqGrid& grid)
{
  check_panel(sample);
  const auto sums = accumulate_half_sums(sample, grid);
  const double n = sums.count;
  const double sqrt_n = std::sqrt(n);

  const CfCurve phi_x = kotlarski_cf(sample, grid).first;
  std::vector<cplx> half(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    const cplx psi = (k == 0) ? cplx(1.0, 0.0) : sums.s[k] / n;
    half[k] = psi / truncate_value(phi_x.nonneg(k), sqrt_n);
  }
  half[0] = 1.0;
  return curve_from_half(grid, std::move(half), Symmetry::hermitian);
}

//! Baseline estimator valid only under symmetric errors: phi_eps^2 is read
//! off the differences Y1 - Y2, the principal real root is taken and floored
//! at n^{-1/2} before dividing it out of psi_hat(0,u).
inline CfCurve symmetric_cf(const PanelSample& sample, const FreqGrid& grid)
{
  check_panel(sample);
  const auto sums = accumulate_half_sums(sample, grid);
  const double n = sums.count;
  const double floor = 1.0 / std::sqrt(n);

  // cos-transform of the within-row differences, by the same phase recurrence
  std::vector<double> psi_delta(grid.half + 1, 0.0);
  for (std::size_t j = 0; j < sample.n(); ++j) {
    const double d = sample.y1[j] - sample.y2[j];
    const cplx rot = std::polar(1.0, grid.step * d);
    cplx phase(1.0, 0.0);
    for (std::size_t k = 0; k <= grid.half; ++k) {
      psi_delta[k] += phase.real();
      phase *= rot;
    }
  }

  std::vector<cplx> half(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    const double denom =
      std::max(std::sqrt(std::max(psi_delta[k] / n, 0.0)), floor);
    const cplx psi = (k == 0) ? cplx(1.0, 0.0) : sums.s[k] / n;
    half[k] = psi / denom;
  }
  half[0] = 1.0;
  return curve_from_half(grid, std::move(half), Symmetry::hermitian);
}

// --------------------------------------------------------------------------
// Kernel smoothing and Fourier inversion

enum class KernelKind
{
  sinc,     // FK = indicator of [-1,1]
  gaussian  // FK(u) = exp(-u^2/2)
};

inline double fourier_kernel_value(KernelKind kind, double h, double u)
{
  if (kind == KernelKind::sinc)
    return (std::abs(u) <= (1.0 / h) * (1.0 + 1e-12)) ? 1.0 : 0.0;
  const double hu = h * u;
  return std::exp(-0.5 * hu * hu);
}

inline std::vector<double> fourier_kernel(KernelKind kind, double h, const FreqGrid& grid)
{
  if (!(h > 0.0)) throw std::invalid_argument("fourier_kernel: h must be positive");
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    w[i] = fourier_kernel_value(kind, h, grid.at(i));
  return w;
}

struct DensityCurve
{
  std::vector<double> x;
  std::vector<double> f;
};

inline std::vector<double> make_x_grid(double lo, double hi, double step)
{
  std::vector<double> x;
  const auto m = static_cast<std::size_t>(std::llround((hi - lo) / step));
  x.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i) x.push_back(lo + step * static_cast<double>(i));
  return x;
}

//! Kernel-smoothed Fourier inversion
//!   f(x) = (1/2pi) int e^{-iux} phi(u) FK_h(u) du
//! by trapezoid over the curve's grid; the hermitian halves are paired so
//! the output is exactly real.
inline DensityCurve density_from_cf(const CfCurve& cf,
                                    KernelKind kind,
                                    double h,
                                    const std::vector<double>& x_points)
{
  if (!(h > 0.0)) throw std::invalid_argument("density_from_cf: h must be positive");
  if (cf.symmetry != Symmetry::hermitian)
    throw std::invalid_argument("density_from_cf: curve must be hermitian");
  const FreqGrid& grid = cf.grid;
  if (kind == KernelKind::gaussian && grid.u_max < 6.0 / h - 1e-9)
    throw std::invalid_argument(
      "density_from_cf: grid too short for gaussian kernel, need u_max >= 6/h");
  if (kind == KernelKind::sinc && grid.u_max < 1.0 / h - 1e-9)
    throw std::invalid_argument(
      "density_from_cf: grid too short for sinc cutoff 1/h");

  // weighted half-curve, trapezoid end weight folded in
  std::vector<cplx> g(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    g[k] = cf.nonneg(k) * fourier_kernel_value(kind, h, grid.nonneg(k));
    if (k == grid.half) g[k] *= 0.5;
  }

  DensityCurve out;
  out.x = x_points;
  out.f.resize(x_points.size());
  const double scale = grid.step / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < x_points.size(); ++i) {
    const cplx rot = std::polar(1.0, -grid.step * x_points[i]);
    cplx phase = rot;
    double acc = g[0].real();  // u = 0 term, counted once
    for (std::size_t k = 1; k <= grid.half; ++k) {
      acc += 2.0 * (g[k] * phase).real();
      phase *= rot;
    }
    out.f[i] = scale * acc;
  }
  return out;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y)
{
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

inline double integral(const DensityCurve& d) { return trapezoid(d.x, d.f); }

//! CSV dump, columns x,f.
inline void write_density_csv(std::ostream& os, const DensityCurve& d)
{
  os << "x,f\n";
  for (std::size_t i = 0; i < d.x.size(); ++i)
    os << d.x[i] << ',' << d.f[i] << '\n';
}

}  // namespace deconv
