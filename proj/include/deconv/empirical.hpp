#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "freq_grid.hpp"

namespace deconv {

//! Unnormalized sums S(u) = sum_j e^{iu y2_j} and T(u) = sum_j i y1_j e^{iu y2_j}
//! on the non-negative half of a grid.  Evaluated by phase recurrence along
//! the uniform grid, so the cost is O(n * grid.half) without trig calls in
//! the inner loop.
struct HalfSums
{
  std::vector<cplx> s;  // size grid.half + 1
  std::vector<cplx> t;
  double count = 0;
};

inline HalfSums accumulate_half_sums(std::span<const double> y1,
                                     std::span<const double> y2,
                                     const FreqGrid& grid)
{
  HalfSums out;
  out.s.assign(grid.half + 1, cplx(0.0, 0.0));
  out.t.assign(grid.half + 1, cplx(0.0, 0.0));
  out.count = static_cast<double>(y1.size());
  const cplx i(0.0, 1.0);
  for (std::size_t j = 0; j < y1.size(); ++j) {
    const cplx rot = std::polar(1.0, grid.step * y2[j]);
    const cplx iy1 = i * y1[j];
    cplx phase(1.0, 0.0);
    for (std::size_t k = 0; k <= grid.half; ++k) {
      out.s[k] += phase;
      out.t[k] += iy1 * phase;
      phase *= rot;
    }
  }
  // u = 0 entries are exact by construction
  out.s[0] = cplx(out.count, 0.0);
  return out;
}

inline HalfSums accumulate_half_sums(const PanelSample& sample, const FreqGrid& grid)
{
  return accumulate_half_sums(sample.y1, sample.y2, grid);
}

//! psi_hat(0, u) = (1/n) sum_j e^{iu Y_{j,2}}
inline CfCurve empirical_cf_marginal(const PanelSample& sample, const FreqGrid& grid)
{
  check_panel(sample);
  const auto sums = accumulate_half_sums(sample, grid);
  std::vector<cplx> half(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    // a mean of unit phasors never exceeds 1; clamp the phase-recurrence ulp
    half[k] = clamp_modulus(sums.s[k] / sums.count);
  }
  half[0] = cplx(1.0, 0.0);
  return curve_from_half(grid, std::move(half), Symmetry::hermitian);
}

//! dpsi_hat/du1(0, u) = (1/n) sum_j i Y_{j,1} e^{iu Y_{j,2}}
inline CfCurve empirical_cf_partial(const PanelSample& sample, const FreqGrid& grid)
{
  check_panel(sample);
  const auto sums = accumulate_half_sums(sample, grid);
  std::vector<cplx> half(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) half[k] = sums.t[k] / sums.count;
  return curve_from_half(grid, std::move(half), Symmetry::anti_hermitian);
}

inline cplx truncate_value(cplx v, double sqrt_n)
{
  const double mod = std::abs(v);
  if (mod == 0.0) return cplx(1.0 / sqrt_n, 0.0);  // phase 0 by convention
  const double denom = std::min(sqrt_n * mod, 1.0);
  return v / denom;
}

//! Floors the modulus at n^{-1/2} without touching the phase.
inline CfCurve regularize_truncate(const CfCurve& curve, std::size_t n)
{
  if (n < 1) throw std::invalid_argument("regularize_truncate: n must be >= 1");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  CfCurve out = curve;
  for (auto& v : out.values) v = truncate_value(v, sqrt_n);
  return out;
}

}  // namespace deconv
