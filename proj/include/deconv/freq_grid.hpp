#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace deconv {

using cplx = std::complex<double>;

//! Symmetric uniform frequency grid -u_max..u_max, always containing 0.
struct FreqGrid
{
  double u_max;
  double step;
  std::size_t half;            // index of u = 0; points.size() == 2*half + 1
  std::vector<double> points;  // strictly increasing

  std::size_t size() const { return points.size(); }
  double at(std::size_t i) const { return points[i]; }
  //! grid point at index half + k, k = 0..half
  double nonneg(std::size_t k) const { return points[half + k]; }
};

inline FreqGrid make_grid(double u_max, double step)
{
  if (!(u_max > 0.0) || !(step > 0.0))
    throw std::invalid_argument("make_grid: u_max and step must be positive");
  const double ratio = u_max / step;
  const auto k = static_cast<long long>(std::llround(ratio));
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * ratio)
    throw std::invalid_argument("make_grid: step must divide u_max");

  FreqGrid g;
  g.u_max = u_max;
  g.step = step;
  g.half = static_cast<std::size_t>(k);
  g.points.resize(2 * g.half + 1);
  for (std::size_t i = 0; i < g.points.size(); ++i)
    g.points[i] = step * (static_cast<double>(i) - static_cast<double>(k));
  g.points[g.half] = 0.0;
  return g;
}

//! Scale v onto the closed unit disk; the loop absorbs the one-ulp
//! overshoot a single division can leave behind.
inline cplx clamp_modulus(cplx v)
{
  double mod = std::abs(v);
  while (mod > 1.0) {
    v /= mod;
    mod = std::abs(v);
    if (mod > 1.0) v *= 0x1.fffffffffffffp-1;
    mod = std::abs(v);
  }
  return v;
}

enum class Symmetry
{
  hermitian,       // value(-u) = conj(value(u))
  anti_hermitian,  // value(-u) = -conj(value(u))
  none
};

//! Complex-valued function sampled on a FreqGrid.
struct CfCurve
{
  FreqGrid grid;
  std::vector<cplx> values;
  Symmetry symmetry = Symmetry::none;

  cplx at(std::size_t i) const { return values[i]; }
  cplx at_zero() const { return values[grid.half]; }
  //! value at grid point u >= 0 with index half + k
  cplx nonneg(std::size_t k) const { return values[grid.half + k]; }
};

//! Build a full curve from values on u >= 0 by conjugate reflection.
inline CfCurve curve_from_half(const FreqGrid& grid,
                               std::vector<cplx> half_values,
                               Symmetry sym)
{
  if (half_values.size() != grid.half + 1)
    throw std::invalid_argument("curve_from_half: size mismatch");
  CfCurve c;
  c.grid = grid;
  c.symmetry = sym;
  c.values.resize(grid.size());
  const double sign = (sym == Symmetry::anti_hermitian) ? -1.0 : 1.0;
  for (std::size_t k = 0; k <= grid.half; ++k) {
    c.values[grid.half + k] = half_values[k];
    c.values[grid.half - k] = sign * std::conj(half_values[k]);
  }
  if (sym == Symmetry::anti_hermitian)
    c.values[grid.half] = half_values[0];  // keep the given value at u = 0
  return c;
}

//! n x 2 panel of repeated noisy observations of the same latent variable.
struct PanelSample
{
  std::vector<double> y1;
  std::vector<double> y2;

  std::size_t n() const { return y1.size(); }
};

inline void check_panel(const PanelSample& s)
{
  if (s.n() < 1 || s.y1.size() != s.y2.size())
    throw std::invalid_argument("PanelSample: need n >= 1 matched rows");
  for (std::size_t j = 0; j < s.n(); ++j)
    if (!std::isfinite(s.y1[j]) || !std::isfinite(s.y2[j]))
      throw std::invalid_argument("PanelSample: non-finite observation");
}

//! CSV dump, columns u,re,im.
inline void write_curve_csv(std::ostream& os, const CfCurve& c)
{
  os << "u,re,im\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i)
    os << c.grid.at(i) << ',' << c.values[i].real() << ',' << c.values[i].imag()
       << '\n';
}

}  // namespace deconv
