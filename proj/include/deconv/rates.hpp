#pragma once

#include <algorithm>
#include <stdexcept>

namespace deconv {

//! Smoothness description of one density: |phi(u)| ~ (1+C|u|^2)^{-beta/2} e^{-c|u|^rho}.
//! c = 0 is the ordinary smooth case, c > 0 the supersmooth one.
struct RateSpec
{
  double beta = 0.0;
  double c = 0.0;
  double rho = 0.0;
};

enum class RateTarget
{
  density_x,
  density_eps
};

//! Convergence rate n^{-poly_exponent} (log n)^{log_exponent}.
struct RateDescriptor
{
  double poly_exponent;
  double log_exponent;
};

namespace detail {
inline double pos(double v) { return std::max(v, 0.0); }
}

//! Closed-form minimax-type rate of the kernel estimators under the
//! polynomial/exponential smoothness classes, for moment order p >= 2.
//! The doubly supersmooth combination is not covered.
inline RateDescriptor predicted_rate(RateTarget target,
                                     const RateSpec& x,
                                     const RateSpec& eps,
                                     std::size_t p)
{
  if (p < 2) throw std::invalid_argument("predicted_rate: p must be >= 2");
  if (x.c < 0.0 || eps.c < 0.0)
    throw std::invalid_argument("predicted_rate: c must be >= 0");
  if (x.c > 0.0 && eps.c > 0.0)
    throw std::invalid_argument(
      "predicted_rate: both densities supersmooth is unsupported");
  if ((x.c > 0.0 && !(x.rho > 0.0)) || (eps.c > 0.0 && !(eps.rho > 0.0)))
    throw std::invalid_argument("predicted_rate: supersmooth case needs rho > 0");

  const double bx = x.beta;
  const double be = eps.beta;
  const double pd = static_cast<double>(p);

  if (target == RateTarget::density_x) {
    if (!(bx > 0.5))
      throw std::invalid_argument("predicted_rate: need beta_x > 1/2");
    if (x.c == 0.0 && eps.c == 0.0) {
      // ordinary x ordinary
      return { (2.0 * bx - 1.0) / (2.0 * be + 2.0 * (1.0 + 1.0 / pd) * bx + 1.0),
               0.0 };
    }
    if (x.c == 0.0) {
      // supersmooth errors: pure log rate
      return { 0.0, -(2.0 * bx - 1.0) / eps.rho };
    }
    // supersmooth target, ordinary errors
    const double g1 = -2.0 * bx + 1.0 - x.rho;
    const double g3 =
      detail::pos(pd * detail::pos(2.0 * bx + 2.0 * be + 1.0 - x.rho) + 1.0 - x.rho);
    return { pd / (pd + 1.0),
             (pd / (pd + 1.0) * g1 + 1.0 / (pd + 1.0) * g3) / x.rho };
  }

  // residual density
  if (!(be > 0.5))
    throw std::invalid_argument("predicted_rate: need beta_eps > 1/2");
  if (x.c == 0.0 && eps.c == 0.0) {
    return { (2.0 * be - 1.0) * (pd - 1.0) /
               (2.0 * (pd + 1.0) * bx + 2.0 * pd * be + pd),
             0.0 };
  }
  if (x.c > 0.0) {
    // supersmooth contamination: pure log rate
    return { 0.0, -(2.0 * be - 1.0) / x.rho };
  }
  // supersmooth residuals, ordinary target
  const double g1 = -2.0 * be + 1.0 - eps.rho;
  const double g3 = detail::pos(detail::pos(2.0 * bx + 2.0 * be + 1.0 - eps.rho) +
                                2.0 * bx + 1.0 - eps.rho);
  return { (pd - 1.0) / pd,
           ((pd - 1.0) / pd * g1 + 1.0 / pd * g3) / eps.rho };
}

}  // namespace deconv
