#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "freq_grid.hpp"

namespace deconv {

struct GammaModel
{
  double shape;
  double rate;
  double shift = 0.0;
};

//! Difference of two independent gammas: G1 - G2, G1 ~ Gamma(a1,l1),
//! G2 ~ Gamma(a2,l2).  CF (1 - iu/l1)^{-a1} (1 + iu/l2)^{-a2}.
struct BilateralGammaModel
{
  double a1, l1, a2, l2;
};

struct NormalModel
{
  double mean;
  double variance;
};

struct MixtureComponent
{
  double weight;
  double mean;
  double variance;
};

struct NormalMixtureModel
{
  std::vector<MixtureComponent> components;
};

using ModelSpec =
  std::variant<GammaModel, BilateralGammaModel, NormalModel, NormalMixtureModel>;

inline void validate_model(const ModelSpec& m)
{
  std::visit(
    [](const auto& v) {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, GammaModel>) {
        if (!(v.shape > 0.0) || !(v.rate > 0.0))
          throw std::invalid_argument("gamma: shape and rate must be positive");
      } else if constexpr (std::is_same_v<T, BilateralGammaModel>) {
        if (!(v.a1 > 0.0) || !(v.l1 > 0.0) || !(v.a2 > 0.0) || !(v.l2 > 0.0))
          throw std::invalid_argument("bgamma: all parameters must be positive");
      } else if constexpr (std::is_same_v<T, NormalModel>) {
        if (!(v.variance > 0.0))
          throw std::invalid_argument("normal: variance must be positive");
      } else {
        if (v.components.empty())
          throw std::invalid_argument("mixnormal: needs at least one component");
        double wsum = 0.0;
        for (const auto& c : v.components) {
          if (!(c.weight > 0.0) || c.weight >= 1.0 + 1e-12)
            throw std::invalid_argument("mixnormal: weights must lie in (0,1]");
          if (!(c.variance > 0.0))
            throw std::invalid_argument("mixnormal: variances must be positive");
          wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-9)
          throw std::invalid_argument("mixnormal: weights must sum to 1");
      }
    },
    m);
}

inline double mean(const ModelSpec& m)
{
  return std::visit(
    [](const auto& v) -> double {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, GammaModel>)
        return v.shape / v.rate + v.shift;
      else if constexpr (std::is_same_v<T, BilateralGammaModel>)
        return v.a1 / v.l1 - v.a2 / v.l2;
      else if constexpr (std::is_same_v<T, NormalModel>)
        return v.mean;
      else {
        double s = 0.0;
        for (const auto& c : v.components) s += c.weight * c.mean;
        return s;
      }
    },
    m);
}

inline double variance(const ModelSpec& m)
{
  return std::visit(
    [&](const auto& v) -> double {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, GammaModel>)
        return v.shape / (v.rate * v.rate);
      else if constexpr (std::is_same_v<T, BilateralGammaModel>)
        return v.a1 / (v.l1 * v.l1) + v.a2 / (v.l2 * v.l2);
      else if constexpr (std::is_same_v<T, NormalModel>)
        return v.variance;
      else {
        double m1 = 0.0, m2 = 0.0;
        for (const auto& c : v.components) {
          m1 += c.weight * c.mean;
          m2 += c.weight * (c.variance + c.mean * c.mean);
        }
        return m2 - m1 * m1;
      }
    },
    m);
}

//! Closed-form characteristic function at a single frequency.
inline cplx cf_value(const ModelSpec& m, double u)
{
  const cplx iu(0.0, u);
  return std::visit(
    [&](const auto& v) -> cplx {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, GammaModel>)
        return std::pow(1.0 - iu / v.rate, -v.shape) * std::exp(iu * v.shift);
      else if constexpr (std::is_same_v<T, BilateralGammaModel>)
        return std::pow(1.0 - iu / v.l1, -v.a1) * std::pow(1.0 + iu / v.l2, -v.a2);
      else if constexpr (std::is_same_v<T, NormalModel>)
        return std::exp(iu * v.mean - 0.5 * u * u * v.variance);
      else {
        cplx s = 0.0;
        for (const auto& c : v.components)
          s += c.weight * std::exp(iu * c.mean - 0.5 * u * u * c.variance);
        return s;
      }
    },
    m);
}

//! Derivative of the characteristic function at a single frequency.
inline cplx cf_derivative_value(const ModelSpec& m, double u)
{
  const cplx i(0.0, 1.0);
  const cplx iu(0.0, u);
  return std::visit(
    [&](const auto& v) -> cplx {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, GammaModel>) {
        const cplx base = std::pow(1.0 - iu / v.rate, -v.shape) * std::exp(iu * v.shift);
        return base * (i * v.shape / (v.rate * (1.0 - iu / v.rate)) + i * v.shift);
      } else if constexpr (std::is_same_v<T, BilateralGammaModel>) {
        const cplx base = std::pow(1.0 - iu / v.l1, -v.a1) * std::pow(1.0 + iu / v.l2, -v.a2);
        return base * (i * v.a1 / (v.l1 * (1.0 - iu / v.l1)) -
                       i * v.a2 / (v.l2 * (1.0 + iu / v.l2)));
      } else if constexpr (std::is_same_v<T, NormalModel>) {
        const cplx base = std::exp(iu * v.mean - 0.5 * u * u * v.variance);
        return base * (i * v.mean - u * v.variance);
      } else {
        cplx s = 0.0;
        for (const auto& c : v.components) {
          const cplx base = std::exp(iu * c.mean - 0.5 * u * u * c.variance);
          s += c.weight * base * (i * c.mean - u * c.variance);
        }
        return s;
      }
    },
    m);
}

inline CfCurve analytic_cf(const ModelSpec& m, const FreqGrid& grid)
{
  validate_model(m);
  std::vector<cplx> half(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k)
    half[k] = cf_value(m, grid.nonneg(k));
  half[0] = 1.0;
  return curve_from_half(grid, std::move(half), Symmetry::hermitian);
}

inline CfCurve analytic_cf_derivative(const ModelSpec& m, const FreqGrid& grid)
{
  validate_model(m);
  std::vector<cplx> half(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k)
    half[k] = cf_derivative_value(m, grid.nonneg(k));
  return curve_from_half(grid, std::move(half), Symmetry::anti_hermitian);
}

// --------------------------------------------------------------------------
// Sampling

//! Replication-addressed seeding: distinct replication indices give
//! independent streams regardless of execution order.
struct SeedSpec
{
  std::uint64_t master_seed;
  std::uint64_t replication_index = 0;
};

//! splitmix64 stream addressed by (master_seed, replication_index).
//! Platform-independent, unlike the standard-library distributions.
class Rng
{
public:
  explicit Rng(SeedSpec seed)
  {
    state_ = seed.master_seed ^
             (0x9e3779b97f4a7c15ULL * (seed.replication_index + 1));
    for (int i = 0; i < 4; ++i) next_u64();  // burn-in decorrelates streams
  }

  std::uint64_t next_u64()
  {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  //! uniform draw in the open interval (0,1)
  double uniform01()
  {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal01()
  {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  //! Marsaglia-Tsang squeeze for Gamma(shape, 1), shape >= 1.
  double gamma_shape_ge1(double shape)
  {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal01();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double gamma(double shape, double rate)
  {
    if (shape >= 1.0) return gamma_shape_ge1(shape) / rate;
    // boost small shapes: Gamma(a) = Gamma(a+1) * U^{1/a}
    const double g = gamma_shape_ge1(shape + 1.0);
    return g * std::pow(uniform01(), 1.0 / shape) / rate;
  }

private:
  std::uint64_t state_ = 0;
};

inline double draw(const ModelSpec& m, Rng& rng)
{
  return std::visit(
    [&](const auto& v) -> double {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, GammaModel>)
        return rng.gamma(v.shape, v.rate) + v.shift;
      else if constexpr (std::is_same_v<T, BilateralGammaModel>)
        return rng.gamma(v.a1, v.l1) - rng.gamma(v.a2, v.l2);
      else if constexpr (std::is_same_v<T, NormalModel>)
        return v.mean + std::sqrt(v.variance) * rng.normal01();
      else {
        const double u = rng.uniform01();
        double acc = 0.0;
        for (const auto& c : v.components) {
          acc += c.weight;
          if (u <= acc || &c == &v.components.back())
            return c.mean + std::sqrt(c.variance) * rng.normal01();
        }
        return 0.0;  // unreachable
      }
    },
    m);
}

inline std::vector<double> sample(const ModelSpec& m, std::size_t n, SeedSpec seed)
{
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  validate_model(m);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = draw(m, rng);
  return out;
}

inline PanelSample sample_panel(const ModelSpec& model_x,
                                const ModelSpec& model_eps,
                                std::size_t n,
                                SeedSpec seed)
{
  if (n < 1) throw std::invalid_argument("sample_panel: n must be >= 1");
  validate_model(model_x);
  validate_model(model_eps);
  if (std::abs(mean(model_eps)) > 1e-9)
    throw std::invalid_argument("sample_panel: error model must have mean 0");
  Rng rng(seed);
  PanelSample s;
  s.y1.resize(n);
  s.y2.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = draw(model_x, rng);
    s.y1[j] = x + draw(model_eps, rng);
    s.y2[j] = x + draw(model_eps, rng);
  }
  return s;
}

// --------------------------------------------------------------------------
// Model literals: gamma(4,2,shift=-2), bgamma(2,2,3,3), normal(0,1),
// mixnormal(0.5:-2:1, 0.5:2:2)

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double to_double(const std::string& s, const std::string& context)
{
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("model literal: bad number '" + s + "' in " + context);
  }
  if (pos != s.size())
    throw std::invalid_argument("model literal: bad number '" + s + "' in " + context);
  return v;
}

}  // namespace detail

inline ModelSpec parse_model(const std::string& literal)
{
  const auto open = literal.find('(');
  const auto close = literal.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("model literal: expected name(args): " + literal);
  std::string name;
  for (char ch : literal.substr(0, open))
    if (!std::isspace(static_cast<unsigned char>(ch))) name += ch;
  const auto args = detail::split(literal.substr(open + 1, close - open - 1), ',');

  ModelSpec m;
  if (name == "gamma") {
    if (args.size() != 2 && args.size() != 3)
      throw std::invalid_argument("gamma literal needs 2 or 3 arguments");
    GammaModel g{ detail::to_double(args[0], literal),
                  detail::to_double(args[1], literal), 0.0 };
    if (args.size() == 3) {
      auto a = args[2];
      if (a.rfind("shift=", 0) == 0) a = a.substr(6);
      g.shift = detail::to_double(a, literal);
    }
    m = g;
  } else if (name == "bgamma") {
    if (args.size() != 4)
      throw std::invalid_argument("bgamma literal needs 4 arguments");
    m = BilateralGammaModel{ detail::to_double(args[0], literal),
                             detail::to_double(args[1], literal),
                             detail::to_double(args[2], literal),
                             detail::to_double(args[3], literal) };
  } else if (name == "normal") {
    if (args.size() != 2)
      throw std::invalid_argument("normal literal needs 2 arguments");
    m = NormalModel{ detail::to_double(args[0], literal),
                     detail::to_double(args[1], literal) };
  } else if (name == "mixnormal") {
    NormalMixtureModel mix;
    for (const auto& a : args) {
      const auto parts = detail::split(a, ':');
      if (parts.size() != 3)
        throw std::invalid_argument("mixnormal component must be w:mean:var");
      mix.components.push_back({ detail::to_double(parts[0], literal),
                                 detail::to_double(parts[1], literal),
                                 detail::to_double(parts[2], literal) });
    }
    m = mix;
  } else {
    throw std::invalid_argument("unknown model '" + name + "'");
  }
  validate_model(m);
  return m;
}

inline std::string model_to_string(const ModelSpec& m)
{
  std::ostringstream os;
  std::visit(
    [&](const auto& v) {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, GammaModel>) {
        os << "gamma(" << v.shape << ',' << v.rate;
        if (v.shift != 0.0) os << ",shift=" << v.shift;
        os << ')';
      } else if constexpr (std::is_same_v<T, BilateralGammaModel>) {
        os << "bgamma(" << v.a1 << ',' << v.l1 << ',' << v.a2 << ',' << v.l2 << ')';
      } else if constexpr (std::is_same_v<T, NormalModel>) {
        os << "normal(" << v.mean << ',' << v.variance << ')';
      } else {
        os << "mixnormal(";
        for (std::size_t i = 0; i < v.components.size(); ++i) {
          if (i) os << ", ";
          os << v.components[i].weight << ':' << v.components[i].mean << ':'
             << v.components[i].variance;
        }
        os << ')';
      }
    },
    m);
  return os.str();
}

}  // namespace deconv
