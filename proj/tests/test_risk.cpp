#include <doctest.h>

#include <cstdlib>

#include "deconv/rates.hpp"
#include "deconv/risk.hpp"
#include "testkit.hpp"

using namespace deconv;

namespace {

CfCurve zero_curve(const FreqGrid& grid)
{
  return curve_from_half(grid, std::vector<cplx>(grid.half + 1, cplx(0.0, 0.0)),
                         Symmetry::hermitian);
}

const Scenario kToyScenario{ "n01_bg2233", ModelSpec(NormalModel{ 0, 1 }),
                             ModelSpec(BilateralGammaModel{ 2, 2, 3, 3 }) };

RiskOptions loose_tail()
{
  RiskOptions opt;
  opt.tail_tol = 1e-3;
  return opt;
}

}  // namespace

TEST_CASE("loss of the zero estimate is the squared L2 norm of the truth")
{
  const auto grid = make_grid(10.0, 0.01);
  const ModelSpec truth = NormalModel{ 0, 1 };
  // || phi ||^2 = int e^{-u^2} du = sqrt(pi), so the density-scale loss is
  // sqrt(pi) / 2pi = 1 / (2 sqrt(pi))
  const double expect = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
  CHECK(density_l2_loss(zero_curve(grid), truth, KernelKind::gaussian, 0.5) ==
        doctest::Approx(expect).epsilon(1e-4));
  CHECK(l2_loss(zero_curve(grid), truth, KernelKind::gaussian, 0.5, LossKind::cf_l2) ==
        doctest::Approx(2.0 * std::numbers::pi * expect).epsilon(1e-4));
}

TEST_CASE("loss vanishes when the estimate is exact and the kernel is flat")
{
  const auto grid = make_grid(10.0, 0.01);
  const auto cf = analytic_cf(NormalModel{ 0, 1 }, grid);
  // sinc cutoff at 1/h = 10 covers the whole grid, so FK = 1 everywhere
  CHECK(density_l2_loss(cf, NormalModel{ 0, 1 }, KernelKind::sinc, 0.1) == 0.0);
}

TEST_CASE("loss rejects grids whose tail still carries CF mass")
{
  const auto grid = make_grid(10.0, 0.05);
  const ModelSpec fat = GammaModel{ 1, 1 };  // |phi(10)| ~ 0.1
  CHECK_THROWS_AS(density_l2_loss(zero_curve(grid), fat, KernelKind::gaussian, 0.5),
                  std::invalid_argument);
  CHECK_NOTHROW(
    density_l2_loss(zero_curve(grid), fat, KernelKind::gaussian, 0.5, 0.2));
}

TEST_CASE("frequency-domain loss matches the x-domain route")
{
  const auto grid = make_grid(30.0, 0.05);
  const ModelSpec truth = GammaModel{ 4, 2 };
  const auto panel = sample_panel(truth, ModelSpec(BilateralGammaModel{ 2, 2, 3, 3 }),
                                  500, { 41, 0 });
  const auto est = kotlarski_cf(panel, grid).first;
  const double h = 0.5;
  const double freq =
    l2_loss(est, truth, KernelKind::gaussian, h, LossKind::density_l2, 1e-3);
  const double space =
    testkit::x_domain_l2_loss(est, truth, KernelKind::gaussian, h, -20.0, 20.0, 0.01);
  CHECK(freq == doctest::Approx(space).epsilon(0.02));
}

TEST_CASE("bandwidth-set minimum agrees with a scan over the losses")
{
  const auto grid = make_grid(30.0, 0.05);
  const ModelSpec truth = NormalModel{ 0, 1 };
  const auto panel =
    sample_panel(truth, ModelSpec(BilateralGammaModel{ 2, 2, 3, 3 }), 200, { 43, 0 });
  const auto est = kotlarski_cf(panel, grid).first;
  const std::size_t m_max = 14;
  double scan = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= m_max; ++m)
    scan = std::min(scan, l2_loss(est, truth, KernelKind::gaussian,
                                  1.0 / static_cast<double>(m),
                                  LossKind::density_l2, 1e-3));
  const double direct = min_loss_over_bandwidths(est, truth, KernelKind::gaussian,
                                                 m_max, LossKind::density_l2, 1e-3);
  CHECK(direct == doctest::Approx(scan).epsilon(1e-12));
}

TEST_CASE("predicted rates against hand-derived values")
{
  using doctest::Approx;
  const RateSpec ord1{ 1.0, 0.0, 0.0 };
  const RateSpec ord2{ 2.0, 0.0, 0.0 };
  const RateSpec super_g{ 1.0, 1.0, 2.0 };  // gaussian-type tails
  const RateSpec super_l{ 1.0, 1.0, 1.0 };  // laplace-transform-type tails

  // both ordinary
  auto r = predicted_rate(RateTarget::density_x, ord2, ord1, 2);
  CHECK(r.poly_exponent == Approx(1.0 / 3.0));
  CHECK(r.log_exponent == 0.0);
  r = predicted_rate(RateTarget::density_eps, { 1.0, 0, 0 }, ord2, 3);
  CHECK(r.poly_exponent == Approx(6.0 / 23.0));
  CHECK(r.log_exponent == 0.0);

  // supersmooth errors: logarithmic recovery of the target
  r = predicted_rate(RateTarget::density_x, ord2, super_g, 2);
  CHECK(r.poly_exponent == 0.0);
  CHECK(r.log_exponent == Approx(-1.5));

  // supersmooth contamination: logarithmic recovery of the residual density
  r = predicted_rate(RateTarget::density_eps, super_l, ord2, 2);
  CHECK(r.poly_exponent == 0.0);
  CHECK(r.log_exponent == Approx(-3.0));

  // supersmooth target, ordinary errors
  r = predicted_rate(RateTarget::density_x, super_g, ord1, 2);
  CHECK(r.poly_exponent == Approx(2.0 / 3.0));
  CHECK(r.log_exponent == Approx(-1.0 / 6.0));

  // supersmooth residuals, ordinary target
  r = predicted_rate(RateTarget::density_eps, ord1, super_g, 2);
  CHECK(r.poly_exponent == Approx(0.5));
  CHECK(r.log_exponent == Approx(0.25));

  // high moment order approaches the p-free limit
  r = predicted_rate(RateTarget::density_x, ord2, ord1, 1000000);
  CHECK(r.poly_exponent == Approx(3.0 / 7.0).epsilon(1e-4));

  CHECK_THROWS_AS(predicted_rate(RateTarget::density_x, ord2, ord1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(predicted_rate(RateTarget::density_x, super_g, super_g, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(
    predicted_rate(RateTarget::density_x, { 0.4, 0, 0 }, ord1, 2),
    std::invalid_argument);
}

TEST_CASE("oracle risk is deterministic in the master seed")
{
  const auto grid = make_grid(30.0, 0.1);
  const auto a = oracle_risk(kToyScenario, 50, 3, EstimatorId::kotlarski, grid, 97,
                             loose_tail());
  const auto b = oracle_risk(kToyScenario, 50, 3, EstimatorId::kotlarski, grid, 97,
                             loose_tail());
  CHECK(a.risk_mean == b.risk_mean);
  CHECK(a.risk_stderr == b.risk_stderr);
  CHECK(a.risk_mean > 0.0);
  CHECK(a.scenario == "n01_bg2233");
  CHECK(a.estimator == "kotlarski");
  CHECK(a.bandwidth_mode == "oracle");
  CHECK(a.loss_kind == "density_l2");
  CHECK(a.n == 50);
  CHECK(a.reps == 3);
  CHECK(a.seed == 97);

  const auto c = oracle_risk(kToyScenario, 50, 3, EstimatorId::kotlarski, grid, 98,
                             loose_tail());
  CHECK(c.risk_mean != a.risk_mean);
}

TEST_CASE("residual-target oracle risk scores against the error density")
{
  const auto grid = make_grid(30.0, 0.1);
  const auto r = oracle_risk(kToyScenario, 100, 2, EstimatorId::residual, grid, 5,
                             loose_tail());
  CHECK(r.estimator == "residual");
  CHECK(std::isfinite(r.risk_mean));
  CHECK(r.risk_mean > 0.0);
}

TEST_CASE("adaptive risk runs and is deterministic")
{
  const auto grid = make_grid(30.0, 0.1);
  const auto a = adaptive_risk(kToyScenario, 50, 2, grid, 7, loose_tail());
  const auto b = adaptive_risk(kToyScenario, 50, 2, grid, 7, loose_tail());
  CHECK(a.risk_mean == b.risk_mean);
  CHECK(a.bandwidth_mode == "adaptive");
  CHECK(a.risk_mean > 0.0);
}

TEST_CASE("paired comparison shares panels between the two estimators")
{
  const auto grid = make_grid(30.0, 0.1);
  const auto [main, sym] = compare_symmetric(kToyScenario, 60, 2, grid, 13,
                                             loose_tail());
  CHECK(main.estimator == "kotlarski");
  CHECK(sym.estimator == "symmetric");
  CHECK(main.seed == sym.seed);
  CHECK(main.n == sym.n);
  CHECK(main.risk_mean > 0.0);
  CHECK(sym.risk_mean > 0.0);
}

TEST_CASE("oracle risk decays at roughly the predicted polynomial rate")
{
  // loose gate: measured log-log slope within 0.25 of the closed form
  const Scenario sc{ "gamma42_bg2233", ModelSpec(GammaModel{ 4, 2 }),
                     ModelSpec(BilateralGammaModel{ 2, 2, 3, 3 }) };
  const auto grid = make_grid(30.0, 0.05);
  auto opt = loose_tail();
  opt.threads = thread_count_from_env();
  const std::size_t ns[] = { 250, 1000, 4000 };
  double lr[3];
  for (int i = 0; i < 3; ++i)
    lr[i] = std::log(
      oracle_risk(sc, ns[i], 60, EstimatorId::kotlarski, grid, 71, opt).risk_mean);
  const double slope = (lr[2] - lr[0]) / std::log(16.0);
  CHECK(slope < 0.0);
  // moduli decay: target u^{-4}, errors u^{-5}
  const auto rate =
    predicted_rate(RateTarget::density_x, { 4.0, 0, 0 }, { 5.0, 0, 0 }, 2);
  CHECK(std::abs(-slope - rate.poly_exponent) < 0.25);
  CHECK(lr[2] < lr[1]);
  CHECK(lr[1] < lr[0]);
}

TEST_CASE("mean and standard error")
{
  const auto [m, se] = mean_stderr({ 1.0, 2.0, 3.0, 4.0 });
  CHECK(m == doctest::Approx(2.5));
  CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(mean_stderr({ 7.0 }).second == 0.0);
}

TEST_CASE("worker pool covers every replication slot")
{
  std::vector<int> hit(100, 0);
  parallel_reps(hit.size(), [&](std::size_t r) { hit[r] += 1; }, 4);
  for (int h : hit) CHECK(h == 1);
}

TEST_CASE("thread count honors the environment override")
{
  setenv("DECONV_THREADS", "3", 1);
  CHECK(thread_count_from_env() == 3);
  unsetenv("DECONV_THREADS");
  CHECK(thread_count_from_env() >= 1);
}
