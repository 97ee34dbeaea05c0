#include <doctest.h>

#include "testkit.hpp"

using namespace deconv;

TEST_CASE("closed-form reference densities")
{
  CHECK(testkit::normal_density(0.0, 1.0, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
  // Gamma(4,2) at x = 1.5: 2^4 1.5^3 e^{-3} / 3!
  CHECK(testkit::gamma_density(GammaModel{ 4, 2 }, 1.5) ==
        doctest::Approx(16.0 * 3.375 * std::exp(-3.0) / 6.0));
  CHECK(testkit::gamma_density(GammaModel{ 4, 2 }, -0.1) == 0.0);
  CHECK(testkit::gamma_density(GammaModel{ 4, 2, -2 }, -1.0) ==
        doctest::Approx(testkit::gamma_density(GammaModel{ 4, 2 }, 1.0)));
}

TEST_CASE("Simpson inversion reproduces the Laplace density")
{
  // bgamma(1,1,1,1) is the standard Laplace distribution
  const ModelSpec laplace = BilateralGammaModel{ 1, 1, 1, 1 };
  CHECK(testkit::density_value(laplace, 0.0) == doctest::Approx(0.5).epsilon(0.005));
  CHECK(testkit::density_value(laplace, 1.0) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(0.005));
  CHECK(testkit::density_value(laplace, -1.0) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(0.005));
}

TEST_CASE("Simpson inversion agrees with the trapezoid inversion route")
{
  // different quadrature rule, grid and code path; agreement localizes
  // quadrature bugs on either side
  const ModelSpec m = BilateralGammaModel{ 2, 2, 3, 3 };
  const auto grid = make_grid(200.0, 0.02);
  const auto cf = analytic_cf(m, grid);
  const auto d = density_from_cf(cf, KernelKind::sinc, 0.005, { -1.0, 0.0, 0.5 });
  for (std::size_t i = 0; i < d.x.size(); ++i)
    CHECK(d.f[i] == doctest::Approx(testkit::density_value(m, d.x[i])).epsilon(1e-3));
}

TEST_CASE("empirical partial derivative concentrates around the closed form")
{
  const std::size_t n = 1000000;
  const auto grid = make_grid(5.0, 0.1);
  const ModelSpec mx = NormalModel{ 0, 1 };
  const ModelSpec me = BilateralGammaModel{ 2, 2, 3, 3 };
  // E[Y1^2] = Var X + Var eps = 1 + (2/4 + 3/9)
  const double second_moment = 1.0 + 2.0 / 4.0 + 3.0 / 9.0;
  const double bound = 5.0 * std::sqrt(second_moment / static_cast<double>(n));
  CHECK(testkit::lemma61_check(mx, me, n, grid, { 61, 0 }) < bound);
}

TEST_CASE("refinement gate accepts stable quantities and flags unstable ones")
{
  auto stable = [](double step) {
    const auto grid = make_grid(10.0, step);
    const auto zero = curve_from_half(
      grid, std::vector<cplx>(grid.half + 1, cplx(0.0, 0.0)), Symmetry::hermitian);
    return density_l2_loss(zero, NormalModel{ 0, 1 }, KernelKind::gaussian, 0.5);
  };
  CHECK(testkit::refinement_check(stable, 0.1, 0.01));
  CHECK_FALSE(testkit::refinement_check([](double s) { return s; }, 0.5, 0.5));
}

TEST_CASE("frozen study tables are internally coherent")
{
  const auto t41 = testkit::table41();
  REQUIRE(t41.size() == 4);
  for (const auto& sc : t41) {
    for (int i = 0; i < 3; ++i) {
      CHECK(sc.cells[i].oracle <= sc.cells[i].adaptive);  // oracle is a lower bound
      if (i > 0) {
        CHECK(sc.cells[i].oracle < sc.cells[i - 1].oracle);
        CHECK(sc.cells[i].adaptive < sc.cells[i - 1].adaptive);
        CHECK(sc.cells[i].n == 10 * sc.cells[i - 1].n);
      }
    }
    CHECK(std::abs(deconv::mean(sc.models.model_eps)) < 1e-9);
  }

  const auto t42 = testkit::table42();
  REQUIRE(t42.size() == 4);
  for (int s = 0; s < 2; ++s)  // markedly skewed errors: baseline clearly worse
    for (int i = 0; i < 3; ++i)
      CHECK(t42[s].cells[i].oracle < t42[s].cells[i].adaptive);
  for (int s = 2; s < 4; ++s)  // milder skew: the two stay within a factor 2
    for (int i = 0; i < 3; ++i) {
      const double ratio = t42[s].cells[i].oracle / t42[s].cells[i].adaptive;
      CHECK(ratio > 0.5);
      CHECK(ratio < 2.0);
    }
}
