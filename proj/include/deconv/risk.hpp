#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "bandwidth.hpp"
#include "estimators.hpp"
#include "freq_grid.hpp"
#include "models.hpp"

namespace deconv {

enum class LossKind
{
  density_l2,  // (1/2pi) int |phi_truth - phi_hat FK_h|^2 du  (Parseval)
  cf_l2        // same integral without the 1/2pi factor
};

enum class EstimatorId
{
  kotlarski,
  li_vuong,
  symmetric,
  residual
};

enum class BandwidthMode
{
  oracle,
  adaptive,
  fixed
};

inline std::string to_string(EstimatorId e)
{
  switch (e) {
    case EstimatorId::kotlarski: return "kotlarski";
    case EstimatorId::li_vuong: return "li_vuong";
    case EstimatorId::symmetric: return "symmetric";
    case EstimatorId::residual: return "residual";
  }
  return "?";
}

inline std::string to_string(BandwidthMode m)
{
  switch (m) {
    case BandwidthMode::oracle: return "oracle";
    case BandwidthMode::adaptive: return "adaptive";
    case BandwidthMode::fixed: return "fixed";
  }
  return "?";
}

inline std::string to_string(LossKind k)
{
  return k == LossKind::density_l2 ? "density_l2" : "cf_l2";
}

inline EstimatorId estimator_from_string(const std::string& s)
{
  if (s == "kotlarski") return EstimatorId::kotlarski;
  if (s == "li_vuong") return EstimatorId::li_vuong;
  if (s == "symmetric") return EstimatorId::symmetric;
  if (s == "residual") return EstimatorId::residual;
  throw std::invalid_argument("unknown estimator '" + s + "'");
}

struct Scenario
{
  std::string label;
  ModelSpec x;
  ModelSpec eps;
};

struct RiskReport
{
  std::string scenario;
  std::string estimator;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::string bandwidth_mode;
  std::string loss_kind;
  double risk_mean = 0.0;
  double risk_stderr = 0.0;
  std::uint64_t seed = 0;
};

inline void check_loss_grid(const ModelSpec& truth, const FreqGrid& grid, double tail_tol)
{
  if (std::abs(cf_value(truth, grid.u_max)) >= tail_tol)
    throw std::invalid_argument(
      "l2 loss: grid too narrow, |cf_truth(u_max)| >= tail tolerance");
}

//! Squared L2 distance between the true density and the kernel-smoothed
//! estimate, computed in the Fourier domain.
inline double l2_loss(const CfCurve& estimate,
                      const ModelSpec& truth,
                      KernelKind kind,
                      double h,
                      LossKind loss = LossKind::density_l2,
                      double tail_tol = 1e-6)
{
  const FreqGrid& grid = estimate.grid;
  check_loss_grid(truth, grid, tail_tol);
  std::vector<double> g(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    const double u = grid.nonneg(k);
    const cplx diff = cf_value(truth, u) -
                      estimate.nonneg(k) * fourier_kernel_value(kind, h, u);
    g[k] = std::norm(diff);
  }
  const double raw = even_integral(g, grid.step);
  return loss == LossKind::density_l2 ? raw / (2.0 * std::numbers::pi) : raw;
}

inline double density_l2_loss(const CfCurve& estimate,
                              const ModelSpec& truth,
                              KernelKind kind,
                              double h,
                              double tail_tol = 1e-6)
{
  return l2_loss(estimate, truth, kind, h, LossKind::density_l2, tail_tol);
}

//! min over the bandwidth set of the loss for a fixed estimate; the three
//! quadratic pieces are precomputed so each m costs one weighted quadrature.
inline double min_loss_over_bandwidths(const CfCurve& estimate,
                                       const ModelSpec& truth,
                                       KernelKind kind,
                                       std::size_t m_max,
                                       LossKind loss,
                                       double tail_tol)
{
  const FreqGrid& grid = estimate.grid;
  check_loss_grid(truth, grid, tail_tol);
  std::vector<double> tt(grid.half + 1), te(grid.half + 1), ee(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    const cplx t = cf_value(truth, grid.nonneg(k));
    const cplx e = estimate.nonneg(k);
    tt[k] = std::norm(t);
    te[k] = (std::conj(t) * e).real();
    ee[k] = std::norm(e);
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> g(grid.half + 1);
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double h = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k <= grid.half; ++k) {
      const double fk = fourier_kernel_value(kind, h, grid.nonneg(k));
      g[k] = tt[k] - 2.0 * fk * te[k] + fk * fk * ee[k];
    }
    best = std::min(best, even_integral(g, grid.step));
  }
  return loss == LossKind::density_l2 ? best / (2.0 * std::numbers::pi) : best;
}

inline CfCurve estimate_cf(EstimatorId id, const PanelSample& sample, const FreqGrid& grid)
{
  switch (id) {
    case EstimatorId::kotlarski: return kotlarski_cf(sample, grid).first;
    case EstimatorId::li_vuong: return li_vuong_cf(sample, grid);
    case EstimatorId::symmetric: return symmetric_cf(sample, grid);
    case EstimatorId::residual: return residual_cf(sample, grid);
  }
  throw std::logic_error("estimate_cf: bad estimator id");
}

inline std::size_t thread_count_from_env()
{
  if (const char* env = std::getenv("DECONV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

//! Runs fn(rep) for rep = 0..count-1 on up to `threads` workers.  Results
//! must be written into per-rep slots so aggregation stays deterministic.
template<typename Fn>
inline void parallel_reps(std::size_t count, Fn&& fn, std::size_t threads)
{
  threads = std::min(std::max<std::size_t>(threads, 1), count > 0 ? count : 1);
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t r = next.fetch_add(1);
        if (r >= count) return;
        fn(r);
      }
    });
  for (auto& th : pool) th.join();
}

//! Mean and standard error by compensated summation in replication order.
inline std::pair<double, double> mean_stderr(const std::vector<double>& v)
{
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return { mean, 0.0 };
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return { mean, sd / std::sqrt(static_cast<double>(v.size())) };
}

struct RiskOptions
{
  KernelKind kernel = KernelKind::gaussian;
  LossKind loss = LossKind::density_l2;
  double tail_tol = 1e-6;
  std::size_t threads = 1;
};

//! Empirical risk with per-replication oracle choice of the bandwidth.
inline RiskReport oracle_risk(const Scenario& scenario,
                              std::size_t n,
                              std::size_t reps,
                              EstimatorId estimator,
                              const FreqGrid& grid,
                              std::uint64_t master_seed,
                              const RiskOptions& opt = {})
{
  if (reps < 1) throw std::invalid_argument("oracle_risk: reps must be >= 1");
  const ModelSpec& truth =
    (estimator == EstimatorId::residual) ? scenario.eps : scenario.x;
  const std::size_t m_max = BandwidthSet::for_sample(n).m_max;
  std::vector<double> losses(reps);
  parallel_reps(
    reps,
    [&](std::size_t r) {
      const auto panel = sample_panel(scenario.x, scenario.eps, n, { master_seed, r });
      const CfCurve est = estimate_cf(estimator, panel, grid);
      losses[r] = min_loss_over_bandwidths(est, truth, opt.kernel, m_max,
                                           opt.loss, opt.tail_tol);
    },
    opt.threads);
  const auto [mean, se] = mean_stderr(losses);
  return { scenario.label, to_string(estimator), n, reps,
           to_string(BandwidthMode::oracle), to_string(opt.loss), mean, se,
           master_seed };
}

//! Empirical risk of the adaptive procedure: bandwidth chosen per
//! replication by block cross-validation.
inline RiskReport adaptive_risk(const Scenario& scenario,
                                std::size_t n,
                                std::size_t reps,
                                const FreqGrid& grid,
                                std::uint64_t master_seed,
                                const RiskOptions& opt = {})
{
  if (reps < 1) throw std::invalid_argument("adaptive_risk: reps must be >= 1");
  std::vector<double> losses(reps);
  parallel_reps(
    reps,
    [&](std::size_t r) {
      const auto panel = sample_panel(scenario.x, scenario.eps, n, { master_seed, r });
      const auto sel = cv_select(panel, grid, opt.kernel);
      const CfCurve est = kotlarski_cf(panel, grid).first;
      losses[r] = l2_loss(est, scenario.x, opt.kernel, sel.h, opt.loss, opt.tail_tol);
    },
    opt.threads);
  const auto [mean, se] = mean_stderr(losses);
  return { scenario.label, to_string(EstimatorId::kotlarski), n, reps,
           to_string(BandwidthMode::adaptive), to_string(opt.loss), mean, se,
           master_seed };
}

//! Paired oracle-risk comparison of the skew-robust estimator against the
//! symmetric-error baseline, both fed the same simulated panels.
inline std::pair<RiskReport, RiskReport> compare_symmetric(
  const Scenario& scenario,
  std::size_t n,
  std::size_t reps,
  const FreqGrid& grid,
  std::uint64_t master_seed,
  const RiskOptions& opt = {})
{
  if (reps < 1) throw std::invalid_argument("compare_symmetric: reps must be >= 1");
  const std::size_t m_max = BandwidthSet::for_sample(n).m_max;
  std::vector<double> loss_main(reps), loss_sym(reps);
  parallel_reps(
    reps,
    [&](std::size_t r) {
      const auto panel = sample_panel(scenario.x, scenario.eps, n, { master_seed, r });
      const CfCurve main = kotlarski_cf(panel, grid).first;
      const CfCurve sym = symmetric_cf(panel, grid);
      loss_main[r] = min_loss_over_bandwidths(main, scenario.x, opt.kernel, m_max,
                                              opt.loss, opt.tail_tol);
      loss_sym[r] = min_loss_over_bandwidths(sym, scenario.x, opt.kernel, m_max,
                                             opt.loss, opt.tail_tol);
    },
    opt.threads);
  const auto [mean_main, se_main] = mean_stderr(loss_main);
  const auto [mean_sym, se_sym] = mean_stderr(loss_sym);
  RiskReport a{ scenario.label, to_string(EstimatorId::kotlarski), n, reps,
                to_string(BandwidthMode::oracle), to_string(opt.loss),
                mean_main, se_main, master_seed };
  RiskReport b{ scenario.label, to_string(EstimatorId::symmetric), n, reps,
                to_string(BandwidthMode::oracle), to_string(opt.loss),
                mean_sym, se_sym, master_seed };
  return { a, b };
}

inline void write_report_header(std::ostream& os)
{
  os << "scenario,estimator,n,reps,bandwidth_mode,loss_kind,risk_mean,risk_stderr,seed\n";
}

inline void write_report_row(std::ostream& os, const RiskReport& r)
{
  os << r.scenario << ',' << r.estimator << ',' << r.n << ',' << r.reps << ','
     << r.bandwidth_mode << ',' << r.loss_kind << ',' << r.risk_mean << ','
     << r.risk_stderr << ',' << r.seed << '\n';
}

}  // namespace deconv
