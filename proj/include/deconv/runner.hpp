#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "config.hpp"
#include "risk.hpp"

namespace deconv {

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p)
{
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  os << std::setprecision(12);
  return os;
}

//! Representative curve dumps for one replication of the largest sample size.
inline void dump_representative(const ExperimentConfig& cfg,
                                const Scenario& sc,
                                const FreqGrid& grid,
                                const std::filesystem::path& dir)
{
  const std::size_t n = *std::max_element(cfg.n_values.begin(), cfg.n_values.end());
  const auto panel = sample_panel(sc.x, sc.eps, n, { cfg.seed, 0 });
  const CfCurve est = kotlarski_cf(panel, grid).first;

  auto cf_os = open_output(dir / (sc.label + "_cf.csv"));
  write_curve_csv(cf_os, est);

  // bandwidth for the density plot: oracle pick, floored so the gaussian
  // kernel tail fits on the grid
  const std::size_t m_max = BandwidthSet::for_sample(n).m_max;
  double best_h = 1.0, best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double h = 1.0 / static_cast<double>(m);
    if (cfg.kernel == KernelKind::gaussian && cfg.u_max < 6.0 / h - 1e-9) continue;
    if (cfg.kernel == KernelKind::sinc && cfg.u_max < 1.0 / h - 1e-9) continue;
    const double l = l2_loss(est, sc.x, cfg.kernel, h, cfg.loss, cfg.tail_tol);
    if (l < best) {
      best = l;
      best_h = h;
    }
  }
  const auto density =
    density_from_cf(est, cfg.kernel, best_h, make_x_grid(-10.0, 10.0, 0.01));
  auto d_os = open_output(dir / (sc.label + "_density.csv"));
  write_density_csv(d_os, density);
}

}  // namespace detail

//! Executes the configured study and writes the risk report, the plot-data
//! file and per-scenario representative curves into the output directory.
inline std::vector<RiskReport> run_experiment(const ExperimentConfig& cfg)
{
  {
    const auto diags = validate(cfg);
    if (!diags.empty()) {
      std::string msg = "invalid config:";
      for (const auto& d : diags) msg += "\n  " + d;
      throw std::invalid_argument(msg);
    }
  }
  const FreqGrid grid = make_grid(cfg.u_max, cfg.step);
  RiskOptions opt;
  opt.kernel = cfg.kernel;
  opt.loss = cfg.loss;
  opt.tail_tol = cfg.tail_tol;
  opt.threads = thread_count_from_env();

  std::vector<RiskReport> reports;
  for (const auto& sc : cfg.scenarios) {
    for (std::size_t n : cfg.n_values) {
      if (cfg.study == "compare_symmetric") {
        auto [a, b] = compare_symmetric(sc, n, cfg.reps, grid, cfg.seed, opt);
        reports.push_back(std::move(a));
        reports.push_back(std::move(b));
        continue;
      }
      for (BandwidthMode mode : cfg.modes) {
        if (mode == BandwidthMode::adaptive) {
          reports.push_back(adaptive_risk(sc, n, cfg.reps, grid, cfg.seed, opt));
        } else {
          for (EstimatorId est : cfg.estimators)
            reports.push_back(
              oracle_risk(sc, n, cfg.reps, est, grid, cfg.seed, opt));
        }
      }
    }
  }

  const std::filesystem::path dir(cfg.output);
  std::filesystem::create_directories(dir / "curves");

  auto report_os = detail::open_output(dir / "risk_report.csv");
  write_report_header(report_os);
  for (const auto& r : reports) write_report_row(report_os, r);

  auto plot_os = detail::open_output(dir / "plot_risk_vs_n.csv");
  plot_os << "scenario,estimator,bandwidth_mode,n,risk_mean\n";
  for (const auto& r : reports)
    plot_os << r.scenario << ',' << r.estimator << ',' << r.bandwidth_mode << ','
            << r.n << ',' << r.risk_mean << '\n';

  for (const auto& sc : cfg.scenarios)
    detail::dump_representative(cfg, sc, grid, dir / "curves");

  return reports;
}

}  // namespace deconv
