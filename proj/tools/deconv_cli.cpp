#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deconv/deconv.hpp"

namespace {

int cmd_run(const std::string& config_path, long reps_override, bool quick)
{
  try {
    auto cfg = deconv::parse_config_file(config_path);
    if (quick) cfg.reps = 50;
    if (reps_override > 0) cfg.reps = static_cast<std::size_t>(reps_override);
    const auto reports = deconv::run_experiment(cfg);
    std::cout << "wrote " << reports.size() << " report rows to " << cfg.output
              << "/risk_report.csv\n";
    for (const auto& r : reports)
      std::printf("  %-24s %-10s n=%-6zu %-8s risk=%.5g (se %.2g)\n",
                  r.scenario.c_str(), r.estimator.c_str(), r.n,
                  r.bandwidth_mode.c_str(), r.risk_mean, r.risk_stderr);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_validate(const std::string& config_path)
{
  const auto diags = deconv::validate_file(config_path);
  if (diags.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& d : diags) std::cout << d << '\n';
  return 1;
}

int cmd_rates(const std::string& target,
              double beta_x, double c_x, double rho_x,
              double beta_eps, double c_eps, double rho_eps,
              std::size_t p)
{
  try {
    const auto t = (target == "X") ? deconv::RateTarget::density_x
                                   : deconv::RateTarget::density_eps;
    const auto r = deconv::predicted_rate(t, { beta_x, c_x, rho_x },
                                          { beta_eps, c_eps, rho_eps }, p);
    std::cout << "rate: n^(-" << r.poly_exponent << ")";
    if (r.log_exponent != 0.0) std::cout << " * (log n)^(" << r.log_exponent << ")";
    std::cout << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "density deconvolution from repeated measurements" };
  app.require_subcommand(1);

  std::string config_path;
  long reps_override = 0;
  bool quick = false;
  auto* run = app.add_subcommand("run", "run a declarative experiment config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--reps", reps_override, "override replication count");
  run->add_flag("--quick", quick, "short run with 50 replications");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "check a config without running");
  val->add_option("config", validate_path, "config file")->required();

  std::string target = "X";
  double beta_x = 1.0, c_x = 0.0, rho_x = 0.0;
  double beta_eps = 1.0, c_eps = 0.0, rho_eps = 0.0;
  std::size_t p = 2;
  auto* rates = app.add_subcommand("rates", "print the predicted convergence rate");
  rates->add_option("--target", target, "X or eps")
    ->check(CLI::IsMember({ "X", "eps" }));
  rates->add_option("--beta-x", beta_x, "polynomial decay exponent of phi_X");
  rates->add_option("--c-x", c_x, "exponential coefficient of phi_X");
  rates->add_option("--rho-x", rho_x, "exponential power of phi_X");
  rates->add_option("--beta-eps", beta_eps, "polynomial decay exponent of phi_eps");
  rates->add_option("--c-eps", c_eps, "exponential coefficient of phi_eps");
  rates->add_option("--rho-eps", rho_eps, "exponential power of phi_eps");
  rates->add_option("--p", p, "moment order");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, reps_override, quick);
  if (val->parsed()) return cmd_validate(validate_path);
  return cmd_rates(target, beta_x, c_x, rho_x, beta_eps, c_eps, rho_eps, p);
}
