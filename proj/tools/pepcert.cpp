#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pepcert/commands.hpp"

namespace cli = pepcert::cli;

int main(int argc, char** argv) {
  CLI::App app{"Low-rank performance-estimation certificates for constant-stepsize gradient descent"};
  app.require_subcommand(1);
  const std::string out_default = cli::default_output_dir().string();

  int rates_n = 0;
  auto* rates = app.add_subcommand("rates", "Print the balanced stepsize alpha(N) and rate r(N)");
  rates->add_option("N", rates_n, "number of gradient steps")->required();

  cli::SolveOptions solve_opts;
  solve_opts.out_dir = out_default;
  std::vector<std::string> warm;
  auto* solve = app.add_subcommand("solve", "Find a certificate vector d for one N");
  solve->add_option("N", solve_opts.n, "number of gradient steps (>= 3)")->required();
  solve->add_option("--warm", warm, "one or two certificate files of smaller N to extrapolate from")
      ->expected(1, 2);
  solve->add_option("--tol", solve_opts.tol, "residual sup-norm tolerance")->capture_default_str();
  solve->add_option("--max-iter", solve_opts.max_iter, "Gauss-Newton iteration budget")
      ->capture_default_str();
  solve->add_option("-o,--out", solve_opts.out_dir, "output directory (default $PEPCERT_OUT_DIR or .)");

  cli::SweepOptions sweep_opts;
  sweep_opts.out_dir = out_default;
  std::optional<int> stride_from;
  auto* sweep = app.add_subcommand("sweep", "Continuation sweep N = 3..N_MAX, one file per N");
  sweep->add_option("N_MAX", sweep_opts.n_max, "largest N");
  sweep->add_option("--stride-from", stride_from, "switch to strided steps after this N");
  sweep->add_option("--stride", sweep_opts.stride, "stride after --stride-from")->capture_default_str();
  sweep->add_flag("--full-scale", sweep_opts.full_scale,
                  "3..2240 every N, every 320th to 8960, every 1600th to 20160");
  sweep->add_option("--tol", sweep_opts.tol, "residual sup-norm tolerance")->capture_default_str();
  sweep->add_option("--max-iter", sweep_opts.max_iter, "Gauss-Newton iteration budget per N")
      ->capture_default_str();
  sweep->add_option("-o,--out", sweep_opts.out_dir, "output directory (default $PEPCERT_OUT_DIR or .)");

  cli::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Re-derive and check a certificate file");
  verify->add_option("FILE", verify_opts.file, "certificate file")->required();
  verify->add_flag("--oracle", verify_opts.oracle, "also match sum lambda_ij Q_ij coefficient-wise");
  verify->add_option("--tol", verify_opts.tol, "bound on delta")->capture_default_str();

  cli::PlotDataOptions plot_opts;
  plot_opts.out_dir = out_default;
  std::vector<std::string> plot_files;
  auto* plot = app.add_subcommand("plotdata", "Write a, b, c, d rescaled to [0, 1] per certificate");
  plot->add_option("FILES", plot_files, "certificate files");
  plot->add_option("-o,--out", plot_opts.out_dir, "output directory (default $PEPCERT_OUT_DIR or .)");

  cli::EnvelopeOptions env_opts;
  auto* envelope = app.add_subcommand("envelope", "Tabulate max(quadratic, Huber) over a stepsize grid");
  envelope->add_option("N", env_opts.n, "number of gradient steps")->required();
  envelope->add_option("--grid", env_opts.grid, "lo:hi:step")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  try {
    if (*rates) return cli::cmd_rates(rates_n, std::cout, std::cerr);
    if (*solve) {
      solve_opts.warm.assign(warm.begin(), warm.end());
      return cli::cmd_solve(solve_opts, std::cout, std::cerr);
    }
    if (*sweep) {
      sweep_opts.stride_from = stride_from;
      return cli::cmd_sweep(sweep_opts, std::cout, std::cerr);
    }
    if (*verify) return cli::cmd_verify(verify_opts, std::cout, std::cerr);
    if (*plot) {
      plot_opts.files.assign(plot_files.begin(), plot_files.end());
      return cli::cmd_plotdata(plot_opts, std::cout, std::cerr);
    }
    if (*envelope) return cli::cmd_envelope(env_opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsage;
  }
  return cli::kUsage;
}
