// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--keep DIR]
//
// Certificates are written under a temporary directory (or DIR with --keep).

#include <quadmath.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pepcert/certificate_file.hpp"
#include "pepcert/commands.hpp"
#include "pepcert/rates.hpp"
#include "pepcert/recursion.hpp"
#include "pepcert/solver.hpp"
#include "pepcert/verifier.hpp"

using namespace pepcert;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string sci(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

// Runs a CLI sweep into dir and checks every certificate it wrote.
Outcome check_sweep_dir(const cli::SweepOptions& options, const std::vector<int>& expected_ns) {
  Outcome o;
  std::ostringstream out, err;
  const int code = cli::cmd_sweep(options, out, err);
  if (code != cli::kOk) {
    o.fail("sweep exit " + std::to_string(code) + ": " + err.str());
    return o;
  }
  double worst_delta = 0.0, worst_sup = 0.0;
  int worst_iter = 0;
  for (const int n : expected_ns) {
    const fs::path path = certificate_path(options.out_dir, n);
    if (!fs::exists(path)) {
      o.fail("missing certificate for N=" + std::to_string(n));
      continue;
    }
    const CertificateFile file = read_certificate(path);
    const FullCertificate cert = derive_full(solve_rate_params(n), file.d);
    const DeltaCertificateCheck check = check_delta_certificate(cert);
    const double sup = testing::sup_abs(cert.eps);
    worst_delta = std::max(worst_delta, check.delta);
    worst_sup = std::max(worst_sup, sup);
    if (check.delta > 1e-11) o.fail("N=" + std::to_string(n) + " delta " + sci(check.delta));
    if (sup > 1e-13) o.fail("N=" + std::to_string(n) + " sup|eps| " + sci(sup));
    if (!check.is_cert) o.fail("N=" + std::to_string(n) + " not strictly positive");
  }
  std::istringstream rows(out.str());
  for (std::string line; std::getline(rows, line);) {
    if (line.empty() || line[0] == '#' || line[0] == 'N') continue;
    std::istringstream ls(line);
    int n = 0, iter = 0;
    std::string alpha, r;
    ls >> n >> alpha >> r >> iter;
    worst_iter = std::max(worst_iter, iter);
  }
  if (o.pass) {
    o.detail = std::to_string(expected_ns.size()) + " certificates, max delta " + sci(worst_delta) +
               ", max |eps_i| " + sci(worst_sup) + ", max iterations " + std::to_string(worst_iter);
  }
  return o;
}

Outcome criterion_desk_sweep(const fs::path& dir) {
  cli::SweepOptions opts;
  opts.n_max = 300;
  opts.out_dir = dir;
  return check_sweep_dir(opts, SweepSchedule::dense(300).values());
}

Outcome criterion_strided(const fs::path& dir) {
  cli::SweepOptions opts;
  opts.n_max = 1000;
  opts.stride_from = 300;
  opts.stride = 50;
  opts.out_dir = dir;
  return check_sweep_dir(opts, SweepSchedule::strided(1000, 300, 50).values());
}

Outcome criterion_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> alpha_dist(1.0 + 1e-6, 2.0 - 1e-6);
  std::uniform_real_distribution<double> rate_dist(1e-6, 0.4);
  std::uniform_real_distribution<double> d_dist(0.0, 2.0);
  constexpr int kTrials = 200;
  double worst_ratio = 0.0;
  double weakest_detection = INFINITY;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 13);
    const RateParams params =
        trial % 2 == 0 ? solve_rate_params(n) : RateParams{n, alpha_dist(rng), rate_dist(rng)};
    std::vector<double> d(n - 1);
    for (double& x : d) {
      do x = d_dist(rng); while (x == 0.0);
    }
    const FullCertificate cert = derive_full(params, d);
    const double limit = 1e-10 * oracle_scale(cert);
    const double deviation = oracle_check(cert);
    worst_ratio = std::max(worst_ratio, deviation / limit);
    if (deviation > limit) o.fail("trial " + std::to_string(trial) + " deviation " + sci(deviation));

    const auto probe = [&](std::vector<double> FullCertificate::*member, int index) {
      FullCertificate bumped = cert;
      (bumped.*member)[index] += 1e-3;
      const double dev = oracle_check(bumped);
      weakest_detection = std::min(weakest_detection, dev);
      if (!(dev > 1e-5)) o.fail("trial " + std::to_string(trial) + " perturbation undetected");
    };
    for (int i = 0; i < n; ++i) probe(&FullCertificate::a, i);
    for (int i = 0; i < n - 1; ++i) probe(&FullCertificate::b, i);
  }
  if (o.pass) {
    o.detail = std::to_string(kTrials) + " trials, max deviation/limit " + sci(worst_ratio) +
               ", min perturbed deviation " + sci(weakest_detection);
  }
  return o;
}

Outcome criterion_rates() {
  Outcome o;
  const RateParams one = solve_rate_params(1);
  if (std::abs(one.alpha - 1.5) > 1e-12 || std::abs(one.rate - 0.125) > 1e-12) {
    o.fail("alpha(1)=" + format_double(one.alpha) + " r(1)=" + format_double(one.rate));
  }
  double worst = 0.0;
  extended prev = 1;
  for (int n = 1; n <= 10000; ++n) {
    const ExtendedRateParams p = solve_rate_params_extended(n);
    const double rel =
        static_cast<double>(fabsq(quadratic_rate(n, p.alpha) - huber_rate(n, p.alpha)) / p.rate);
    worst = std::max(worst, rel);
    if (rel > 1e-14) o.fail("N=" + std::to_string(n) + " relative balance " + sci(rel));
    if (!(p.rate < prev)) o.fail("r not decreasing at N=" + std::to_string(n));
    prev = p.rate;
  }
  if (o.pass) o.detail = "N in [1, 1e4], max relative balance " + sci(worst);
  return o;
}

Outcome criterion_envelope() {
  Outcome o;
  const double step = 1e-3;
  std::vector<double> grid;
  for (int k = 0; 0.1 + k * step <= 1.99 + 1e-12; ++k) grid.push_back(0.1 + k * step);
  for (const int n : {1, 10, 100}) {
    const RateParams p = solve_rate_params(n);
    const std::vector<double> env = lower_bound_envelope(n, grid);
    std::size_t best = 0;
    for (std::size_t k = 0; k < env.size(); ++k) {
      if (env[k] < p.rate - 1e-12) o.fail("N=" + std::to_string(n) + " envelope below r");
      if (env[k] < env[best]) best = k;
    }
    if (std::abs(grid[best] - p.alpha) > step) {
      o.fail("N=" + std::to_string(n) + " minimizer " + format_double(grid[best]));
    }
  }
  if (o.pass) o.detail = std::to_string(grid.size()) + " grid points for N in {1, 10, 100}";
  return o;
}

Outcome criterion_simulation() {
  Outcome o;
  double worst = 0.0;
  for (int n = 1; n <= 50; ++n) {
    for (const double alpha : {1.0, 1.5, solve_rate_params(n).alpha}) {
      const double q = simulate(ObjectiveSpec::quadratic(), 1.0, alpha, n).final_value();
      const double h =
          simulate(ObjectiveSpec::huber(1.0 / (2.0 * n * alpha + 1.0)), 1.0, alpha, n).final_value();
      const double err = std::max(std::abs(q - quadratic_rate(n, alpha)), std::abs(h - huber_rate(n, alpha)));
      worst = std::max(worst, err);
      if (err > 1e-12) o.fail("N=" + std::to_string(n) + " alpha=" + format_double(alpha));
    }
  }
  if (o.pass) o.detail = "max deviation " + sci(worst);
  return o;
}

Outcome criterion_structure(const std::vector<fs::path>& dirs) {
  Outcome o;
  int count = 0;
  double worst_col = 0.0, worst_rc = 0.0, worst_ratio = 0.0;
  for (const fs::path& dir : dirs) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const CertificateFile file = read_certificate(entry.path());
      const FullCertificate cert = derive_full(solve_rate_params(file.n), file.d);
      const LambdaMatrix lambda = assemble_lambda(cert);
      const BalanceCheck b = check_lambda_structure(lambda, cert);
      const double ratio = second_eigenvalue_ratio(slack_gram(cert));
      const std::string tag = "N=" + std::to_string(file.n);
      worst_col = std::max(worst_col, std::abs(b.last_column_sum - 1.0));
      worst_rc = std::max(worst_rc, b.max_row_column_error);
      worst_ratio = std::max(worst_ratio, ratio);
      if (std::abs(b.last_column_sum - 1.0) > 1e-12) o.fail(tag + " column-N sum " + format_double(b.last_column_sum));
      if (b.max_row_column_error > 1e-12) o.fail(tag + " row-column error " + sci(b.max_row_column_error));
      if (!b.pattern_exact) o.fail(tag + " pattern");
      if (!b.nonnegative) o.fail(tag + " negative multiplier");
      if (ratio > 1e-10 || !slack_psd_check(cert)) o.fail(tag + " slack not rank one, ratio " + sci(ratio));
      ++count;
    }
  }
  if (o.pass) {
    o.detail = std::to_string(count) + " certificates, |col_N - 1| <= " + sci(worst_col) +
               ", row-col err <= " + sci(worst_rc) + ", sigma2/sigma1 <= " + sci(worst_ratio);
  }
  return o;
}

Outcome criterion_files(const fs::path& dir) {
  Outcome o;
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const CertificateFile parsed = parse_certificate(text);
    if (render(parsed) != text || !(parse_certificate(render(parsed)) == parsed)) {
      o.fail("round trip " + entry.path().filename().string());
    }
    cli::VerifyOptions v;
    v.file = entry.path();
    std::ostringstream out, err;
    const int code = cli::cmd_verify(v, out, err);
    if (code != cli::kOk) o.fail("verify exit " + std::to_string(code) + " on " + entry.path().filename().string());
    ++count;
  }
  if (count != 298) o.fail("expected 298 files, found " + std::to_string(count));
  if (o.pass) o.detail = std::to_string(count) + " files verified and round-tripped";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path root = fs::temp_directory_path() / ("pepcert_acceptance_" + std::to_string(::getpid()));
  bool keep = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--keep") == 0 && i + 1 < argc) {
      root = argv[++i];
      keep = true;
    }
  }
  fs::remove_all(root);
  const fs::path desk = root / "sweep300";
  const fs::path strided = root / "strided1000";

  int failures = 0;
  const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << " -- " << o.detail << " ("
              << std::fixed;
    std::cout.precision(1);
    std::cout << secs << " s)" << std::endl;
    std::cout.unsetf(std::ios::fixed);
  };

  report(1, "desk-scale sweep N=3..300", [&] { return criterion_desk_sweep(desk); });
  report(2, "strided continuation to N=1000", [&] { return criterion_strided(strided); });
  report(3, "sum lambda Q oracle identity", criterion_oracle);
  report(4, "rate-parameter exactness", criterion_rates);
  report(5, "lower-bound envelope", criterion_envelope);
  report(6, "simulation vs closed forms", criterion_simulation);
  report(7, "lambda structure and rank-one slack", [&] { return criterion_structure({desk, strided}); });
  report(8, "end-to-end file soundness", [&] { return criterion_files(desk); });

  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  if (!keep) fs::remove_all(root);
  return failures == 0 ? 0 : 1;
}
