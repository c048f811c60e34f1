#include "pepcert/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "pepcert/certificate_file.hpp"
#include "pepcert/rates.hpp"
#include "pepcert/recursion.hpp"
#include "pepcert/solver.hpp"
#include "pepcert/verifier.hpp"

namespace pepcert::cli {
namespace {

constexpr double kStoredVectorTolerance = 1e-12;

void print_report(const SolveReport& report, std::ostream& out) {
  out << "N " << report.params.n << '\n'
      << "alpha " << format_double(report.params.alpha) << '\n'
      << "r " << format_double(report.params.rate) << '\n'
      << "status " << to_string(report.status) << '\n'
      << "iterations " << report.iterations << '\n'
      << "residual_sup " << format_double(report.residual_sup) << '\n'
      << "delta " << format_double(report.delta) << '\n'
      << "positive " << (report.positive ? "yes" : "no") << '\n';
  if (report.rank_deficient) out << "rank_deficient yes\n";
}

void print_table_header(std::ostream& out) {
  out << std::left << std::setw(7) << "N" << std::setw(24) << "alpha" << std::setw(24) << "r"
      << std::setw(6) << "iter" << std::setw(24) << "residual_sup"
      << "delta\n";
}

void print_table_row(const SolveReport& report, std::ostream& out) {
  out << std::left << std::setw(7) << report.params.n << std::setw(24)
      << format_double(report.params.alpha) << std::setw(24) << format_double(report.params.rate)
      << std::setw(6) << report.iterations << std::setw(24) << format_double(report.residual_sup)
      << format_double(report.delta) << '\n';
}

void write_report(const SolveReport& report, const std::filesystem::path& dir) {
  const FullCertificate cert = derive_full(report.params, report.d);
  write_certificate(certificate_path(dir, report.params.n),
                    CertificateFile::from_certificate(cert, report.delta));
}

// Largest deviation of a stored vector from the recomputed one, relative to
// max(1, |recomputed|).
double stored_mismatch(const std::optional<std::vector<double>>& stored,
                       const std::vector<double>& recomputed) {
  if (!stored) return 0.0;
  if (stored->size() != recomputed.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    const double diff = std::abs((*stored)[i] - recomputed[i]);
    worst = std::max(worst, diff / std::max(1.0, std::abs(recomputed[i])));
  }
  return worst;
}

bool ensure_dir(const std::filesystem::path& dir, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create output directory '" << dir.string() << "': " << ec.message()
        << '\n';
    return false;
  }
  return true;
}

}  // namespace

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

int cmd_rates(int n, std::ostream& out, std::ostream& err) {
  if (n < 1) {
    err << "usage: rates N  (N >= 1)\n";
    return kUsage;
  }
  const ExtendedRateParams ext = solve_rate_params_extended(n);
  const RateParams params = ext.rounded();
  const extended mismatch = quadratic_rate(n, ext.alpha) - huber_rate(n, ext.alpha);
  out << "N " << n << '\n'
      << "alpha " << format_double(params.alpha) << '\n'
      << "r " << format_double(params.rate) << '\n'
      << "balance_residual " << format_double(std::abs(static_cast<double>(mismatch))) << '\n';
  return kOk;
}

int cmd_solve(const SolveOptions& options, std::ostream& out, std::ostream& err) {
  if (options.n < kMinCertificateN) {
    err << "usage: solve N [--warm FILE [FILE]]  (N >= 3)\n";
    return kUsage;
  }
  if (options.warm.size() > 2) {
    err << "usage: at most two --warm certificate files\n";
    return kUsage;
  }
  if (!ensure_dir(options.out_dir, err)) return kUsage;

  GaussNewtonOptions gn;
  gn.tol = options.tol;
  gn.max_iter = options.max_iter;
  const RateParams params = solve_rate_params(options.n);

  std::vector<SolvedPoint> sources;
  for (const auto& path : options.warm) {
    CertificateFile file;
    try {
      file = read_certificate(path);
    } catch (const FormatError& e) {
      err << "error: " << e.what() << '\n';
      return kCorrupt;
    }
    if (file.n >= options.n) {
      err << "usage: warm-start certificate " << path.string() << " has N=" << file.n
          << ", must be below " << options.n << '\n';
      return kUsage;
    }
    sources.push_back({file.n, file.d});
  }
  std::sort(sources.begin(), sources.end(),
            [](const SolvedPoint& x, const SolvedPoint& y) { return x.n < y.n; });

  SolveReport report;
  std::string stage;
  if (options.n == kMinCertificateN && sources.empty()) {
    stage = "bootstrap at N=3";
    try {
      report = bootstrap_smallest(params, gn);
    } catch (const NonConvergence& e) {
      report = e.report();
    }
  } else if (sources.empty()) {
    stage = "continuation from N=3";
    const SweepResult result = sweep(SweepSchedule::dense(options.n), gn);
    if (result.failed_n) {
      err << "error: non-convergence during " << stage << " at N=" << *result.failed_n << '\n';
      if (result.failed_report) print_report(*result.failed_report, err);
      return kNonConvergence;
    }
    report = result.reports.back();
  } else {
    stage = "gauss-newton from warm start";
    const SolvedPoint& older = sources.front();
    const SolvedPoint& newer = sources.back();
    if (sources.size() == 2 && older.n == newer.n) {
      err << "usage: warm-start certificates must have distinct N\n";
      return kUsage;
    }
    report = gauss_newton(params, extrapolate_init(older, newer, options.n), gn);
  }

  print_report(report, out);
  if (!report.converged) {
    err << "error: non-convergence during " << stage << " (" << to_string(report.status) << ")\n";
    return kNonConvergence;
  }
  write_report(report, options.out_dir);
  out << "wrote " << certificate_path(options.out_dir, options.n).string() << '\n';
  return kOk;
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  SweepSchedule schedule;
  if (options.full_scale) {
    schedule = SweepSchedule::full_scale();
  } else {
    if (options.n_max < kMinCertificateN || options.stride < 1) {
      err << "usage: sweep N_MAX [--stride-from N --stride K]  (N_MAX >= 3, K >= 1)\n";
      return kUsage;
    }
    schedule = options.stride_from
                   ? SweepSchedule::strided(options.n_max, *options.stride_from, options.stride)
                   : SweepSchedule::dense(options.n_max);
  }
  try {
    schedule.validate();
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  }
  if (!ensure_dir(options.out_dir, err)) return kUsage;

  GaussNewtonOptions gn;
  gn.tol = options.tol;
  gn.max_iter = options.max_iter;

  print_table_header(out);
  const SweepResult result = sweep(schedule, gn, [&](const SolveReport& report) {
    write_report(report, options.out_dir);
    print_table_row(report, out);
    out.flush();
  });

  double worst_delta = 0.0;
  double worst_sup = 0.0;
  int worst_iter = 0;
  for (const SolveReport& r : result.reports) {
    worst_delta = std::max(worst_delta, r.delta);
    worst_sup = std::max(worst_sup, r.residual_sup);
    worst_iter = std::max(worst_iter, r.iterations);
  }
  out << "# solved " << result.reports.size() << " certificates; max residual_sup "
      << format_double(worst_sup) << ", max delta " << format_double(worst_delta)
      << ", max iterations " << worst_iter << '\n';
  if (result.failed_n) {
    err << "error: sweep aborted, non-convergence at N=" << *result.failed_n << '\n';
    if (result.failed_report) print_report(*result.failed_report, err);
    return kNonConvergence;
  }
  return kOk;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  CertificateFile file;
  try {
    file = read_certificate(options.file);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kCorrupt;
  }

  const RateParams params = solve_rate_params(file.n);
  const auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1e-300, std::abs(y)); };
  bool corrupt = false;
  if (rel(file.alpha, params.alpha) > 1e-14 || rel(file.rate, params.rate) > 1e-14) {
    err << "corruption: stored alpha/r differ from the recomputed rate parameters\n";
    corrupt = true;
  }

  const FullCertificate cert = derive_full(params, file.d);
  const DeltaCertificateCheck check = check_delta_certificate(cert);
  double sup = 0.0;
  for (const double e : cert.eps) sup = std::max(sup, std::abs(e));

  const double mismatch = std::max({stored_mismatch(file.a, cert.a), stored_mismatch(file.b, cert.b),
                                    stored_mismatch(file.c, cert.c),
                                    stored_mismatch(file.eps, cert.eps)});
  if (mismatch > kStoredVectorTolerance) {
    err << "corruption: stored derived vectors differ from recomputed ones by "
        << format_double(mismatch) << '\n';
    corrupt = true;
  }
  if (std::abs(file.delta - check.delta) > kStoredVectorTolerance) {
    err << "corruption: stored delta " << format_double(file.delta) << " but recomputed "
        << format_double(check.delta) << '\n';
    corrupt = true;
  }

  const bool delta_ok = check.delta <= options.tol;
  out << "N " << file.n << '\n'
      << "alpha " << format_double(params.alpha) << '\n'
      << "r " << format_double(params.rate) << '\n'
      << "residual_sup " << format_double(sup) << '\n'
      << "delta " << format_double(check.delta) << (delta_ok ? "" : "  FAIL") << '\n'
      << "positivity " << (check.is_cert ? "ok" : "FAIL") << '\n'
      << "bound " << format_double(check.bound) << '\n';

  bool oracle_ok = true;
  if (options.oracle) {
    const double deviation = oracle_check(cert);
    const double limit = 1e-10 * oracle_scale(cert);
    oracle_ok = deviation <= limit;
    out << "oracle_deviation " << format_double(deviation) << " (limit " << format_double(limit)
        << ")" << (oracle_ok ? "" : "  FAIL") << '\n';
  }

  const bool verified = check.is_cert && delta_ok && oracle_ok;
  out << "verdict " << (verified ? "delta-certificate" : "rejected") << '\n';
  if (!verified) return kVerificationFailed;
  if (corrupt) return kCorrupt;
  return kOk;
}

int cmd_plotdata(const PlotDataOptions& options, std::ostream& out, std::ostream& err) {
  if (options.files.empty()) {
    err << "usage: plotdata FILE...\n";
    return kUsage;
  }
  if (!ensure_dir(options.out_dir, err)) return kUsage;
  for (const auto& path : options.files) {
    CertificateFile file;
    try {
      file = read_certificate(path);
    } catch (const FormatError& e) {
      err << "error: " << e.what() << '\n';
      return kCorrupt;
    }
    const FullCertificate cert = derive_full(solve_rate_params(file.n), file.d);
    const std::pair<const char*, const std::vector<double>*> vectors[] = {
        {"a", &cert.a}, {"b", &cert.b}, {"c", &cert.c}, {"d", &cert.d}};
    for (const auto& [name, values] : vectors) {
      const double peak = *std::max_element(values->begin(), values->end());
      if (!(peak > 0.0)) {
        err << "error: " << path.string() << ": vector " << name << " has no positive entry\n";
        return kVerificationFailed;
      }
      const auto target = options.out_dir / (std::string(name) + "_N" + std::to_string(file.n) + ".dat");
      std::ofstream os(target);
      if (!os) {
        err << "error: cannot write '" << target.string() << "'\n";
        return kUsage;
      }
      os << "# N=" << file.n << " vector " << name << " index/(len-1) value/max\n";
      const std::size_t last = values->size() - 1;
      for (std::size_t i = 0; i < values->size(); ++i) {
        os << format_double(static_cast<double>(i) / static_cast<double>(last)) << ' '
           << format_double((*values)[i] / peak) << '\n';
      }
      out << "wrote " << target.string() << '\n';
    }
  }
  return kOk;
}

std::optional<std::vector<double>> parse_grid(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string::npos ? std::string::npos : spec.find(':', first + 1);
  if (second == std::string::npos) return std::nullopt;
  double lo = 0.0, hi = 0.0, step = 0.0;
  try {
    lo = parse_double(std::string_view(spec).substr(0, first));
    hi = parse_double(std::string_view(spec).substr(first + 1, second - first - 1));
    step = parse_double(std::string_view(spec).substr(second + 1));
  } catch (const FormatError&) {
    return std::nullopt;
  }
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) return std::nullopt;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (long k = 0; k < count; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  return grid;
}

int cmd_envelope(const EnvelopeOptions& options, std::ostream& out, std::ostream& err) {
  if (options.n < 1) {
    err << "usage: envelope N [--grid lo:hi:step]  (N >= 1)\n";
    return kUsage;
  }
  const auto grid = parse_grid(options.grid);
  if (!grid) {
    err << "usage: --grid expects lo:hi:step with step > 0 and hi >= lo\n";
    return kUsage;
  }
  const RateParams params = solve_rate_params(options.n);
  const std::vector<double> values = lower_bound_envelope(options.n, *grid);
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());

  out << "# N " << options.n << " alpha(N) " << format_double(params.alpha) << " r(N) "
      << format_double(params.rate) << '\n';
  out << "# alpha max(quadratic, huber)\n";
  for (std::size_t k = 0; k < grid->size(); ++k) {
    out << format_double((*grid)[k]) << ' ' << format_double(values[k]) << (k == best ? " *" : "")
        << '\n';
  }
  out << "# min at alpha " << format_double((*grid)[best]) << " value " << format_double(values[best])
      << '\n';
  return kOk;
}

}  // namespace pepcert::cli
