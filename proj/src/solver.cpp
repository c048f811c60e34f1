#include "pepcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pepcert/verifier.hpp"

namespace pepcert {
namespace {

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

void finalize(SolveReport& report, const std::vector<double>& eps, double tol, bool stagnated) {
  const FullCertificate cert = derive_full(report.params, report.d);
  const DeltaCertificateCheck check = check_delta_certificate(cert);
  report.residual_sup = sup_norm(eps);
  report.delta = check.delta;
  report.positive = check.is_cert;
  if (report.residual_sup <= tol) {
    report.status = report.positive ? SolveStatus::kConverged : SolveStatus::kNotPositive;
  } else {
    report.status = stagnated ? SolveStatus::kStagnated : SolveStatus::kMaxIterations;
  }
  report.converged = report.status == SolveStatus::kConverged;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kNotPositive: return "not-positive";
    case SolveStatus::kStagnated: return "stagnated";
    case SolveStatus::kMaxIterations: return "max-iterations";
  }
  return "unknown";
}

Eigen::MatrixXd jacobian(const RateParams& params, std::span<const double> d, double step_scale) {
  const int cols = static_cast<int>(d.size());
  Eigen::MatrixXd jac(params.n + 1, cols);
  std::vector<double> probe(d.begin(), d.end());
  for (int k = 0; k < cols; ++k) {
    const double h = std::max(1.0, std::abs(d[k])) * step_scale;
    probe[k] = d[k] + h;
    const std::vector<double> plus = residual(params, probe);
    probe[k] = d[k] - h;
    const std::vector<double> minus = residual(params, probe);
    probe[k] = d[k];
    for (int i = 0; i <= params.n; ++i) jac(i, k) = (plus[i] - minus[i]) / (2.0 * h);
  }
  return jac;
}

LeastSquaresStep least_squares_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& eps,
                                    double rank_threshold) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(rank_threshold);
  cod.compute(jac);
  LeastSquaresStep out;
  out.rank = static_cast<int>(cod.rank());
  out.rank_deficient = out.rank < jac.cols();
  out.step = cod.solve(-eps);
  return out;
}

SolveReport gauss_newton(const RateParams& params, std::span<const double> d0,
                         const GaussNewtonOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("gauss_newton: tol must be positive");
  SolveReport report;
  report.params = params;
  report.d.assign(d0.begin(), d0.end());

  std::vector<double> eps = residual(params, report.d);
  double norm = as_vector(eps).norm();
  report.residual_norms.push_back(norm);
  bool stagnated = false;

  while (report.iterations < options.max_iter && sup_norm(eps) > options.tol) {
    const Eigen::MatrixXd jac = jacobian(params, report.d);
    const LeastSquaresStep ls = least_squares_step(jac, as_vector(eps), options.rank_threshold);
    report.rank_deficient = report.rank_deficient || ls.rank_deficient;

    const Eigen::VectorXd current = as_vector(report.d);
    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving <= options.max_halvings; ++halving, t /= 2.0) {
      std::vector<double> trial = as_std(current + t * ls.step);
      std::vector<double> trial_eps = residual(params, trial);
      const double trial_norm = as_vector(trial_eps).norm();
      if (trial_norm < norm) {
        report.d = std::move(trial);
        eps = std::move(trial_eps);
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stagnated = true;
      break;
    }
    ++report.iterations;
    report.residual_norms.push_back(norm);
  }

  finalize(report, eps, options.tol, stagnated);
  return report;
}

std::vector<double> resample(std::span<const double> d, int target_n) {
  if (d.size() < 2) throw std::invalid_argument("resample: source needs N >= 3");
  if (target_n < kMinCertificateN) throw std::invalid_argument("resample: target needs N >= 3");
  const int out_len = target_n - 1;
  if (static_cast<int>(d.size()) == out_len) return {d.begin(), d.end()};

  const double src_last = static_cast<double>(d.size() - 1);
  std::vector<double> out(out_len);
  for (int k = 0; k < out_len; ++k) {
    const double pos = src_last * static_cast<double>(k) / static_cast<double>(out_len - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), d.size() - 2);
    const double w = pos - static_cast<double>(lo);
    out[k] = (1.0 - w) * d[lo] + w * d[lo + 1];
  }
  return out;
}

std::vector<double> extrapolate_init(const SolvedPoint& first, const SolvedPoint& second,
                                     int target_n) {
  if (first.n < kMinCertificateN) throw std::invalid_argument("extrapolate_init: N1 must be >= 3");
  if (static_cast<int>(first.d.size()) != first.n - 1 ||
      static_cast<int>(second.d.size()) != second.n - 1) {
    throw std::invalid_argument("extrapolate_init: source d has wrong length");
  }
  static constexpr double kFloor = 1e-12;
  const auto clamp = [](std::vector<double> v) {
    for (double& x : v) x = std::max(x, kFloor);
    return v;
  };
  if (second.n == first.n) {
    if (first.d != second.d) {
      throw std::invalid_argument("extrapolate_init: N2 must exceed N1 for distinct sources");
    }
    return clamp(resample(first.d, target_n));
  }
  if (second.n < first.n) throw std::invalid_argument("extrapolate_init: N2 must exceed N1");

  const std::vector<double> u = resample(first.d, target_n);
  const std::vector<double> v = resample(second.d, target_n);
  const double ratio = static_cast<double>(target_n - first.n) / (second.n - first.n);
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + ratio * (v[i] - u[i]);
  return clamp(std::move(out));
}

SolveReport bootstrap_smallest(const RateParams& params, const GaussNewtonOptions& options) {
  if (params.n != kMinCertificateN) {
    throw std::invalid_argument("bootstrap_smallest: only defined for N = 3");
  }
  const int len = params.n - 1;
  std::vector<double> ladder = {0.05};
  for (int k = 1; k <= 10; ++k) ladder.push_back(0.1 * k);

  SolveReport last;
  for (const double kappa : ladder) {
    last = gauss_newton(params, std::vector<double>(len, kappa), options);
    last.seed = kBootstrapSeed;
    if (last.converged) return last;
  }

  std::mt19937_64 rng(kBootstrapSeed);
  std::uniform_real_distribution<double> entry(0.01, 2.0);
  constexpr int kRandomStarts = 64;
  for (int attempt = 0; attempt < kRandomStarts; ++attempt) {
    std::vector<double> start(len);
    for (double& x : start) x = entry(rng);
    last = gauss_newton(params, start, options);
    last.seed = kBootstrapSeed;
    if (last.converged) return last;
  }
  throw NonConvergence("bootstrap_smallest: no start converged at N = 3", last);
}

void SweepSchedule::validate() const {
  if (segments.empty()) throw std::invalid_argument("sweep schedule is empty");
  if (segments.front().start != kMinCertificateN) {
    throw std::invalid_argument("sweep schedule must start at N = 3");
  }
  int previous_stop = kMinCertificateN;
  for (const SweepSegment& seg : segments) {
    if (seg.stride < 1) throw std::invalid_argument("sweep stride must be >= 1");
    if (seg.stop < seg.start) throw std::invalid_argument("sweep segment stop precedes start");
    if (seg.start < previous_stop) {
      throw std::invalid_argument("sweep segments must not overlap");
    }
    previous_stop = seg.stop;
  }
}

std::vector<int> SweepSchedule::values() const {
  validate();
  std::vector<int> out;
  for (const SweepSegment& seg : segments) {
    for (int n = seg.start; n <= seg.stop; n += seg.stride) {
      if (out.empty() || n > out.back()) out.push_back(n);
    }
  }
  return out;
}

SweepSchedule SweepSchedule::dense(int n_max) { return {{{kMinCertificateN, n_max, 1}}}; }

SweepSchedule SweepSchedule::strided(int n_max, int stride_from, int stride) {
  if (stride_from >= n_max) return dense(n_max);
  return {{{kMinCertificateN, stride_from, 1}, {stride_from, n_max, stride}}};
}

SweepSchedule SweepSchedule::full_scale() {
  return {{{kMinCertificateN, 2240, 1}, {2240, 8960, 320}, {8960, 20160, 1600}}};
}

SweepResult sweep(const SweepSchedule& schedule, const GaussNewtonOptions& options,
                  const ReportCallback& on_report) {
  const std::vector<int> ns = schedule.values();
  SweepResult result;
  std::vector<SolvedPoint> solved;

  for (const int n : ns) {
    const RateParams params = solve_rate_params(n);
    SolveReport report;
    if (solved.empty()) {
      try {
        report = bootstrap_smallest(params, options);
      } catch (const NonConvergence& e) {
        report = e.report();
      }
    } else if (solved.size() == 1) {
      report = gauss_newton(params, extrapolate_init(solved[0], solved[0], n), options);
    } else {
      const SolvedPoint& older = solved[solved.size() - 2];
      const SolvedPoint& newer = solved.back();
      report = gauss_newton(params, extrapolate_init(older, newer, n), options);
    }

    if (!report.converged) {
      result.failed_n = n;
      result.failed_report = std::move(report);
      break;
    }
    solved.push_back({n, report.d});
    if (solved.size() > 2) solved.erase(solved.begin());
    if (on_report) on_report(report);
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace pepcert
