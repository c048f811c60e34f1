#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pepcert/rates.hpp"
#include "pepcert/recursion.hpp"

namespace pepcert {

enum class SolveStatus {
  kConverged,      // residual_sup <= tol and a, b, c, d > 0
  kNotPositive,    // residual_sup <= tol but some multiplier is <= 0
  kStagnated,      // no damped step decreased |eps|_2
  kMaxIterations,
};

const char* to_string(SolveStatus status);

struct SolveReport {
  RateParams params;
  std::vector<double> d;
  int iterations = 0;
  double residual_sup = 0.0;  // max_i |eps_i|
  double delta = 0.0;         // sum_i max(eps_i, 0)
  bool positive = false;
  bool converged = false;
  SolveStatus status = SolveStatus::kMaxIterations;
  bool rank_deficient = false;          // some Jacobian had rank < N-1
  std::vector<double> residual_norms;   // |eps|_2 at the start and after each step
  std::optional<std::uint64_t> seed;    // set by bootstrap_smallest
};

struct GaussNewtonOptions {
  double tol = 1e-13;
  int max_iter = 50;
  int max_halvings = 20;        // step lengths 1, 1/2, ..., 2^-max_halvings
  double rank_threshold = 1e-12;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, SolveReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

inline constexpr double kDefaultJacobianStep = 1.0 / (1 << 13);

// d eps_i / d d_k by central differences with step max(1, |d_k|) * step_scale.
// The residual is quadratic in d, so only rounding error remains.
Eigen::MatrixXd jacobian(const RateParams& params, std::span<const double> d,
                         double step_scale = kDefaultJacobianStep);

struct LeastSquaresStep {
  Eigen::VectorXd step;  // argmin |J s + eps|_2, minimum norm when rank deficient
  int rank = 0;
  bool rank_deficient = false;
};

LeastSquaresStep least_squares_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& eps,
                                    double rank_threshold = 1e-12);

// Damped Gauss-Newton on eps(d) = 0. Does not throw on failure; inspect
// report.status. Positivity is only checked on the final iterate.
SolveReport gauss_newton(const RateParams& params, std::span<const double> d0,
                         const GaussNewtonOptions& options = {});

struct SolvedPoint {
  int n = 0;
  std::vector<double> d;
};

// Piecewise-linear resampling of d (length N-1) onto target_n - 1 points of
// the normalized grid t_i = i / (N - 2).
std::vector<double> resample(std::span<const double> d, int target_n);

// Linear-in-N extrapolation of the resampled shapes, clamped below at 1e-12.
// Equal source sizes are accepted only for identical sources.
std::vector<double> extrapolate_init(const SolvedPoint& first, const SolvedPoint& second,
                                     int target_n);

inline constexpr std::uint64_t kBootstrapSeed = 0x5eedcafe2024ULL;

// Multi-start Gauss-Newton at N = 3: constant ladder, then seeded random
// positive starts. Throws NonConvergence when every start fails.
SolveReport bootstrap_smallest(const RateParams& params, const GaussNewtonOptions& options = {});

struct SweepSegment {
  int start = 3;
  int stop = 3;
  int stride = 1;
};

struct SweepSchedule {
  std::vector<SweepSegment> segments;

  // Throws std::invalid_argument unless the sweep starts at 3, strides are
  // positive and each segment begins at or after the previous stop.
  void validate() const;
  // Distinct N values in increasing order.
  std::vector<int> values() const;

  static SweepSchedule dense(int n_max);
  static SweepSchedule strided(int n_max, int stride_from, int stride);
  // 3..2240 every value, then every 320th to 8960, then every 1600th to 20160.
  static SweepSchedule full_scale();
};

struct SweepResult {
  std::vector<SolveReport> reports;
  std::optional<int> failed_n;
  std::optional<SolveReport> failed_report;
};

using ReportCallback = std::function<void(const SolveReport&)>;

// Continuation: bootstrap at N = 3, resample for the second value, then
// extrapolate from the two most recent certificates. Stops at the first
// failure and records it.
SweepResult sweep(const SweepSchedule& schedule, const GaussNewtonOptions& options = {},
                  const ReportCallback& on_report = {});

}  // namespace pepcert
