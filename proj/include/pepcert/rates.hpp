#pragma once

#include <span>
#include <vector>

namespace pepcert {

// 113-bit binary floating point (GCC/libquadmath). Used where the balance
// equation has to be resolved below double rounding: the mismatch between the
// two closed forms grows like 2N times the error in alpha.
using extended = __float128;

// Stepsize/rate pair for N steps, normalized to L = D = 1.
struct RateParams {
  int n = 0;
  double alpha = 0.0;
  double rate = 0.0;
};

struct ExtendedRateParams {
  int n = 0;
  extended alpha = 0;
  extended rate = 0;

  RateParams rounded() const {
    return {n, static_cast<double>(alpha), static_cast<double>(rate)};
  }
};

// Unique alpha in [1, 2) with 1/(2(2N alpha + 1)) = (1 - alpha)^{2N} / 2, and
// the common value r of both sides. Throws std::invalid_argument for N < 1 and
// std::runtime_error if the bracket does not hold exactly one sign change.
ExtendedRateParams solve_rate_params_extended(int n);
RateParams solve_rate_params(int n);

// phi(alpha) = (alpha - 1)^{2N} (2 N alpha + 1) - 1, evaluated in log domain.
extended balance_residual(int n, extended alpha);

// Final gap of N gradient steps on Q(x) = x^2 / 2 from x0 = 1.
double quadratic_rate(int n, double alpha);
extended quadratic_rate(int n, extended alpha);

// Final gap on the Huber function with breakpoint 1 / (2 N alpha + 1).
double huber_rate(int n, double alpha);
extended huber_rate(int n, extended alpha);

// max(quadratic_rate, huber_rate) for each stepsize; the worst case of the two
// extremal objectives, bounded below by r(N).
std::vector<double> lower_bound_envelope(int n, std::span<const double> alphas);

enum class ObjectiveKind { kQuadratic, kHuber };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::kQuadratic;
  double delta = 1.0;  // Huber breakpoint, unused for the quadratic

  static ObjectiveSpec quadratic() { return {ObjectiveKind::kQuadratic, 1.0}; }
  static ObjectiveSpec huber(double delta) { return {ObjectiveKind::kHuber, delta}; }

  double value(double x) const;
  double gradient(double x) const;
};

struct SimTrace {
  std::vector<double> xs;
  std::vector<double> fvals;
  std::vector<double> gvals;

  double final_value() const { return fvals.back(); }
};

// Exact 1-D gradient descent x_{k+1} = x_k - alpha f'(x_k), k = 0..N-1.
SimTrace simulate(const ObjectiveSpec& objective, double x0, double alpha, int n);

}  // namespace pepcert
