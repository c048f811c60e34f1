#include "pepcert/rates.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pepcert {
namespace {

// psi(alpha) = log(phi(alpha) + 1) = 2N log(alpha - 1) + log(2 N alpha + 1).
// Strictly increasing on (1, 2], so it shares the unique root of phi there.
extended log_balance(int n, extended alpha) {
  const extended two_n = 2 * static_cast<extended>(n);
  return two_n * logq(alpha - 1) + logq(two_n * alpha + 1);
}

extended log_balance_slope(int n, extended alpha) {
  const extended two_n = 2 * static_cast<extended>(n);
  return two_n / (alpha - 1) + two_n / (two_n * alpha + 1);
}

void require_single_sign_change(int n) {
  constexpr int kSamples = 256;
  int changes = 0;
  bool prev_negative = true;  // psi -> -inf as alpha -> 1+
  for (int k = 1; k <= kSamples; ++k) {
    const extended alpha = 1 + static_cast<extended>(k) / kSamples;
    const bool negative = log_balance(n, alpha) < 0;
    if (negative != prev_negative) ++changes;
    prev_negative = negative;
  }
  if (changes != 1) {
    throw std::runtime_error("balance equation for N=" + std::to_string(n) + " has " +
                             std::to_string(changes) + " sign changes on (1, 2]");
  }
}

}  // namespace

extended balance_residual(int n, extended alpha) {
  const extended two_n = 2 * static_cast<extended>(n);
  return expq(two_n * logq(fabsq(alpha - 1))) * (two_n * alpha + 1) - 1;
}

ExtendedRateParams solve_rate_params_extended(int n) {
  if (n < 1) throw std::invalid_argument("solve_rate_params: N must be >= 1");
  require_single_sign_change(n);

  // Newton on psi, safeguarded by the bracket (lo, hi] with psi(lo) < 0 <= psi(hi).
  extended lo = 1;
  extended hi = 2;
  extended x = static_cast<extended>(1.5);
  for (int iter = 0; iter < 400; ++iter) {
    const extended value = log_balance(n, x);
    if (value == 0) {
      lo = hi = x;
      break;
    }
    if (value < 0) {
      lo = x;
    } else {
      hi = x;
    }
    extended next = x - value / log_balance_slope(n, x);
    if (!(next > lo && next < hi)) next = lo + (hi - lo) / 2;
    if (next == x || hi - lo <= FLT128_EPSILON * hi) {
      x = next;
      break;
    }
    x = next;
  }
  if (!(x > 1 && x < 2)) {
    throw std::runtime_error("solve_rate_params: root left the bracket for N=" + std::to_string(n));
  }
  return {n, x, huber_rate(n, x)};
}

RateParams solve_rate_params(int n) { return solve_rate_params_extended(n).rounded(); }

double quadratic_rate(int n, double alpha) {
  return std::pow(1.0 - alpha, 2.0 * n) / 2.0;
}

extended quadratic_rate(int n, extended alpha) {
  const extended base = fabsq(1 - alpha);
  if (base == 0) return 0;
  return powq(base, 2 * static_cast<extended>(n)) / 2;
}

double huber_rate(int n, double alpha) { return 1.0 / (2.0 * (2.0 * n * alpha + 1.0)); }

extended huber_rate(int n, extended alpha) {
  return 1 / (2 * (2 * static_cast<extended>(n) * alpha + 1));
}

std::vector<double> lower_bound_envelope(int n, std::span<const double> alphas) {
  std::vector<double> out;
  out.reserve(alphas.size());
  for (const double alpha : alphas) {
    out.push_back(std::max(quadratic_rate(n, alpha), huber_rate(n, alpha)));
  }
  return out;
}

double ObjectiveSpec::value(double x) const {
  if (kind == ObjectiveKind::kHuber && std::abs(x) >= delta) {
    return delta * std::abs(x) - delta * delta / 2.0;
  }
  return x * x / 2.0;
}

double ObjectiveSpec::gradient(double x) const {
  if (kind == ObjectiveKind::kHuber && std::abs(x) > delta) {
    return x > 0 ? delta : -delta;
  }
  return x;
}

SimTrace simulate(const ObjectiveSpec& objective, double x0, double alpha, int n) {
  if (n < 1) throw std::invalid_argument("simulate: N must be >= 1");
  if (objective.kind == ObjectiveKind::kHuber && !(objective.delta > 0.0)) {
    throw std::invalid_argument("simulate: Huber breakpoint must be positive");
  }
  SimTrace trace;
  trace.xs.reserve(n + 1);
  trace.fvals.reserve(n + 1);
  trace.gvals.reserve(n + 1);
  double x = x0;
  for (int k = 0; k <= n; ++k) {
    const double g = objective.gradient(x);
    trace.xs.push_back(x);
    trace.fvals.push_back(objective.value(x));
    trace.gvals.push_back(g);
    x -= alpha * g;
  }
  return trace;
}

}  // namespace pepcert
