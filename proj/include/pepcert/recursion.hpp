#pragma once

#include <span>
#include <vector>

#include "pepcert/rates.hpp"

namespace pepcert {

// Multiplier vectors parameterizing the low-rank certificate, plus the
// residuals eps_0..eps_N left over when d is not an exact certificate.
//   a: N entries, b: N-1, c: N+1, d: N-1, eps: N+1 (all 0-based).
struct FullCertificate {
  RateParams params;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> d;
  std::vector<double> eps;

  int n() const { return params.n; }
};

struct RecursionOptions {
  // Kahan summation for the prefix sums of d and suffix sums of c.
  bool compensated = false;
};

struct ABVectors {
  std::vector<double> a;
  std::vector<double> b;
};

// Smallest N handled by the elimination (eps_0 needs d_0 and d_1 terms).
inline constexpr int kMinCertificateN = 3;

// Throws std::invalid_argument unless N >= 3 and the lengths match.
void check_certificate_shape(const FullCertificate& cert);

// c_i = 2r(alpha sum_{l<=i} d_l - d_i + alpha) for i <= N-2,
// c_{N-1} = 2r(1 + sum d + (alpha-1)/sqrt(2r)), c_N = sqrt(2r).
std::vector<double> c_from_d(const RateParams& params, std::span<const double> d,
                             const RecursionOptions& options = {});

// a_{N-1} from the unit column sum, (a_{N-2}, b_{N-2}) and then (a_i, b_i)
// for i = N-3 down to 0 from the 2x2 coefficient systems on |g_{i+1}|^2 and
// <g_i, g_{i+1}>.
ABVectors ab_from_cd(const RateParams& params, std::span<const double> c,
                     std::span<const double> d, const RecursionOptions& options = {});

// Row-minus-column imbalance eps_0..eps_{N-1} and the |g_0|^2 coefficient eps_N.
std::vector<double> eps_from(const RateParams& params, std::span<const double> a,
                             std::span<const double> b, std::span<const double> c,
                             std::span<const double> d, const RecursionOptions& options = {});

// eps as a function of d alone; each component is a quadratic polynomial in d.
std::vector<double> residual(const RateParams& params, std::span<const double> d,
                             const RecursionOptions& options = {});

FullCertificate derive_full(const RateParams& params, std::span<const double> d,
                            const RecursionOptions& options = {});

}  // namespace pepcert
