#include "pepcert/recursion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pepcert {
namespace {

class Accumulator {
 public:
  explicit Accumulator(bool compensated) : compensated_(compensated) {}

  void add(double x) {
    if (!compensated_) {
      sum_ += x;
      return;
    }
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

 private:
  bool compensated_;
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw std::invalid_argument(std::string(op) + ": " + what);
}

void require_n(const RateParams& params, const char* op) {
  require(params.n >= kMinCertificateN, op, "N must be >= 3, got " + std::to_string(params.n));
}

void require_len(std::span<const double> v, int expected, const char* op, const char* name) {
  require(static_cast<long>(v.size()) == expected, op,
          std::string(name) + " has length " + std::to_string(v.size()) + ", expected " +
              std::to_string(expected));
}

// prefix[i] = sum_{j < i} d_j for i = 0..N-1.
std::vector<double> prefix_sums(std::span<const double> d, bool compensated) {
  std::vector<double> prefix(d.size() + 1, 0.0);
  Accumulator acc(compensated);
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc.add(d[i]);
    prefix[i + 1] = acc.value();
  }
  return prefix;
}

// suffix[k] = sum_{j >= k} c_j for k = 0..N+2 (zero past the end).
std::vector<double> suffix_sums(std::span<const double> c, bool compensated) {
  std::vector<double> suffix(c.size() + 2, 0.0);
  Accumulator acc(compensated);
  for (std::size_t k = c.size(); k-- > 0;) {
    acc.add(c[k]);
    suffix[k] = acc.value();
  }
  return suffix;
}

}  // namespace

void check_certificate_shape(const FullCertificate& cert) {
  const int n = cert.n();
  require_n(cert.params, "certificate");
  require_len(cert.a, n, "certificate", "a");
  require_len(cert.b, n - 1, "certificate", "b");
  require_len(cert.c, n + 1, "certificate", "c");
  require_len(cert.d, n - 1, "certificate", "d");
  require_len(cert.eps, n + 1, "certificate", "eps");
}

std::vector<double> c_from_d(const RateParams& params, std::span<const double> d,
                             const RecursionOptions& options) {
  require_n(params, "c_from_d");
  const int n = params.n;
  require_len(d, n - 1, "c_from_d", "d");
  const double alpha = params.alpha;
  const double two_r = 2.0 * params.rate;
  const double root_two_r = std::sqrt(two_r);
  const std::vector<double> prefix = prefix_sums(d, options.compensated);

  std::vector<double> c(n + 1);
  for (int i = 0; i <= n - 2; ++i) {
    c[i] = two_r * (alpha * prefix[i + 1] - d[i] + alpha);
  }
  c[n - 1] = two_r * (1.0 + prefix[n - 1] + (alpha - 1.0) / root_two_r);
  c[n] = root_two_r;
  return c;
}

ABVectors ab_from_cd(const RateParams& params, std::span<const double> c,
                     std::span<const double> d, const RecursionOptions& options) {
  require_n(params, "ab_from_cd");
  const int n = params.n;
  require_len(c, n + 1, "ab_from_cd", "c");
  require_len(d, n - 1, "ab_from_cd", "d");

  const double alpha = params.alpha;
  const double inv_two_r = 1.0 / (2.0 * params.rate);
  const double am1 = alpha - 1.0;
  const double tam1 = 2.0 * alpha - 1.0;
  const std::vector<double> prefix = prefix_sums(d, options.compensated);
  const std::vector<double> suffix = suffix_sums(c, options.compensated);

  ABVectors out{std::vector<double>(n), std::vector<double>(n - 1)};
  auto& a = out.a;
  auto& b = out.b;

  a[n - 1] = 1.0 - c[n] * (1.0 + prefix[n - 1]);

  {
    const double cc = c[n - 1];
    const double weight = 1.0 + prefix[n - 2];
    a[n - 2] = (inv_two_r * cc * cc + inv_two_r * c[n - 2] * cc - a[n - 1] -
                (1.0 + alpha) * cc * weight) /
               alpha;
    b[n - 2] = (am1 * inv_two_r * cc * cc - inv_two_r * c[n - 2] * cc - am1 * a[n - 1] +
                cc * weight) /
               alpha;
  }

  for (int i = n - 3; i >= 0; --i) {
    const double cc = c[i + 1];
    const double weight = 1.0 + prefix[i];
    const double tail = d[i + 1] * suffix[i + 3];
    a[i] = (inv_two_r * cc * cc + inv_two_r * c[i] * cc - a[i + 1] - (1.0 + alpha) * cc * weight -
            tail + b[i + 1] * tam1) /
           alpha;
    b[i] = (am1 * inv_two_r * cc * cc - inv_two_r * c[i] * cc - am1 * a[i + 1] + cc * weight -
            am1 * tail + am1 * b[i + 1] * tam1) /
           alpha;
  }
  return out;
}

std::vector<double> eps_from(const RateParams& params, std::span<const double> a,
                             std::span<const double> b, std::span<const double> c,
                             std::span<const double> d, const RecursionOptions& options) {
  require_n(params, "eps_from");
  const int n = params.n;
  require_len(a, n, "eps_from", "a");
  require_len(b, n - 1, "eps_from", "b");
  require_len(c, n + 1, "eps_from", "c");
  require_len(d, n - 1, "eps_from", "d");

  const double alpha = params.alpha;
  const std::vector<double> prefix = prefix_sums(d, options.compensated);
  const std::vector<double> suffix = suffix_sums(c, options.compensated);

  std::vector<double> eps(n + 1);
  eps[0] = a[0] + d[0] * suffix[2] - b[0] - c[0];
  for (int i = 1; i <= n - 2; ++i) {
    eps[i] = b[i - 1] + a[i] + d[i] * suffix[i + 2] - a[i - 1] - b[i] -
             c[i] * (1.0 + prefix[i - 1]);
  }
  eps[n - 1] = b[n - 2] + a[n - 1] - a[n - 2] - c[n - 1] * (1.0 + prefix[n - 2]);
  eps[n] = -c[0] - a[0] - d[0] * suffix[2] + (2.0 * alpha - 1.0) * b[0] +
           c[0] * c[0] / (2.0 * params.rate);
  return eps;
}

std::vector<double> residual(const RateParams& params, std::span<const double> d,
                             const RecursionOptions& options) {
  const std::vector<double> c = c_from_d(params, d, options);
  const ABVectors ab = ab_from_cd(params, c, d, options);
  return eps_from(params, ab.a, ab.b, c, d, options);
}

FullCertificate derive_full(const RateParams& params, std::span<const double> d,
                            const RecursionOptions& options) {
  FullCertificate cert;
  cert.params = params;
  cert.d.assign(d.begin(), d.end());
  cert.c = c_from_d(params, d, options);
  ABVectors ab = ab_from_cd(params, cert.c, d, options);
  cert.a = std::move(ab.a);
  cert.b = std::move(ab.b);
  cert.eps = eps_from(params, cert.a, cert.b, cert.c, cert.d, options);
  return cert;
}

}  // namespace pepcert
