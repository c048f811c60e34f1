#pragma once

#include <Eigen/Dense>

#include "pepcert/recursion.hpp"

namespace pepcert {

// PEP points are {star, 0, 1, ..., N}; star maps to matrix position 0 and
// iterate k to position k + 1.
inline constexpr int kStar = -1;
inline constexpr int point_position(int point) { return point + 1; }

// Multiplier matrix lambda_{ij} attached to the inequalities Q_ij >= 0.
struct LambdaMatrix {
  int n = 0;
  Eigen::MatrixXd entries;  // (N+2) x (N+2)

  double operator()(int i, int j) const { return entries(point_position(i), point_position(j)); }
};

// A linear functional on (f_star, f_0, ..., f_N) plus a symmetric quadratic
// form on the basis (x_0 - x_star, g_0, ..., g_N). Gram position 0 is
// x_0 - x_star and position k + 1 is g_k.
struct QuadraticAggregate {
  Eigen::VectorXd fcoef;
  Eigen::MatrixXd gram;

  static QuadraticAggregate zero(int n);
  QuadraticAggregate& operator+=(const QuadraticAggregate& other);
  QuadraticAggregate& operator*=(double s);
};

inline constexpr int kShiftBasis = 0;
inline constexpr int gradient_basis(int k) { return k + 1; }

// Largest absolute entry of fcoef and gram differences.
double max_deviation(const QuadraticAggregate& lhs, const QuadraticAggregate& rhs);

// Writes only the structured entries: row star = c, superdiagonal a,
// subdiagonal b, and d_i c_j for j >= i + 2.
LambdaMatrix assemble_lambda(const FullCertificate& cert);

// Q_ij = f_i - f_j - <g_j, x_i - x_j> - |g_i - g_j|^2 / 2 along gradient
// descent with constant stepsize alpha (x_k = x_0 - alpha sum_{l<k} g_l,
// g_star = 0). Throws std::invalid_argument for bad or equal indices.
QuadraticAggregate q_form(int i, int j, int n, double alpha);

// sum_ij lambda_ij Q_ij in O(N^2), accumulated column by column.
QuadraticAggregate aggregate(const LambdaMatrix& lambda, double alpha);

// f_star - f_N + r(|h|^2 - |h - (1/2r) sum c_i g_i|^2)
//   + sum_{i<N} eps_i (f_i - f_star) + (eps_N / 2) |g_0|^2,  h = x_0 - x_star.
QuadraticAggregate rhs_with_errors(const FullCertificate& cert);

// Max coefficient deviation between aggregate(assemble_lambda(cert)) and
// rhs_with_errors(cert). Near zero for any d when the recursion is right.
double oracle_check(const FullCertificate& cert);

// Scale used when comparing oracle deviations: max(1, |c|^2 / r).
double oracle_scale(const FullCertificate& cert);

struct DeltaCertificateCheck {
  bool is_cert = false;  // a, b, c, d strictly positive
  double delta = 0.0;    // sum_i max(eps_i, 0)
  double bound = 0.0;    // r + delta / 2
};

DeltaCertificateCheck check_delta_certificate(const FullCertificate& cert);

// Slack Gram r |h - (1/2r) sum c_i g_i|^2, recovered as r|h|^2 minus the
// eps-free right-hand side gram.
Eigen::MatrixXd slack_gram(const FullCertificate& cert);

// Coefficient vector v of h - (1/2r) sum c_i g_i over the gram basis.
Eigen::VectorXd slack_direction(const FullCertificate& cert);

// True iff gram == r v v^T to 1e-12 relative to its scale.
bool is_rank_one_slack(const Eigen::MatrixXd& gram, const FullCertificate& cert);
bool slack_psd_check(const FullCertificate& cert);

// Ratio of the second-largest to largest absolute eigenvalue of a symmetric matrix.
double second_eigenvalue_ratio(const Eigen::MatrixXd& symmetric);

struct BalanceCheck {
  double max_row_column_error = 0.0;  // max_i |rowsum_i - colsum_i - eps_i|, i < N
  double last_column_sum = 0.0;
  bool pattern_exact = false;
  bool nonnegative = false;
};

// Positions allowed to be nonzero in the low-rank multiplier pattern.
bool in_certificate_pattern(int i, int j, int n);

BalanceCheck check_lambda_structure(const LambdaMatrix& lambda, const FullCertificate& cert);

}  // namespace pepcert
