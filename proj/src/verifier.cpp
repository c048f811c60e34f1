#include "pepcert/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pepcert {
namespace {

// Adds coef * <u, w> for gram basis positions u, w.
void add_inner(Eigen::MatrixXd& gram, int u, int w, double coef) {
  if (u == w) {
    gram(u, u) += coef;
  } else {
    gram(u, w) += coef / 2.0;
    gram(w, u) += coef / 2.0;
  }
}

// Coefficients of x_k - x_star over the gram basis; zero for star.
Eigen::VectorXd position_vector(int point, int n, double alpha) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 2);
  if (point == kStar) return x;
  x(kShiftBasis) = 1.0;
  for (int l = 0; l < point; ++l) x(gradient_basis(l)) = -alpha;
  return x;
}

Eigen::VectorXd gradient_vector(int point, int n) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n + 2);
  if (point != kStar) g(gradient_basis(point)) = 1.0;
  return g;
}

void require_point(int point, int n, const char* op) {
  if (point < kStar || point > n) {
    throw std::invalid_argument(std::string(op) + ": point index " + std::to_string(point) +
                                " outside {star, 0.." + std::to_string(n) + "}");
  }
}

}  // namespace

QuadraticAggregate QuadraticAggregate::zero(int n) {
  return {Eigen::VectorXd::Zero(n + 2), Eigen::MatrixXd::Zero(n + 2, n + 2)};
}

QuadraticAggregate& QuadraticAggregate::operator+=(const QuadraticAggregate& other) {
  fcoef += other.fcoef;
  gram += other.gram;
  return *this;
}

QuadraticAggregate& QuadraticAggregate::operator*=(double s) {
  fcoef *= s;
  gram *= s;
  return *this;
}

double max_deviation(const QuadraticAggregate& lhs, const QuadraticAggregate& rhs) {
  if (lhs.fcoef.size() != rhs.fcoef.size() || lhs.gram.rows() != rhs.gram.rows()) {
    throw std::invalid_argument("max_deviation: aggregates of different dimension");
  }
  const double f = (lhs.fcoef - rhs.fcoef).cwiseAbs().maxCoeff();
  const double g = (lhs.gram - rhs.gram).cwiseAbs().maxCoeff();
  return std::max(f, g);
}

LambdaMatrix assemble_lambda(const FullCertificate& cert) {
  check_certificate_shape(cert);
  const int n = cert.n();
  LambdaMatrix lambda{n, Eigen::MatrixXd::Zero(n + 2, n + 2)};
  auto& m = lambda.entries;
  const auto at = [](int i, int j) { return std::pair{point_position(i), point_position(j)}; };

  for (int j = 0; j <= n; ++j) {
    const auto [r, c] = at(kStar, j);
    m(r, c) = cert.c[j];
  }
  for (int i = 0; i <= n - 1; ++i) {
    const auto [r, c] = at(i, i + 1);
    m(r, c) = cert.a[i];
  }
  for (int i = 0; i <= n - 2; ++i) {
    const auto [r, c] = at(i + 1, i);
    m(r, c) = cert.b[i];
  }
  for (int i = 0; i <= n - 2; ++i) {
    for (int j = i + 2; j <= n; ++j) {
      const auto [r, c] = at(i, j);
      m(r, c) = cert.d[i] * cert.c[j];
    }
  }
  return lambda;
}

QuadraticAggregate q_form(int i, int j, int n, double alpha) {
  require_point(i, n, "q_form");
  require_point(j, n, "q_form");
  if (i == j) throw std::invalid_argument("q_form: i and j must differ");

  QuadraticAggregate q = QuadraticAggregate::zero(n);
  q.fcoef(point_position(i)) += 1.0;
  q.fcoef(point_position(j)) -= 1.0;

  const Eigen::VectorXd dx = position_vector(i, n, alpha) - position_vector(j, n, alpha);
  const Eigen::VectorXd gi = gradient_vector(i, n);
  const Eigen::VectorXd gj = gradient_vector(j, n);
  const Eigen::VectorXd dg = gi - gj;

  const Eigen::MatrixXd cross = gj * dx.transpose();
  q.gram -= 0.5 * (cross + cross.transpose());
  q.gram -= 0.5 * dg * dg.transpose();
  return q;
}

QuadraticAggregate aggregate(const LambdaMatrix& lambda, double alpha) {
  const int n = lambda.n;
  const int dim = n + 2;
  if (lambda.entries.rows() != dim || lambda.entries.cols() != dim) {
    throw std::invalid_argument("aggregate: lambda must be (N+2) x (N+2)");
  }
  QuadraticAggregate out = QuadraticAggregate::zero(n);
  Eigen::VectorXd shift(dim);

  for (int j = kStar; j <= n; ++j) {
    const int pj = point_position(j);
    const auto column = lambda.entries.col(pj);
    const double total = column.sum();
    out.fcoef += column;
    out.fcoef(pj) -= total;

    if (j == kStar) {
      // Q_{i,star} = f_i - f_star - |g_i|^2 / 2
      for (int i = 0; i <= n; ++i) out.gram(gradient_basis(i), gradient_basis(i)) -= column(point_position(i)) / 2.0;
      continue;
    }

    // shift = sum_i w_i (x_i - x_j) with x_i - x_star = h - alpha sum_{l<i} g_l.
    shift.setZero();
    double tail = 0.0;  // sum_{i > l} w_i over iterates
    for (int l = n; l >= 0; --l) {
      shift(gradient_basis(l)) = -alpha * tail;
      tail += column(point_position(l));
    }
    shift(kShiftBasis) = tail;
    shift -= total * position_vector(j, n, alpha);

    const int gj = gradient_basis(j);
    for (int k = 0; k < dim; ++k) add_inner(out.gram, gj, k, -shift(k));

    // -|g_i - g_j|^2 / 2 weighted by w_i; g_star = 0.
    for (int i = 0; i <= n; ++i) {
      const double w = column(point_position(i));
      if (w == 0.0) continue;
      const int gi = gradient_basis(i);
      out.gram(gi, gi) -= w / 2.0;
      add_inner(out.gram, gi, gj, w);
    }
    out.gram(gj, gj) -= total / 2.0;
  }
  return out;
}

namespace {

QuadraticAggregate rhs_exact_part(const FullCertificate& cert) {
  const int n = cert.n();
  const double r = cert.params.rate;
  QuadraticAggregate out = QuadraticAggregate::zero(n);
  out.fcoef(point_position(kStar)) += 1.0;
  out.fcoef(point_position(n)) -= 1.0;
  for (int i = 0; i <= n; ++i) {
    add_inner(out.gram, kShiftBasis, gradient_basis(i), cert.c[i]);
    for (int j = 0; j <= n; ++j) {
      out.gram(gradient_basis(i), gradient_basis(j)) -= cert.c[i] * cert.c[j] / (4.0 * r);
    }
  }
  return out;
}

}  // namespace

QuadraticAggregate rhs_with_errors(const FullCertificate& cert) {
  check_certificate_shape(cert);
  const int n = cert.n();
  QuadraticAggregate out = rhs_exact_part(cert);
  for (int i = 0; i <= n - 1; ++i) {
    out.fcoef(point_position(i)) += cert.eps[i];
    out.fcoef(point_position(kStar)) -= cert.eps[i];
  }
  out.gram(gradient_basis(0), gradient_basis(0)) += cert.eps[n] / 2.0;
  return out;
}

double oracle_check(const FullCertificate& cert) {
  const QuadraticAggregate lhs = aggregate(assemble_lambda(cert), cert.params.alpha);
  return max_deviation(lhs, rhs_with_errors(cert));
}

double oracle_scale(const FullCertificate& cert) {
  double norm_sq = 0.0;
  for (const double v : cert.c) norm_sq += v * v;
  return std::max(1.0, norm_sq / cert.params.rate);
}

DeltaCertificateCheck check_delta_certificate(const FullCertificate& cert) {
  check_certificate_shape(cert);
  const auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  DeltaCertificateCheck out;
  for (const double e : cert.eps) out.delta += std::max(e, 0.0);
  out.is_cert = positive(cert.a) && positive(cert.b) && positive(cert.c) && positive(cert.d);
  out.bound = cert.params.rate + out.delta / 2.0;
  return out;
}

Eigen::MatrixXd slack_gram(const FullCertificate& cert) {
  check_certificate_shape(cert);
  Eigen::MatrixXd gram = -rhs_exact_part(cert).gram;
  gram(kShiftBasis, kShiftBasis) += cert.params.rate;
  return gram;
}

Eigen::VectorXd slack_direction(const FullCertificate& cert) {
  const int n = cert.n();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 2);
  v(kShiftBasis) = 1.0;
  for (int i = 0; i <= n; ++i) v(gradient_basis(i)) = -cert.c[i] / (2.0 * cert.params.rate);
  return v;
}

bool is_rank_one_slack(const Eigen::MatrixXd& gram, const FullCertificate& cert) {
  const Eigen::VectorXd v = slack_direction(cert);
  if (gram.rows() != v.size() || gram.cols() != v.size()) return false;
  const Eigen::MatrixXd expected = cert.params.rate * v * v.transpose();
  const double scale = std::max(1.0, expected.cwiseAbs().maxCoeff());
  return (gram - expected).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

bool slack_psd_check(const FullCertificate& cert) {
  return cert.params.rate > 0.0 && is_rank_one_slack(slack_gram(cert), cert);
}

double second_eigenvalue_ratio(const Eigen::MatrixXd& symmetric) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  Eigen::VectorXd mags = solver.eigenvalues().cwiseAbs();
  std::sort(mags.data(), mags.data() + mags.size(), std::greater<>());
  if (mags.size() < 2 || mags(0) == 0.0) return 0.0;
  return mags(1) / mags(0);
}

bool in_certificate_pattern(int i, int j, int n) {
  if (i == kStar) return j != kStar;
  if (j == kStar || i == n) return false;
  if (j == i + 1) return true;             // a_i
  if (i == j + 1) return j <= n - 2;       // b_j
  return i <= n - 2 && j >= i + 2;         // d_i c_j
}

BalanceCheck check_lambda_structure(const LambdaMatrix& lambda, const FullCertificate& cert) {
  check_certificate_shape(cert);
  const int n = cert.n();
  BalanceCheck out;
  if (lambda.n != n || lambda.entries.rows() != n + 2 || lambda.entries.cols() != n + 2) {
    return out;
  }
  out.pattern_exact = true;
  for (int i = kStar; i <= n; ++i) {
    for (int j = kStar; j <= n; ++j) {
      if (!in_certificate_pattern(i, j, n) && lambda(i, j) != 0.0) out.pattern_exact = false;
    }
  }
  out.nonnegative = (lambda.entries.array() >= 0.0).all();
  for (int i = 0; i <= n - 1; ++i) {
    const int p = point_position(i);
    const double imbalance = lambda.entries.row(p).sum() - lambda.entries.col(p).sum();
    out.max_row_column_error = std::max(out.max_row_column_error, std::abs(imbalance - cert.eps[i]));
  }
  out.last_column_sum = lambda.entries.col(point_position(n)).sum();
  return out;
}

}  // namespace pepcert
