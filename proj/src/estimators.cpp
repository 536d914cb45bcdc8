#include "excite/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "excite/signal.hpp"

namespace excite {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void symmetrize(Matrix& m) { m = ((m + m.transpose()) / 2.0).eval(); }

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("forgetting factor must be in (0, 1], got " +
                                std::to_string(alpha));
  }
}

// Validates that p0 is a symmetric positive-definite p x p matrix matching
// theta0, and that both are finite.
void check_prior(const Vector& theta0, const Matrix& p0) {
  if (theta0.size() < 1 || !theta0.allFinite()) {
    throw std::invalid_argument("initial estimate must be finite and non-empty");
  }
  if (p0.rows() != theta0.size() || p0.cols() != theta0.size() || !p0.allFinite()) {
    throw std::invalid_argument("initial covariance must be p x p and finite");
  }
  if (!p0.isApprox(p0.transpose(), 1e-12)) {
    throw std::invalid_argument("initial covariance must be symmetric");
  }
  const Eigen::LLT<Matrix> llt(p0);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("initial covariance must be positive definite");
  }
}

// Shared exponential-forgetting covariance update:
//   P <- (1/alpha) * (P - P Phi^T (alpha I + Phi P Phi^T)^-1 Phi P),
// the matrix-inversion-lemma form of (alpha P^-1 + Phi^T Phi)^-1.
void update_covariance(Matrix& cov, const Matrix& phi, double alpha) {
  const Eigen::Index m = phi.rows();
  const Eigen::Index p = phi.cols();
  // Stacks past this many rows switch from the m x m Cholesky solve to a
  // compressed p x p solve. The Cholesky path is kept for moderate stacks
  // because its symmetric factorization tracks the exact batch solution a
  // few digits more closely; the compressed path exists so that per-step
  // cost stays O(m p^2) instead of O(m^3) when the stack grows tall.
  constexpr Eigen::Index kTallStack = 64;
  if (m > p && m > kTallStack) {
    // Push the inverse through to parameter space,
    //   Phi^T (alpha I_m + Phi P Phi^T)^-1 Phi = C (alpha I_p + P C)^-1
    // with C = Phi^T Phi; the m x m and p x p pencils share their nonzero
    // spectrum, so conditioning is equivalent.
    const Matrix c = phi.transpose() * phi;
    Matrix pencil = cov * c;  // alpha I + P C, nonsymmetric but real-spectrum
    pencil.diagonal().array() += alpha;
    const Matrix y = pencil.partialPivLu().solve(cov);  // (alpha I + P C)^-1 P
    cov.noalias() -= cov * c * y;
  } else {
    const Matrix g = phi * cov;  // m x p
    Matrix s = g * phi.transpose();
    s.diagonal().array() += alpha;
    const Matrix x = s.llt().solve(g);  // S^-1 Phi P
    cov.noalias() -= g.transpose() * x;
  }
  cov /= alpha;
  symmetrize(cov);
}

}  // namespace

GwRls::GwRls(Vector theta0, Matrix p0, GwRlsOptions options)
    : p_(theta0.size()),
      options_(options),
      theta0_(std::move(theta0)),
      p0_(std::move(p0)),
      h_exc_(Matrix::Zero(p_, p_)),
      phi_exc_(0, p_),
      ups_exc_(Vector::Zero(p_)),
      theta_(theta0_),
      kappa_exc_(kInf) {
  check_alpha(options_.alpha);
  check_prior(theta0_, p0_);
  if (options_.excitation_cap && *options_.excitation_cap < 1) {
    throw std::invalid_argument("excitation cap must be >= 1 when given");
  }
  cov_ = p0_;
}

bool GwRls::step(const Datum& d) {
  validate_datum(d, p_);
  if (d.phi.isZero(0.0)) {
    // A zero regressor carries no information; keep all state as-is.
    return false;
  }
  const double alpha = options_.alpha;

  Matrix h_test = h_exc_ + d.phi.transpose() * d.phi;
  symmetrize(h_test);
  const double kappa_test = condition_number(h_test);
  bool admit = kappa_test <= kappa_exc_;  // ties admit; inf <= inf bootstraps
  if (admit && options_.excitation_cap && blocks_ >= *options_.excitation_cap) {
    admit = false;
    cap_hit_ = true;
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      std::fprintf(stderr,
                   "warning: excitation set reached its cap of %lld blocks; "
                   "further admissions refused\n",
                   static_cast<long long>(*options_.excitation_cap));
    }
  }

  const double root = std::sqrt(1.0 - alpha);
  Matrix h;
  Vector ups;
  Matrix phi_stack;
  if (admit) {
    h_exc_ = std::move(h_test);
    kappa_exc_ = kappa_test;
    phi_exc_.conservativeResize(phi_exc_.rows() + d.phi.rows(), Eigen::NoChange);
    phi_exc_.bottomRows(d.phi.rows()) = d.phi;
    ups_exc_.noalias() += d.phi.transpose() * d.psi;
    ++blocks_;
    admitted_.push_back(d.k);
    h = (1.0 - alpha) * h_exc_;
    ups = (1.0 - alpha) * ups_exc_;
    phi_stack = root * phi_exc_;
  } else {
    h = (1.0 - alpha) * h_exc_ + d.phi.transpose() * d.phi;
    ups = (1.0 - alpha) * ups_exc_ + d.phi.transpose() * d.psi;
    phi_stack.resize(phi_exc_.rows() + d.phi.rows(), p_);
    phi_stack.topRows(phi_exc_.rows()) = root * phi_exc_;
    phi_stack.bottomRows(d.phi.rows()) = d.phi;
  }

  update_covariance(cov_, phi_stack, alpha);
  theta_.noalias() += cov_ * (ups - h * theta_);
  return admit;
}

void GwRls::set_theta(const Vector& theta) {
  if (theta.size() != p_ || !theta.allFinite()) {
    throw std::invalid_argument("set_theta: expected a finite length-" + std::to_string(p_) +
                                " vector");
  }
  theta_ = theta;
}

void GwRls::reset_state() {
  h_exc_.setZero();
  phi_exc_.resize(0, p_);
  ups_exc_.setZero();
  cov_ = p0_;
  kappa_exc_ = kInf;
  blocks_ = 0;
  admitted_.clear();
  cap_hit_ = false;
}

EfRls::EfRls(Vector theta0, Matrix p0, EfRlsOptions options)
    : p_(theta0.size()),
      options_(options),
      theta0_(std::move(theta0)),
      p0_(std::move(p0)),
      theta_(theta0_) {
  check_alpha(options_.alpha);
  check_prior(theta0_, p0_);
  cov_ = p0_;
}

bool EfRls::step(const Datum& d) {
  validate_datum(d, p_);
  update_covariance(cov_, d.phi, options_.alpha);
  theta_.noalias() += cov_ * d.phi.transpose() * (d.psi - d.phi * theta_);
  return true;
}

void EfRls::set_theta(const Vector& theta) {
  if (theta.size() != p_ || !theta.allFinite()) {
    throw std::invalid_argument("set_theta: expected a finite length-" + std::to_string(p_) +
                                " vector");
  }
  theta_ = theta;
}

void EfRls::reset_state() { cov_ = p0_; }

Vector gradient_step(const Vector& theta, const Datum& d) {
  validate_datum(d, theta.size());
  return theta + d.phi.transpose() * (d.psi - d.phi * theta);
}

GradientEstimator::GradientEstimator(Vector theta0) : theta_(std::move(theta0)) {
  if (theta_.size() < 1 || !theta_.allFinite()) {
    throw std::invalid_argument("initial estimate must be finite and non-empty");
  }
}

bool GradientEstimator::step(const Datum& d) {
  theta_ = gradient_step(theta_, d);
  return true;
}

void GradientEstimator::set_theta(const Vector& theta) {
  if (theta.size() != theta_.size() || !theta.allFinite()) {
    throw std::invalid_argument("set_theta: dimension mismatch or non-finite value");
  }
  theta_ = theta;
}

Vector batch_weighted_estimate(const WeightedBatchProblem& problem, std::int64_t k) {
  const double alpha = problem.alpha;
  check_alpha(alpha);
  check_prior(problem.theta0, problem.p0);
  if (k < 1 || k > static_cast<std::int64_t>(problem.data.size())) {
    throw std::invalid_argument("batch_weighted_estimate: k must be in [1, data.size()]");
  }
  const Eigen::Index p = problem.theta0.size();

  const Matrix p0_inv = problem.p0.llt().solve(Matrix::Identity(p, p));
  const double prior_weight = std::pow(alpha, static_cast<double>(k));
  Matrix a = prior_weight * p0_inv;
  Vector b = prior_weight * (p0_inv * problem.theta0);

  std::vector<std::int64_t> admitted = problem.excitation;
  std::sort(admitted.begin(), admitted.end());
  for (std::int64_t i = 1; i <= k; ++i) {
    const Datum& d = problem.data[static_cast<std::size_t>(i - 1)];
    validate_datum(d, p);
    const bool in_set = std::binary_search(admitted.begin(), admitted.end(), i);
    const double w = in_set ? 1.0 - std::pow(alpha, static_cast<double>(k - i + 1))
                            : std::pow(alpha, static_cast<double>(k - i));
    if (w == 0.0) {
      continue;
    }
    a.noalias() += w * (d.phi.transpose() * d.phi);
    b.noalias() += w * (d.phi.transpose() * d.psi);
  }
  symmetrize(a);
  return a.ldlt().solve(b);
}

}  // namespace excite
