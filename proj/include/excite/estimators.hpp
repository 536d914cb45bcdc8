#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "excite/types.hpp"

namespace excite {

/// Minimal interface shared by the online estimators, so detection wrappers
/// can drive any of them: advance by one datum, expose the estimate, and
/// reset auxiliary state (covariance, excitation memory) while keeping the
/// current estimate.
class OnlineEstimator {
 public:
  virtual ~OnlineEstimator() = default;

  /// Processes one datum. Returns true when the datum entered the
  /// estimator's excitation set (always true for estimators without one).
  virtual bool step(const Datum& d) = 0;

  virtual const Vector& theta() const = 0;

  /// Restores all auxiliary state to its initial value; the current estimate
  /// is kept.
  virtual void reset_state() = 0;

  virtual void set_theta(const Vector& theta) = 0;

  /// Parameter dimension p.
  virtual Eigen::Index dim() const = 0;
};

struct GwRlsOptions {
  double alpha = 0.98;  ///< forgetting factor, in (0, 1]
  /// Optional bound on the excitation set size; once reached, further
  /// acceptances are refused (and a warning is printed once).
  std::optional<std::int64_t> excitation_cap;
};

/// Greedily-weighted recursive least squares. Each datum is tested against
/// the excitation set: it is admitted iff it does not worsen the set's
/// condition number (ties admit, and an empty set has infinite condition
/// number, so the first informative datum is always admitted). Admitted data
/// keep asymptotically unit weight; all other data are forgotten
/// exponentially at rate alpha. The covariance update uses the
/// matrix-inversion-lemma form with the full weighted regressor stack, so
/// the iterate matches the closed-form weighted batch solution exactly.
class GwRls final : public OnlineEstimator {
 public:
  /// theta0 is the initial estimate and p0 the initial covariance (symmetric
  /// positive definite). Throws std::invalid_argument on a non-PD p0 or
  /// alpha outside (0, 1].
  GwRls(Vector theta0, Matrix p0, GwRlsOptions options = {});

  /// Algorithm step. An all-zero regressor block carries no information and
  /// is skipped entirely (no state change, returns false).
  bool step(const Datum& d) override;

  const Vector& theta() const override { return theta_; }
  void set_theta(const Vector& theta) override;
  void reset_state() override;
  Eigen::Index dim() const override { return p_; }

  const Matrix& covariance() const { return cov_; }
  /// Condition number of the excitation-set information matrix H^(e).
  /// Non-increasing across admissions.
  double excitation_condition() const { return kappa_exc_; }
  const Matrix& excitation_info() const { return h_exc_; }
  /// Sample indices (Datum::k) of the admitted data, in admission order.
  const std::vector<std::int64_t>& admitted() const { return admitted_; }
  std::int64_t excitation_size() const { return blocks_; }
  double forgetting() const { return options_.alpha; }
  bool cap_reached() const { return cap_hit_; }

 private:
  Eigen::Index p_;
  GwRlsOptions options_;
  Vector theta0_;
  Matrix p0_;

  Matrix h_exc_;    // H^(e): excitation-set information matrix
  Matrix phi_exc_;  // stacked admitted regressor blocks
  Vector ups_exc_;  // accumulated sum phi^T psi over the excitation set
  Matrix cov_;      // P
  Vector theta_;
  double kappa_exc_;
  std::int64_t blocks_ = 0;
  std::vector<std::int64_t> admitted_;
  bool cap_hit_ = false;
};

struct EfRlsOptions {
  double alpha = 0.98;  ///< forgetting factor, in (0, 1]
};

/// Classic exponential-forgetting recursive least squares baseline. All data
/// are weighted alpha^(k-i); no excitation set. Prone to covariance wind-up
/// when the stream stops being persistently exciting.
class EfRls final : public OnlineEstimator {
 public:
  EfRls(Vector theta0, Matrix p0, EfRlsOptions options = {});

  bool step(const Datum& d) override;
  const Vector& theta() const override { return theta_; }
  void set_theta(const Vector& theta) override;
  void reset_state() override;
  Eigen::Index dim() const override { return p_; }

  const Matrix& covariance() const { return cov_; }
  double forgetting() const { return options_.alpha; }

 private:
  Eigen::Index p_;
  EfRlsOptions options_;
  Vector theta0_;
  Matrix p0_;
  Matrix cov_;
  Vector theta_;
};

/// One normalized-free gradient identification step:
/// theta + phi^T (psi - phi theta).
Vector gradient_step(const Vector& theta, const Datum& d);

/// Gradient identifier as an OnlineEstimator (no auxiliary state).
class GradientEstimator final : public OnlineEstimator {
 public:
  explicit GradientEstimator(Vector theta0);

  bool step(const Datum& d) override;
  const Vector& theta() const override { return theta_; }
  void set_theta(const Vector& theta) override;
  void reset_state() override {}
  Eigen::Index dim() const override { return theta_.size(); }

 private:
  Vector theta_;
};

/// Closed-form counterpart of GwRls: the weighted batch least-squares
/// problem whose minimizer the recursion reproduces after each step.
struct WeightedBatchProblem {
  std::vector<Datum> data;               ///< processed data, first datum is index 1
  std::vector<std::int64_t> excitation;  ///< 1-based positions of admitted data
  double alpha = 0.98;
  Vector theta0;
  Matrix p0;
};

/// Minimizer of
///   sum_{i=1..k} w_{i,k} |psi_i - phi_i theta|^2
///     + alpha^k |theta - theta0|^2_{P0^-1},
/// with w_{i,k} = 1 - alpha^(k-i+1) for admitted i and alpha^(k-i) otherwise
/// (at alpha = 1 admitted weights collapse to 0). The prior decays as
/// alpha^k, matching a recursion started from P = P0. Throws
/// std::invalid_argument for k outside [1, data.size()] or invalid problem
/// data.
Vector batch_weighted_estimate(const WeightedBatchProblem& problem, std::int64_t k);

}  // namespace excite
