#pragma once

#include <cstdint>
#include <limits>
#include <memory>

#include "excite/estimators.hpp"
#include "excite/types.hpp"

namespace excite {

/// Survival function of the chi-squared distribution with one degree of
/// freedom: P(X > d) = erfc(sqrt(d / 2)). Throws std::invalid_argument for
/// negative or non-finite d.
double chi2_sf_1dof(double d);

/// Model-predictability signal: Y = -log10(max(|psi - phi theta|^2, 1e-300)).
/// Large when the estimate predicts the datum well; the floor keeps a
/// perfect prediction finite (Y = 300).
double predictability(const Datum& d, const Vector& theta);

/// Exponentially weighted moving average with first-sample initialization:
/// the first update sets Z = y, later ones Z <- eta * y + (1 - eta) * Z.
class Ewma {
 public:
  /// Throws std::invalid_argument unless eta is in [0, 1].
  explicit Ewma(double eta);

  double update(double y);
  double value() const { return z_; }
  /// True once the first sample has been absorbed.
  bool primed() const { return primed_; }
  void reset();

 private:
  double eta_;
  double z_ = 0.0;
  bool primed_ = false;
};

struct LrtOptions {
  double eta = 0.5;               ///< EWMA smoothing weight, in [0, 1]
  double tau = 0.1;               ///< significance level; detect when p <= tau
  std::int64_t min_samples = 0;   ///< detections suppressed until n reaches this
  bool reset_on_change = false;   ///< clear (n, lambda, Z) after a detection
};

/// Recursive likelihood-ratio change detector on the predictability signal.
/// Downward drifts E = (Z_{k-1} - Y_k)^2 are modelled as exponential with
/// running rate lambda_n estimated from n absorbed drifts; each new drift is
/// tested with the statistic D = 2 (n ln lambda_n - (n+1) ln lambda + 1),
/// lambda = (n+1) / (n/lambda_n + E), whose p-value is chi2_sf_1dof(D).
/// A detection leaves (n, lambda_n, Z) untouched unless reset_on_change is
/// set; otherwise the drift is absorbed into the running estimate.
class LrtDetector {
 public:
  struct Step {
    bool detected = false;
    bool tested = false;  ///< a downward drift was scored this step
    double y = 0.0;
    double z = 0.0;       ///< EWMA value after the step (frozen on detection)
    double e = std::numeric_limits<double>::quiet_NaN();  ///< squared drift
    double d = std::numeric_limits<double>::quiet_NaN();  ///< LRT statistic
    double p = std::numeric_limits<double>::quiet_NaN();  ///< p-value
  };

  explicit LrtDetector(LrtOptions options);

  /// Processes one predictability sample. The very first sample only seeds
  /// the EWMA. Throws std::invalid_argument on non-finite input.
  Step step(double y);

  std::int64_t drift_count() const { return n_; }
  double rate() const { return lambda_n_; }
  const Ewma& ewma() const { return ewma_; }
  const LrtOptions& options() const { return options_; }

 private:
  LrtOptions options_;
  Ewma ewma_;
  std::int64_t n_ = 0;
  double lambda_n_ = 0.0;
};

struct ResettingOptions {
  bool reset_theta = false;  ///< also restore theta to its initial value on reset
};

/// Change-point-aware wrapper: runs the inner estimator, scores the datum's
/// predictability against the pre-update estimate, and on detection resets
/// the inner estimator's auxiliary state (covariance, excitation memory)
/// while keeping the freshly updated estimate — or additionally restoring
/// the initial estimate when reset_theta is set.
class ResettingEstimator {
 public:
  struct Step {
    bool admitted = false;  ///< inner estimator's excitation-set flag
    LrtDetector::Step detection;
  };

  ResettingEstimator(std::unique_ptr<OnlineEstimator> inner, LrtDetector detector,
                     ResettingOptions options = {});

  Step step(const Datum& d);

  const Vector& theta() const { return inner_->theta(); }
  OnlineEstimator& inner() { return *inner_; }
  const OnlineEstimator& inner() const { return *inner_; }
  const LrtDetector& detector() const { return detector_; }
  std::int64_t detections() const { return detections_; }

 private:
  std::unique_ptr<OnlineEstimator> inner_;
  LrtDetector detector_;
  ResettingOptions options_;
  Vector theta0_;
  std::int64_t detections_ = 0;
};

}  // namespace excite
