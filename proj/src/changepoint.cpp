#include "excite/changepoint.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace excite {

double chi2_sf_1dof(double d) {
  if (!std::isfinite(d) || d < 0.0) {
    throw std::invalid_argument("chi2_sf_1dof: statistic must be finite and non-negative");
  }
  return std::erfc(std::sqrt(d / 2.0));
}

double predictability(const Datum& d, const Vector& theta) {
  validate_datum(d, theta.size());
  const double sq = (d.psi - d.phi * theta).squaredNorm();
  return -std::log10(std::max(sq, 1e-300));
}

Ewma::Ewma(double eta) : eta_(eta) {
  if (!(eta >= 0.0) || !(eta <= 1.0)) {
    throw std::invalid_argument("smoothing weight must be in [0, 1]");
  }
}

double Ewma::update(double y) {
  if (primed_) {
    z_ = eta_ * y + (1.0 - eta_) * z_;
  } else {
    z_ = y;
    primed_ = true;
  }
  return z_;
}

void Ewma::reset() {
  z_ = 0.0;
  primed_ = false;
}

LrtDetector::LrtDetector(LrtOptions options) : options_(options), ewma_(options.eta) {
  if (!(options_.tau >= 0.0) || !(options_.tau <= 1.0)) {
    throw std::invalid_argument("significance level must be in [0, 1]");
  }
  if (options_.min_samples < 0) {
    throw std::invalid_argument("min_samples must be non-negative");
  }
}

LrtDetector::Step LrtDetector::step(double y) {
  if (!std::isfinite(y)) {
    throw std::invalid_argument("predictability sample must be finite");
  }
  Step out;
  out.y = y;
  if (!ewma_.primed()) {
    out.z = ewma_.update(y);
    return out;
  }
  const double drift = ewma_.value() - y;
  if (!(drift > 0.0)) {
    // Predictability held or improved; nothing to test.
    out.z = ewma_.update(y);
    return out;
  }

  out.tested = true;
  const double e = drift * drift;
  out.e = e;
  const double lambda =
      n_ == 0 ? 1.0 / e
              : static_cast<double>(n_ + 1) / (static_cast<double>(n_) / lambda_n_ + e);
  const double d = 2.0 * ((n_ == 0 ? 0.0 : static_cast<double>(n_) * std::log(lambda_n_)) -
                          static_cast<double>(n_ + 1) * std::log(lambda) + 1.0);
  out.d = d;
  // The statistic can dip slightly below zero when the new drift is close to
  // the running rate; clamping maps it to p = 1, which can only fire at
  // tau = 1.
  out.p = chi2_sf_1dof(std::max(d, 0.0));

  if (out.p <= options_.tau && n_ >= options_.min_samples) {
    out.detected = true;
    if (options_.reset_on_change) {
      n_ = 0;
      lambda_n_ = 0.0;
      ewma_.reset();
    }
    // Without reset_on_change the running state is left untouched: the drift
    // that fired is evidence against the current model, not part of it.
    out.z = ewma_.value();
    return out;
  }

  n_ += 1;
  lambda_n_ = lambda;
  out.z = ewma_.update(y);
  return out;
}

ResettingEstimator::ResettingEstimator(std::unique_ptr<OnlineEstimator> inner,
                                       LrtDetector detector, ResettingOptions options)
    : inner_(std::move(inner)), detector_(std::move(detector)), options_(options) {
  if (!inner_) {
    throw std::invalid_argument("resetting wrapper needs an inner estimator");
  }
  theta0_ = inner_->theta();
}

ResettingEstimator::Step ResettingEstimator::step(const Datum& d) {
  Step out;
  const Vector theta_prev = inner_->theta();
  out.admitted = inner_->step(d);
  out.detection = detector_.step(predictability(d, theta_prev));
  if (out.detection.detected) {
    inner_->reset_state();
    if (options_.reset_theta) {
      inner_->set_theta(theta0_);
    }
    ++detections_;
  }
  return out;
}

}  // namespace excite
