#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "excite/estimators.hpp"
#include "excite/rng.hpp"
#include "excite/types.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

excite::Datum make_datum(std::int64_t k, std::vector<double> phi_row, double psi) {
  excite::Datum d;
  d.k = k;
  d.t = static_cast<double>(k);
  d.phi.resize(1, static_cast<Eigen::Index>(phi_row.size()));
  for (std::size_t j = 0; j < phi_row.size(); ++j) {
    d.phi(0, static_cast<Eigen::Index>(j)) = phi_row[j];
  }
  d.psi = excite::Vector::Constant(1, psi);
  return d;
}

std::vector<excite::Datum> random_stream(std::uint64_t seed, std::int64_t count,
                                         Eigen::Index p, const excite::Vector& truth) {
  auto rng = excite::substream(seed, "estimator-test");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<excite::Datum> stream(count);
  for (std::int64_t i = 0; i < count; ++i) {
    excite::Datum& d = stream[i];
    d.k = i + 1;  // 1-based, so admitted() doubles as batch excitation positions
    d.t = 0.1 * static_cast<double>(i);
    d.phi.resize(1, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      d.phi(0, j) = gauss(rng);
    }
    d.psi = d.phi * truth + excite::Vector::Constant(1, 0.01 * gauss(rng));
  }
  return stream;
}

}  // namespace

TEST_CASE("GwRls scalar steps match the weighted batch solution by hand") {
  excite::GwRlsOptions options;
  options.alpha = 0.5;
  excite::GwRls gw(excite::Vector::Zero(1), excite::Matrix::Identity(1, 1), options);

  // First datum bootstraps the excitation set (kappa(0) = inf admits).
  CHECK(gw.excitation_condition() == kInf);
  CHECK(gw.step(make_datum(1, {1.0}, 2.0)));
  CHECK(gw.theta()(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gw.covariance()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gw.excitation_size() == 1);
  CHECK(gw.excitation_condition() == doctest::Approx(1.0));

  // Second scalar datum ties on condition number, so it is admitted too.
  CHECK(gw.step(make_datum(2, {1.0}, 0.0)));
  CHECK(gw.theta()(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gw.covariance()(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(gw.excitation_size() == 2);
  CHECK(gw.admitted() == std::vector<std::int64_t>{1, 2});
  CHECK(gw.excitation_info()(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("GwRls tracks the weighted batch estimate on random streams") {
  for (double alpha : {0.9, 1.0}) {
    const Eigen::Index p = 3;
    excite::Vector truth(p);
    truth << 0.4, -1.2, 2.0;
    const auto stream = random_stream(7 + static_cast<std::uint64_t>(alpha * 10), 30,
                                      p, truth);

    excite::GwRlsOptions options;
    options.alpha = alpha;
    excite::Vector theta0 = excite::Vector::Constant(p, 0.5);
    excite::Matrix p0 = 1e3 * excite::Matrix::Identity(p, p);
    excite::GwRls gw(theta0, p0, options);

    excite::WeightedBatchProblem problem;
    problem.data = stream;
    problem.alpha = alpha;
    problem.theta0 = theta0;
    problem.p0 = p0;

    for (std::size_t i = 0; i < stream.size(); ++i) {
      gw.step(stream[i]);
      problem.excitation = gw.admitted();
      const excite::Vector batch =
          excite::batch_weighted_estimate(problem, static_cast<std::int64_t>(i + 1));
      const double rel = (gw.theta() - batch).norm() / batch.norm();
      CHECK(rel <= 1e-8);
    }
  }
}

TEST_CASE("GwRls excitation condition number never increases across admissions") {
  const Eigen::Index p = 4;
  excite::Vector truth = excite::Vector::Ones(p);
  const auto stream = random_stream(99, 60, p, truth);

  excite::GwRls gw(excite::Vector::Zero(p), 1e4 * excite::Matrix::Identity(p, p));
  double last_kappa = gw.excitation_condition();
  std::int64_t admissions = 0;
  for (const auto& d : stream) {
    const bool admitted = gw.step(d);
    if (admitted) {
      ++admissions;
      CHECK(gw.excitation_condition() <= last_kappa);
      last_kappa = gw.excitation_condition();
    }
  }
  CHECK(admissions >= 2);  // the test is vacuous without admissions
}

TEST_CASE("GwRls refuses admissions once the cap is reached") {
  excite::GwRlsOptions options;
  options.alpha = 0.9;
  options.excitation_cap = 2;
  excite::GwRls gw(excite::Vector::Zero(3), excite::Matrix::Identity(3, 3), options);

  CHECK(gw.step(make_datum(1, {1.0, 0.0, 0.0}, 1.0)));
  CHECK(gw.step(make_datum(2, {0.0, 1.0, 0.0}, 1.0)));
  CHECK(gw.cap_reached() == false);

  // This datum would be admitted (it completes the basis), but the cap wins.
  const excite::Vector before = gw.theta();
  CHECK_FALSE(gw.step(make_datum(3, {0.0, 0.0, 1.0}, 1.0)));
  CHECK(gw.cap_reached());
  CHECK(gw.excitation_size() == 2);
  CHECK(gw.admitted() == std::vector<std::int64_t>{1, 2});
  // Rejected data still update the estimate.
  CHECK((gw.theta() - before).norm() > 0.0);
}

TEST_CASE("GwRls reset_state clears excitation memory but keeps the estimate") {
  excite::GwRlsOptions options;
  options.alpha = 0.9;
  options.excitation_cap = 1;
  excite::Matrix p0 = 50.0 * excite::Matrix::Identity(2, 2);
  excite::GwRls gw(excite::Vector::Zero(2), p0, options);

  gw.step(make_datum(1, {1.0, 0.5}, 1.0));
  gw.step(make_datum(2, {0.3, -0.8}, -0.2));
  REQUIRE(gw.cap_reached());
  const excite::Vector theta_before = gw.theta();

  gw.reset_state();
  CHECK(gw.theta() == theta_before);
  CHECK(gw.covariance() == p0);
  CHECK(gw.excitation_size() == 0);
  CHECK(gw.excitation_condition() == kInf);
  CHECK(gw.admitted().empty());
  CHECK_FALSE(gw.cap_reached());
  // The next informative datum bootstraps a fresh excitation set.
  CHECK(gw.step(make_datum(3, {1.0, 0.0}, 0.7)));
}

TEST_CASE("GwRls skips all-zero regressor blocks") {
  excite::GwRls gw(excite::Vector::Zero(2), excite::Matrix::Identity(2, 2));
  gw.step(make_datum(1, {1.0, 2.0}, 1.0));
  const excite::Vector theta = gw.theta();
  const excite::Matrix cov = gw.covariance();

  CHECK_FALSE(gw.step(make_datum(2, {0.0, 0.0}, 5.0)));
  CHECK(gw.theta() == theta);
  CHECK(gw.covariance() == cov);
  CHECK(gw.excitation_size() == 1);
}

TEST_CASE("GwRls constructor and input validation") {
  const excite::Vector theta0 = excite::Vector::Zero(2);
  const excite::Matrix eye = excite::Matrix::Identity(2, 2);

  excite::GwRlsOptions bad_alpha;
  bad_alpha.alpha = 0.0;
  CHECK_THROWS_AS(excite::GwRls(theta0, eye, bad_alpha), std::invalid_argument);
  bad_alpha.alpha = 1.5;
  CHECK_THROWS_AS(excite::GwRls(theta0, eye, bad_alpha), std::invalid_argument);

  excite::GwRlsOptions bad_cap;
  bad_cap.excitation_cap = 0;
  CHECK_THROWS_AS(excite::GwRls(theta0, eye, bad_cap), std::invalid_argument);

  excite::Matrix asym(2, 2);
  asym << 1.0, 0.2, 0.0, 1.0;
  CHECK_THROWS_AS(excite::GwRls(theta0, asym), std::invalid_argument);

  excite::Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(excite::GwRls(theta0, indefinite), std::invalid_argument);

  CHECK_THROWS_AS(excite::GwRls(theta0, excite::Matrix::Identity(3, 3)),
                  std::invalid_argument);

  excite::GwRls gw(theta0, eye);
  CHECK_THROWS_AS(gw.set_theta(excite::Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(gw.step(make_datum(1, {1.0, 2.0, 3.0}, 0.0)), std::invalid_argument);
}

TEST_CASE("EfRls scalar step by hand") {
  excite::EfRlsOptions options;
  options.alpha = 1.0;
  excite::EfRls ef(excite::Vector::Zero(1), excite::Matrix::Identity(1, 1), options);
  CHECK(ef.step(make_datum(1, {1.0}, 2.0)));
  CHECK(ef.covariance()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ef.theta()(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("EfRls converges on a persistently exciting stream") {
  const Eigen::Index p = 3;
  excite::Vector truth(p);
  truth << 1.0, -0.5, 0.25;
  const auto stream = random_stream(3, 400, p, truth);

  excite::EfRlsOptions options;
  options.alpha = 0.98;
  excite::EfRls ef(excite::Vector::Zero(p), 1e4 * excite::Matrix::Identity(p, p), options);
  for (const auto& d : stream) {
    ef.step(d);
  }
  CHECK((ef.theta() - truth).norm() < 0.05);
}

TEST_CASE("EfRls reset_state restores the covariance only") {
  excite::Matrix p0 = 10.0 * excite::Matrix::Identity(2, 2);
  excite::EfRls ef(excite::Vector::Zero(2), p0);
  ef.step(make_datum(1, {1.0, 1.0}, 1.0));
  const excite::Vector theta_before = ef.theta();
  CHECK(ef.covariance() != p0);
  ef.reset_state();
  CHECK(ef.covariance() == p0);
  CHECK(ef.theta() == theta_before);
}

TEST_CASE("gradient_step by hand") {
  excite::Vector theta = excite::Vector::Zero(2);
  const excite::Vector next = excite::gradient_step(theta, make_datum(1, {1.0, 2.0}, 3.0));
  CHECK(next(0) == doctest::Approx(3.0));
  CHECK(next(1) == doctest::Approx(6.0));

  excite::GradientEstimator grad(excite::Vector::Zero(2));
  CHECK(grad.step(make_datum(1, {1.0, 2.0}, 3.0)));
  CHECK(grad.theta() == next);
  grad.reset_state();  // no auxiliary state: a no-op
  CHECK(grad.theta() == next);
}

TEST_CASE("batch_weighted_estimate validates k") {
  excite::WeightedBatchProblem problem;
  problem.data = {make_datum(1, {1.0}, 1.0)};
  problem.theta0 = excite::Vector::Zero(1);
  problem.p0 = excite::Matrix::Identity(1, 1);
  CHECK_THROWS_AS(excite::batch_weighted_estimate(problem, 0), std::invalid_argument);
  CHECK_THROWS_AS(excite::batch_weighted_estimate(problem, 2), std::invalid_argument);
  CHECK_NOTHROW(excite::batch_weighted_estimate(problem, 1));
}
