#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "excite/rng.hpp"
#include "excite/signal.hpp"
#include "excite/types.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<excite::Datum> scalar_stream(const std::vector<double>& values) {
  std::vector<excite::Datum> stream(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    stream[k].k = static_cast<std::int64_t>(k);
    stream[k].t = 0.1 * static_cast<double>(k);
    stream[k].phi = excite::Matrix::Constant(1, 2, 0.0);
    stream[k].phi(0, 0) = values[k];
    stream[k].phi(0, 1) = 1.0;
    stream[k].psi = excite::Vector::Zero(1);
  }
  return stream;
}

}  // namespace

TEST_CASE("condition_number on simple matrices") {
  CHECK(excite::condition_number(excite::Matrix::Identity(3, 3)) == doctest::Approx(1.0));

  excite::Matrix d = excite::Matrix::Zero(2, 2);
  d(0, 0) = 8.0;
  d(1, 1) = 2.0;
  CHECK(excite::condition_number(d) == doctest::Approx(4.0));

  CHECK(excite::condition_number(excite::Matrix::Zero(3, 3)) == kInf);
  CHECK(excite::condition_number(excite::Matrix(0, 0)) == kInf);

  // Rank deficiency is a relative test: a scaled singular matrix stays inf.
  excite::Matrix singular(2, 2);
  singular << 1e8, 1e8, 1e8, 1e8;
  CHECK(excite::condition_number(singular) == kInf);
}

TEST_CASE("condition_number input validation") {
  CHECK_THROWS_AS(excite::condition_number(excite::Matrix::Zero(2, 3)),
                  std::invalid_argument);
  excite::Matrix bad = excite::Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(excite::condition_number(bad), std::invalid_argument);
}

TEST_CASE("accumulate adds Gram blocks and counts them") {
  excite::InfoMatrix info(2);
  excite::Matrix phi(1, 2);
  phi << 2.0, 1.0;
  info = excite::accumulate(std::move(info), phi);
  CHECK(info.count == 1);
  CHECK(info.h(0, 0) == doctest::Approx(4.0));
  CHECK(info.h(0, 1) == doctest::Approx(2.0));
  CHECK(info.h(1, 0) == doctest::Approx(2.0));
  CHECK(info.h(1, 1) == doctest::Approx(1.0));

  excite::Matrix wide(1, 3);
  wide << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(excite::accumulate(excite::InfoMatrix(2), wide), std::invalid_argument);
}

TEST_CASE("moving_pi window bookkeeping") {
  const auto stream = scalar_stream({1.0, 2.0, 3.0, 4.0, 5.0});
  const auto reports = excite::moving_pi(stream, 2);

  // Windows end at k = 2, 3, 4 and each covers window_len + 1 = 3 data.
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].first == 0);
  CHECK(reports[0].last == 2);
  CHECK(reports[2].first == 2);
  CHECK(reports[2].last == 4);
  for (const auto& r : reports) {
    CHECK(r.lambda_max >= r.lambda_min);
    CHECK(r.lambda_min > 0.0);
    CHECK(r.kappa == doctest::Approx(r.lambda_max / r.lambda_min));
  }
}

TEST_CASE("moving_pi flags rank-deficient windows") {
  // After sample 2 the regressor freezes at (1, 1): any window entirely
  // inside the frozen tail has a rank-1 information matrix.
  const auto stream = scalar_stream({1.0, 3.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  const auto reports = excite::moving_pi(stream, 2);
  REQUIRE(reports.size() == 5);
  CHECK(std::isfinite(reports[0].kappa));
  CHECK(reports.back().kappa == kInf);
  CHECK(reports.back().lambda_min == doctest::Approx(0.0));
}

TEST_CASE("moving_pi parallel matches serial") {
  auto rng = excite::substream(314, "signal-test");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<excite::Datum> stream(200);
  for (std::size_t k = 0; k < stream.size(); ++k) {
    stream[k].k = static_cast<std::int64_t>(k);
    stream[k].t = 0.05 * static_cast<double>(k);
    stream[k].phi.resize(2, 3);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        stream[k].phi(i, j) = gauss(rng);
      }
    }
    stream[k].psi = excite::Vector::Zero(2);
  }

  const auto serial = excite::moving_pi_serial(stream, 7);
  const auto parallel = excite::moving_pi(stream, 7);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].first == parallel[i].first);
    CHECK(serial[i].last == parallel[i].last);
    CHECK(serial[i].lambda_min == parallel[i].lambda_min);
    CHECK(serial[i].lambda_max == parallel[i].lambda_max);
    CHECK(serial[i].kappa == parallel[i].kappa);
  }
}

TEST_CASE("moving_pi argument validation") {
  const auto stream = scalar_stream({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(excite::moving_pi(stream, 0), std::invalid_argument);
  CHECK_THROWS_AS(excite::moving_pi(stream, 3), std::invalid_argument);
  CHECK_NOTHROW(excite::moving_pi(stream, 2));
}
