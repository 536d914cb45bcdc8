#include <doctest.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "excite/epimodels.hpp"
#include "excite/metrics.hpp"
#include "excite/sim.hpp"
#include "excite/types.hpp"

namespace {

std::vector<excite::Datum> sis_stream(double beta, double gamma, std::int64_t steps) {
  const auto schedule = excite::Schedule<excite::SisParams>::constant({beta, gamma});
  return excite::simulate_sis(schedule, 0.01, 0.1, steps, {}, 4).data;
}

}  // namespace

TEST_CASE("relative_error with the near-zero offset") {
  excite::Vector truth(2), estimate(2);
  truth << 1.0, 0.0;
  estimate << 0.9, -0.1;
  const excite::Vector err = excite::relative_error(truth, estimate);
  CHECK(err(0) == doctest::Approx(0.1 / 1.01));
  CHECK(err(1) == doctest::Approx(10.0));

  CHECK_THROWS_AS(excite::relative_error(truth, excite::Vector::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(excite::relative_error(truth, estimate, 0.0), std::invalid_argument);
}

TEST_CASE("median conventions") {
  CHECK(excite::median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(excite::median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
  CHECK(excite::median({7.0}) == doctest::Approx(7.0));
  CHECK_THROWS_AS(excite::median({}), std::invalid_argument);
}

TEST_CASE("error_profile summarizes per-time spread") {
  std::vector<double> times = {0.0, 1.0};
  std::vector<excite::Vector> errors(2);
  errors[0] = (excite::Vector(3) << 0.1, 0.3, 0.2).finished();
  errors[1] = (excite::Vector(3) << 0.4, 0.0, 0.2).finished();

  const auto profile = excite::error_profile(times, errors);
  REQUIRE(profile.size() == 2);
  CHECK(profile[0].t == 0.0);
  CHECK(profile[0].min == doctest::Approx(0.1));
  CHECK(profile[0].median == doctest::Approx(0.2));
  CHECK(profile[0].max == doctest::Approx(0.3));
  CHECK(profile[1].median == doctest::Approx(0.2));

  std::vector<excite::Vector> scalars = {excite::Vector::Ones(1), excite::Vector::Ones(1)};
  CHECK_THROWS_AS(excite::error_profile(times, scalars), std::invalid_argument);
  CHECK_THROWS_AS(excite::error_profile({0.0}, errors), std::invalid_argument);
}

TEST_CASE("r0_error vanishes on an exact estimate") {
  excite::SirNetworkParams params;
  params.b.resize(2, 2);
  params.b << 0.0, 0.4, 0.3, 0.0;
  params.gamma = (excite::Vector(2) << 0.15, 0.2).finished();
  CHECK(excite::r0_error(params, params).maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("rmse_surface has its valley at the true parameters") {
  const auto stream = sis_stream(0.12, 0.04, 2000);

  excite::Vector betas(3), gammas(3);
  betas << 0.12, 0.18, 1.2;
  gammas << 0.04, 0.02, 0.4;
  const excite::Matrix surface = excite::rmse_surface(stream, betas, gammas);

  REQUIRE(surface.rows() == 3);
  REQUIRE(surface.cols() == 3);
  CHECK(surface(0, 0) < 1e-12);        // exact parameters: zero residual
  CHECK(surface(2, 2) > surface(0, 0));
  // Along the ray beta/gamma = 3 the residual stays small; off the ray at
  // the same beta it grows.
  CHECK(surface(1, 1) > surface(0, 0));
  CHECK(surface(1, 1) < surface(1, 2));

  CHECK(excite::rmse_surface_serial(stream, betas, gammas) == surface);

  CHECK_THROWS_AS(excite::rmse_surface({}, betas, gammas), std::invalid_argument);
  CHECK_THROWS_AS(excite::rmse_surface(stream, excite::Vector(), gammas),
                  std::invalid_argument);
}

TEST_CASE("roc_points classification rules") {
  excite::RocScenario scenario;
  scenario.change_points = {100, 200};
  scenario.window = 10;
  scenario.stream_len = 300;
  const std::vector<double> grid = {0.5};

  SUBCASE("detections inside each window are true positives") {
    const auto points = excite::roc_points(
        scenario, grid, [](double) { return std::vector<std::int64_t>{101, 205}; });
    REQUIRE(points.size() == 1);
    CHECK(points[0].tp == 2);
    CHECK(points[0].fp == 0);
    CHECK(points[0].fn == 0);
    CHECK(points[0].tpr == doctest::Approx(1.0));
    CHECK(points[0].fp_rate == doctest::Approx(0.0));
  }

  SUBCASE("a silent detector misses every change point") {
    const auto points =
        excite::roc_points(scenario, grid, [](double) { return std::vector<std::int64_t>{}; });
    CHECK(points[0].tp == 0);
    CHECK(points[0].fn == 2);
    CHECK(points[0].tpr == doctest::Approx(0.0));
  }

  SUBCASE("extra detections in a claimed window are ignored") {
    const auto points = excite::roc_points(scenario, grid, [](double) {
      return std::vector<std::int64_t>{100, 103, 108};
    });
    CHECK(points[0].tp == 1);
    CHECK(points[0].fp == 0);
    CHECK(points[0].fn == 1);  // the second change point stays unclaimed
  }

  SUBCASE("detections outside every window are false positives") {
    const auto points = excite::roc_points(
        scenario, grid, [](double) { return std::vector<std::int64_t>{50, 111, 211}; });
    CHECK(points[0].tp == 0);
    CHECK(points[0].fp == 3);  // window end cp + 10 is inclusive, 111 is past it
    CHECK(points[0].fn == 2);
    CHECK(points[0].fp_rate == doctest::Approx(3.0 / 300.0));
  }

  SUBCASE("boundary samples cp and cp + window both match") {
    const auto points = excite::roc_points(
        scenario, grid, [](double) { return std::vector<std::int64_t>{100, 210}; });
    CHECK(points[0].tp == 2);
    CHECK(points[0].fp == 0);
  }
}

TEST_CASE("roc_points parallel matches serial") {
  excite::RocScenario scenario;
  scenario.change_points = {50, 150};
  scenario.window = 8;
  scenario.stream_len = 200;
  const std::vector<double> grid = {0.1, 0.25, 0.5, 0.75, 1.0};

  const auto runner = [](double tau) {
    std::vector<std::int64_t> detections;
    if (tau >= 0.2) detections.push_back(52);
    if (tau >= 0.5) detections.push_back(120);
    if (tau >= 0.9) detections.push_back(151);
    return detections;
  };

  const auto serial = excite::roc_points_serial(scenario, grid, runner);
  const auto parallel = excite::roc_points(scenario, grid, runner);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].tau == parallel[i].tau);
    CHECK(serial[i].tp == parallel[i].tp);
    CHECK(serial[i].fp == parallel[i].fp);
    CHECK(serial[i].fn == parallel[i].fn);
    CHECK(serial[i].tpr == parallel[i].tpr);
    CHECK(serial[i].fp_rate == parallel[i].fp_rate);
  }
}

TEST_CASE("roc_points scenario validation") {
  const auto noop = [](double) { return std::vector<std::int64_t>{}; };

  excite::RocScenario overlap;
  overlap.change_points = {10, 15};
  overlap.window = 10;
  overlap.stream_len = 100;
  CHECK_THROWS_AS(excite::roc_points(overlap, {0.5}, noop), std::invalid_argument);

  excite::RocScenario ok;
  ok.change_points = {10, 30};
  ok.window = 10;
  ok.stream_len = 100;
  CHECK_THROWS_AS(excite::roc_points(ok, {}, noop), std::invalid_argument);

  excite::RocScenario bad_window = ok;
  bad_window.window = -1;
  CHECK_THROWS_AS(excite::roc_points(bad_window, {0.5}, noop), std::invalid_argument);

  excite::RocScenario bad_len = ok;
  bad_len.stream_len = 0;
  CHECK_THROWS_AS(excite::roc_points(bad_len, {0.5}, noop), std::invalid_argument);

  excite::RocScenario unsorted = ok;
  unsorted.change_points = {30, 10};
  CHECK_THROWS_AS(excite::roc_points(unsorted, {0.5}, noop), std::invalid_argument);
}

TEST_CASE("roc_auc trapezoid with anchoring and flat extension") {
  excite::RocPoint mid;
  mid.fp_rate = 0.5;
  mid.tpr = 1.0;
  CHECK(excite::roc_auc({mid}) == doctest::Approx(0.75));

  excite::RocPoint corner;
  corner.fp_rate = 0.0;
  corner.tpr = 1.0;
  CHECK(excite::roc_auc({corner}) == doctest::Approx(1.0));

  excite::RocPoint a, b;
  a.fp_rate = 0.2;
  a.tpr = 0.5;
  b.fp_rate = 0.6;
  b.tpr = 0.9;
  // 0..0.2 triangle + 0.2..0.6 trapezoid + 0.6..1.0 flat tail.
  const double expected = 0.2 * 0.25 + 0.4 * 0.7 + 0.4 * 0.9;
  CHECK(excite::roc_auc({b, a}) == doctest::Approx(expected));

  CHECK_THROWS_AS(excite::roc_auc({}), std::invalid_argument);
}
