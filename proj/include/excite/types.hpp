#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace excite {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One streaming observation: an n-row regressor block phi and the matching
/// length-n target psi, related by psi ~= phi * theta for the parameter
/// vector theta being identified.
struct Datum {
  std::int64_t k = 0;  ///< sample index within the stream
  double t = 0.0;      ///< sample time
  Matrix phi;          ///< n x p regressor block
  Vector psi;          ///< length-n target
};

/// Throws std::invalid_argument unless phi is n x p, psi is length n, and
/// both are finite.
void validate_datum(const Datum& d, Eigen::Index p);

}  // namespace excite
