#pragma once

#include <cstdint>
#include <vector>

#include "excite/types.hpp"

namespace excite {

/// Condition number of a square matrix via singular value decomposition:
/// sigma_max / sigma_min. Returns +infinity when the matrix is numerically
/// rank deficient (sigma_min <= 1e-12 * sigma_max), which covers the zero
/// matrix. Throws std::invalid_argument for non-square or non-finite input.
double condition_number(const Matrix& m);

/// Running sum of regressor Gram blocks sum_i phi_i^T phi_i, kept symmetric.
struct InfoMatrix {
  Matrix h;                 ///< p x p accumulated information
  std::int64_t count = 0;   ///< number of accumulated blocks

  explicit InfoMatrix(Eigen::Index p) : h(Matrix::Zero(p, p)) {}
};

/// Returns info with phi^T phi added (re-symmetrized) and count incremented.
/// Throws std::invalid_argument if phi's column count does not match.
InfoMatrix accumulate(InfoMatrix info, const Matrix& phi);

/// Conditioning of one sliding window of the information matrix.
struct PiReport {
  std::int64_t first = 0;   ///< window start index (k - window_len)
  std::int64_t last = 0;    ///< window end index k (inclusive)
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;       ///< lambda_max / lambda_min, +inf when rank deficient
};

/// Sliding-window excitation report: for each k >= window_len, the spectrum
/// of sum_{i=k-window_len}^{k} phi_i^T phi_i. Each window covers
/// window_len + 1 data. Throws std::invalid_argument when window_len < 1 or
/// the stream is shorter than window_len + 1.
std::vector<PiReport> moving_pi(const std::vector<Datum>& stream, int window_len);

/// Serial reference implementation of moving_pi (kept for testing and
/// benchmarking the parallel version).
std::vector<PiReport> moving_pi_serial(const std::vector<Datum>& stream, int window_len);

}  // namespace excite
