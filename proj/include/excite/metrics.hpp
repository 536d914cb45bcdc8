#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "excite/epimodels.hpp"
#include "excite/types.hpp"

namespace excite {

/// Componentwise relative error |(truth - estimate) / (truth + delta)|; the
/// offset delta > 0 keeps near-zero true components from dominating. Throws
/// std::invalid_argument on size mismatch or delta <= 0.
Vector relative_error(const Vector& truth, const Vector& estimate, double delta = 1e-2);

/// Median with the average-of-two-middles convention. Throws
/// std::invalid_argument when empty.
double median(std::vector<double> values);

struct ErrorPoint {
  double t = 0.0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

/// Per-time summary (min / median / max over components) of an error-vector
/// series. Throws std::invalid_argument when sizes mismatch, the series is
/// empty, or the error vectors have fewer than two components (a scalar has
/// no meaningful spread).
std::vector<ErrorPoint> error_profile(const std::vector<double>& times,
                                      const std::vector<Vector>& errors);

/// Relative errors of the per-node reproduction numbers.
Vector r0_error(const SirNetworkParams& truth, const SirNetworkParams& estimate,
                double delta = 1e-2);

/// RMSE of the residual psi - phi [beta, gamma] over a stream, evaluated on
/// a (beta, gamma) grid; entry (i, j) corresponds to (betas[i], gammas[j]).
/// OpenMP-parallel over grid cells. Throws std::invalid_argument on an empty
/// stream or empty grid.
Matrix rmse_surface(const std::vector<Datum>& stream, const Vector& betas,
                    const Vector& gammas);

/// Serial reference implementation of rmse_surface.
Matrix rmse_surface_serial(const std::vector<Datum>& stream, const Vector& betas,
                           const Vector& gammas);

struct RocPoint {
  double tau = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double tpr = 0.0;      ///< TP / (TP + FN)
  double fp_rate = 0.0;  ///< FP / stream_len
};

struct RocScenario {
  std::vector<std::int64_t> change_points;  ///< true switch samples, strictly increasing
  std::int64_t window = 10;                 ///< detections in [cp, cp+window] match cp
  std::int64_t stream_len = 0;              ///< samples scanned, for the FP rate
};

/// Re-runs detection for one significance level and returns the detection
/// sample indices. Must be safe to call concurrently for different tau.
using DetectionRunner = std::function<std::vector<std::int64_t>(double tau)>;

/// ROC evaluation: for each tau the runner re-runs detection; a detection
/// within [cp, cp + window] is one true positive (the first detection claims
/// the change point, extras in the window are ignored), detections outside
/// all windows are false positives, unclaimed change points are false
/// negatives. OpenMP-parallel over the tau grid. Throws
/// std::invalid_argument when change points are not strictly increasing,
/// consecutive windows overlap (spacing <= window), window < 0,
/// stream_len < 1, or the grid is empty.
std::vector<RocPoint> roc_points(const RocScenario& scenario,
                                 const std::vector<double>& tau_grid,
                                 const DetectionRunner& runner);

/// Serial reference implementation of roc_points.
std::vector<RocPoint> roc_points_serial(const RocScenario& scenario,
                                        const std::vector<double>& tau_grid,
                                        const DetectionRunner& runner);

/// Trapezoid area under the (fp_rate, tpr) curve: points sorted by fp_rate,
/// anchored at (0, 0) and extended flat to fp_rate = 1. Throws
/// std::invalid_argument when empty.
double roc_auc(std::vector<RocPoint> points);

}  // namespace excite
