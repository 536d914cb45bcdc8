#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "excite/types.hpp"

namespace excite {

/// Scalar SIS compartment model: Idot = (1 - I) beta I - gamma I.
struct SisParams {
  double beta = 0.0;
  double gamma = 0.0;

  Vector theta() const { return (Vector(2) << beta, gamma).finished(); }
};

/// SIS regressor, the 1 x 2 block [(1 - I) I, -I], so that
/// sis_drift == sis_regressor * theta with theta = [beta, gamma].
/// Throws std::invalid_argument when infected is outside [0, 1].
Matrix sis_regressor(double infected);

double sis_drift(double infected, const SisParams& params);

/// Endemic equilibrium 1 - gamma/beta (requires beta > 0).
double sis_equilibrium(const SisParams& params);

/// Networked SIR model with per-edge transmission matrix B (n x n,
/// nonnegative, zero diagonal by convention) and per-node recovery rates
/// gamma:
///   Idot = diag(1 - I - R) B I - diag(gamma) I,   Rdot = diag(gamma) I.
struct SirNetworkParams {
  Matrix b;
  Vector gamma;

  Eigen::Index nodes() const { return gamma.size(); }

  /// Parameter vector [vec(B) column-major; gamma], length n^2 + n. The
  /// column-major order is forced by vec(A X b) = (b^T kron A) vec(X).
  Vector theta() const;
  static SirNetworkParams from_theta(const Vector& theta, Eigen::Index nodes);
};

/// SIR network regressor, 2n x (n^2 + n):
///   [ I^T kron diag(S),  -diag(I) ]
///   [ 0,                  diag(I) ]      with S = 1 - I - R,
/// so that the stacked drift [Idot; Rdot] equals sir_regressor * theta.
Matrix sir_regressor(const Vector& infected, const Vector& recovered);

/// Stacked drift [Idot; Rdot], length 2n.
Vector sir_drift(const Vector& infected, const Vector& recovered,
                 const SirNetworkParams& params);

/// Per-node reproduction numbers: row sums of diag(gamma)^-1 B. Throws
/// std::invalid_argument when any gamma entry is zero (or sizes mismatch).
Vector local_r0(const SirNetworkParams& params);

enum class Topology {
  kFullyConnected,  ///< every directed off-diagonal edge present
  kStar,            ///< node 0 is the hub; only hub <-> leaf edges
  kErdosRenyi,      ///< each directed off-diagonal edge present with edge_prob
};

struct NetworkSpec {
  Topology topology = Topology::kFullyConnected;
  Eigen::Index nodes = 7;
  double edge_prob = 0.5;    ///< Erdos-Renyi only
  double weight_min = 0.05;  ///< uniform edge-weight range
  double weight_max = 0.5;
  double gamma_min = 0.1;    ///< uniform recovery-rate range
  double gamma_max = 0.4;
};

/// Draws a random network: present edges get weights uniform in
/// [weight_min, weight_max], absent edges are exactly zero, and gamma is
/// uniform in [gamma_min, gamma_max]. Draws proceed column-major over B
/// (diagonal skipped), then gamma, so a fixed engine state pins the network
/// exactly. Throws std::invalid_argument for invalid spec values.
SirNetworkParams make_network(const NetworkSpec& spec, std::mt19937_64& rng);

/// Piecewise-constant parameter schedule, right-continuous at switches:
/// at(t) returns the segment with the largest t_begin <= t (times before the
/// first segment clamp to it).
template <class Params>
struct Schedule {
  struct Segment {
    double t_begin = 0.0;
    Params params;
  };

  std::vector<Segment> segments;

  static Schedule constant(Params params) {
    Schedule s;
    s.segments.push_back({0.0, std::move(params)});
    return s;
  }

  /// Throws std::invalid_argument when empty or switch times are not
  /// strictly increasing.
  void validate() const {
    if (segments.empty()) {
      throw std::invalid_argument("Schedule: no segments");
    }
    for (std::size_t i = 1; i < segments.size(); ++i) {
      if (!(segments[i].t_begin > segments[i - 1].t_begin)) {
        throw std::invalid_argument("Schedule: switch times must be strictly increasing");
      }
    }
  }

  const Params& at(double t) const {
    const Segment* seg = &segments.front();
    for (const auto& s : segments) {
      if (s.t_begin <= t) {
        seg = &s;
      } else {
        break;
      }
    }
    return seg->params;
  }
};

}  // namespace excite
