#include "excite/epimodels.hpp"

#include <cmath>
#include <string>

namespace excite {
namespace {

void check_fraction(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " +
                                std::to_string(value));
  }
}

void check_state_pair(const Vector& infected, const Vector& recovered) {
  if (infected.size() != recovered.size() || infected.size() < 1) {
    throw std::invalid_argument("infected and recovered must have the same positive length");
  }
  for (Eigen::Index i = 0; i < infected.size(); ++i) {
    check_fraction(infected[i], "infected fraction");
    check_fraction(recovered[i], "recovered fraction");
  }
}

void check_network(const SirNetworkParams& params) {
  const Eigen::Index n = params.gamma.size();
  if (n < 1 || params.b.rows() != n || params.b.cols() != n) {
    throw std::invalid_argument("transmission matrix must be n x n with n recovery rates");
  }
  if (!params.b.allFinite() || !params.gamma.allFinite()) {
    throw std::invalid_argument("network parameters must be finite");
  }
}

}  // namespace

Matrix sis_regressor(double infected) {
  check_fraction(infected, "infected fraction");
  Matrix phi(1, 2);
  phi << (1.0 - infected) * infected, -infected;
  return phi;
}

double sis_drift(double infected, const SisParams& params) {
  return (1.0 - infected) * params.beta * infected - params.gamma * infected;
}

double sis_equilibrium(const SisParams& params) {
  if (!(params.beta > 0.0)) {
    throw std::invalid_argument("endemic equilibrium needs beta > 0");
  }
  return 1.0 - params.gamma / params.beta;
}

Vector SirNetworkParams::theta() const {
  check_network(*this);
  const Eigen::Index n = nodes();
  Vector out(n * n + n);
  out.head(n * n) = Eigen::Map<const Vector>(b.data(), n * n);
  out.tail(n) = gamma;
  return out;
}

SirNetworkParams SirNetworkParams::from_theta(const Vector& theta, Eigen::Index nodes) {
  if (nodes < 1 || theta.size() != nodes * nodes + nodes) {
    throw std::invalid_argument("parameter vector must have length n^2 + n");
  }
  SirNetworkParams params;
  params.b = Eigen::Map<const Matrix>(theta.data(), nodes, nodes);
  params.gamma = theta.tail(nodes);
  return params;
}

Matrix sir_regressor(const Vector& infected, const Vector& recovered) {
  check_state_pair(infected, recovered);
  const Eigen::Index n = infected.size();
  Matrix phi = Matrix::Zero(2 * n, n * n + n);
  const Vector susceptible = Vector::Ones(n) - infected - recovered;
  // Row i of the infected block: d/dB terms S_i I_j live at column j*n + i
  // (column-major vec(B)); the gamma column is n^2 + i.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      phi(i, j * n + i) = susceptible[i] * infected[j];
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    phi(i, n * n + i) = -infected[i];
    phi(n + i, n * n + i) = infected[i];
  }
  return phi;
}

Vector sir_drift(const Vector& infected, const Vector& recovered,
                 const SirNetworkParams& params) {
  check_state_pair(infected, recovered);
  check_network(params);
  if (params.nodes() != infected.size()) {
    throw std::invalid_argument("network size does not match state size");
  }
  const Eigen::Index n = infected.size();
  const Vector susceptible = Vector::Ones(n) - infected - recovered;
  Vector out(2 * n);
  out.head(n) = susceptible.asDiagonal() * (params.b * infected) -
                params.gamma.cwiseProduct(infected);
  out.tail(n) = params.gamma.cwiseProduct(infected);
  return out;
}

Vector local_r0(const SirNetworkParams& params) {
  check_network(params);
  for (Eigen::Index i = 0; i < params.gamma.size(); ++i) {
    if (params.gamma[i] == 0.0) {
      throw std::invalid_argument("local reproduction numbers need nonzero recovery rates");
    }
  }
  return params.gamma.cwiseInverse().asDiagonal() * params.b.rowwise().sum();
}

SirNetworkParams make_network(const NetworkSpec& spec, std::mt19937_64& rng) {
  const Eigen::Index n = spec.nodes;
  if (n < 2) {
    throw std::invalid_argument("a network needs at least 2 nodes");
  }
  if (!(spec.weight_min >= 0.0) || !(spec.weight_max >= spec.weight_min)) {
    throw std::invalid_argument("edge-weight range must satisfy 0 <= min <= max");
  }
  if (!(spec.gamma_min > 0.0) || !(spec.gamma_max >= spec.gamma_min)) {
    throw std::invalid_argument("recovery-rate range must satisfy 0 < min <= max");
  }
  if (spec.topology == Topology::kErdosRenyi &&
      (!(spec.edge_prob >= 0.0) || !(spec.edge_prob <= 1.0))) {
    throw std::invalid_argument("edge probability must lie in [0, 1]");
  }

  std::uniform_real_distribution<double> weight(spec.weight_min, spec.weight_max);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> recovery(spec.gamma_min, spec.gamma_max);

  SirNetworkParams params;
  params.b = Matrix::Zero(n, n);
  // Column-major traversal so a fixed engine state pins the draw sequence.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) {
        continue;
      }
      bool present = false;
      switch (spec.topology) {
        case Topology::kFullyConnected:
          present = true;
          break;
        case Topology::kStar:
          present = (i == 0 || j == 0);
          break;
        case Topology::kErdosRenyi:
          present = coin(rng) < spec.edge_prob;
          break;
      }
      if (present) {
        params.b(i, j) = weight(rng);
      }
    }
  }
  params.gamma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    params.gamma[i] = recovery(rng);
  }
  return params;
}

}  // namespace excite
