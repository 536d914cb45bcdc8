#include "excite/types.hpp"

#include <stdexcept>
#include <string>

namespace excite {

void validate_datum(const Datum& d, Eigen::Index p) {
  if (d.phi.cols() != p) {
    throw std::invalid_argument("Datum: regressor has " + std::to_string(d.phi.cols()) +
                                " columns, expected " + std::to_string(p));
  }
  if (d.phi.rows() < 1 || d.psi.size() != d.phi.rows()) {
    throw std::invalid_argument("Datum: target length " + std::to_string(d.psi.size()) +
                                " does not match regressor rows " +
                                std::to_string(d.phi.rows()));
  }
  if (!d.phi.allFinite() || !d.psi.allFinite()) {
    throw std::invalid_argument("Datum: non-finite regressor or target");
  }
}

}  // namespace excite
