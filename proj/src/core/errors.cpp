#include "core/errors.hpp"

#include <cmath>

namespace fkflow {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

void require_finite(double value, const std::string& name) {
  if (!std::isfinite(value))
    throw InvalidArgument(name + " must be finite, got " + std::to_string(value));
}

}  // namespace fkflow
