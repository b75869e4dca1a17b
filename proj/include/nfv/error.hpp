#pragma once

#include <stdexcept>
#include <string>

namespace nfv {

/// Raised for malformed inputs: topology descriptions, services, scenarios.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a queue would be unstable (service rate not above arrivals).
class StabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace nfv
