#pragma once
#include <stdexcept>
#include <string>

namespace hfscat {

// Exit-code classes used by the CLI: schema (2), numerical (3), geometry (4).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hfscat
