#pragma once

#include <stdexcept>
#include <string>

namespace qlnorm {

enum class ErrorKind {
  InvalidConfig,
  DimensionMismatch,
  DivisionByZero,
  Range,
  Bracket,
  Divergence,
  NotApplicable,
  NoRoot,
  Geometry,
  BoundaryTrap,
  Calibration,
  Refinement,
  Parse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qlnorm
