#pragma once

#include <stdexcept>
#include <string>

namespace wmn {

enum class ErrorKind {
  InvalidDimension,
  InvalidConfiguration,
  InvalidRange,
  OutOfRegime,
  WrongRegime,
  StructureViolation,
  SingularSystem,
  SingularConstant,
  NumericalInconsistency,
  Lookup,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid dimension";
    case ErrorKind::InvalidConfiguration: return "invalid configuration";
    case ErrorKind::InvalidRange: return "invalid range";
    case ErrorKind::OutOfRegime: return "out of regime";
    case ErrorKind::WrongRegime: return "wrong regime";
    case ErrorKind::StructureViolation: return "structure violation";
    case ErrorKind::SingularSystem: return "singular system";
    case ErrorKind::SingularConstant: return "singular constant";
    case ErrorKind::NumericalInconsistency: return "numerical inconsistency";
    case ErrorKind::Lookup: return "lookup failure";
  }
  return "unknown";
}

}  // namespace wmn
