#include "dcb/error.hpp"

namespace dcb {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::OutOfHorizon: return "out-of-horizon";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Generation: return "generation-failure";
    case ErrorKind::Config: return "configuration";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::ContractViolation: return "contract-violation";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::UndefinedRatio: return "undefined-ratio";
    case ErrorKind::OracleTooLarge: return "oracle-too-large";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace dcb
