#include "usc/errors.hpp"

namespace usc {

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter:
    case ErrorKind::Domain:
    case ErrorKind::DegenerateInput:
    case ErrorKind::Config:
      return 2;
    case ErrorKind::Convergence:
      return 3;
    case ErrorKind::Accuracy:
    case ErrorKind::Singularity:
      return 4;
    case ErrorKind::Resource:
      return 5;
  }
  return 1;
}

}  // namespace usc
