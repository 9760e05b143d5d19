#pragma once

#include <stdexcept>
#include <string>

namespace usc {

enum class ErrorKind {
  Parameter,
  Domain,
  Convergence,
  Accuracy,
  Singularity,
  DegenerateInput,
  Resource,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(what), kind_(kind), value_(value) {}

  ErrorKind kind() const { return kind_; }
  // residual, determinant magnitude or error estimate, depending on kind
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

const char* kind_name(ErrorKind kind);

// 0 ok, 2 config, 3 convergence, 4 accuracy, 5 resource
int exit_code(ErrorKind kind);

}  // namespace usc
