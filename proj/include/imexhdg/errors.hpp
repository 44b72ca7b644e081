#pragma once

#include <stdexcept>
#include <string>

namespace imexhdg {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class invalid_argument : public error {
public:
  using error::error;
};

class unsupported_order : public error {
public:
  using error::error;
};

/// Raised when a velocity is requested from a state with non-positive total geopotential.
class dry_state_error : public error {
public:
  explicit dry_state_error(const std::string &what, long element = -1)
      : error(element >= 0 ? what + " (element " + std::to_string(element) + ")" : what),
        element_(element) {}

  long element() const noexcept { return element_; }

  /// Same error with extra context appended to the message.
  dry_state_error annotated(const std::string &note) const {
    dry_state_error e(std::string(what()) + note);
    e.element_ = element_;
    return e;
  }

private:
  long element_;
};

class unknown_scheme : public error {
public:
  using error::error;
};

class assembly_error : public error {
public:
  using error::error;
};

class condensation_error : public error {
public:
  using error::error;
};

class solver_error : public error {
public:
  solver_error(const std::string &what, double residual = -1.0)
      : error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class unsupported : public error {
public:
  using error::error;
};

class io_error : public error {
public:
  using error::error;
};

} // namespace imexhdg
