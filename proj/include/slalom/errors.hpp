#pragma once

#include <stdexcept>
#include <string>

namespace slalom {

// A caller violated a documented precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A supplied certificate failed to deliver what it promises.
struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two points agree up to the distinguishing depth.
struct TieError : PreconditionError {
  using PreconditionError::PreconditionError;
};

// A finite scan ran off the end of its window.
struct WindowExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleInconsistency : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace slalom
