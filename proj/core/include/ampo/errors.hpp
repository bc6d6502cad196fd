#pragma once

#include <stdexcept>
#include <string>

namespace ampo {

// Bad argument values, malformed tokens, shape mismatches.
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A distribution lacks support where the operation needs it.
struct SupportError : std::runtime_error {
  explicit SupportError(const std::string& what) : std::runtime_error(what) {}
};

// Divergence, non-finite intermediate, or iteration-cap overrun.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// The projection problem has no solution on the given bracket.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ampo
