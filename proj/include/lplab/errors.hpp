#pragma once

#include <stdexcept>
#include <string>

namespace lplab {

// Unsupported prior/noise pairing, or a prior that fails its own
// integrability checks.
class model_error : public std::runtime_error {
 public:
  explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

// An internal numerical consistency check failed (two computation routes
// disagree, a root count does not match theory, an accumulator went
// non-finite).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lplab
