#pragma once

#include <stdexcept>

namespace cob {

/// Invalid configuration or parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cob
