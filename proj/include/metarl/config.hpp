#pragma once

#include <stdexcept>
#include <string>

#include "metarl/pearl.hpp"

namespace metarl {

/// Raised on malformed config text; the message carries "<source>:<line>: ".
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the sectioned key-value run-config format (see README). Unknown
/// sections or keys are rejected with the offending line number. latent_dim
/// defaults to the environment's task dimensionality when not given.
MetaRunConfig parse_run_config(const std::string& text, const std::string& source_name);

MetaRunConfig load_run_config(const std::string& path);

}  // namespace metarl
