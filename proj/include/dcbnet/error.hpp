#pragma once

#include <stdexcept>
#include <string>

namespace dcb {

// Bad user input: scenario files, channel ranges, missing rate tables.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A broken internal invariant, e.g. a singular balance system.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dcb
