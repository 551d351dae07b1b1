#pragma once

#include <stdexcept>
#include <string>

namespace pmod {

// Invalid input: bad spec, bad config, violated operation precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation hit a hard limit (cell counts, iteration caps that cannot be
// reported as a flag).
class LimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal consistency failure; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pmod
