#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sumset {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// DSL text could not be parsed. `position` is a 0-based byte offset into the input.
struct ParseError : Error {
  std::size_t position;
  ParseError(std::size_t pos, const std::string& msg)
      : Error("parse error at offset " + std::to_string(pos) + ": " + msg),
        position(pos) {}
};

// A log-fractional membership query landed inside the final guard band around an
// interval endpoint even at the highest precision tier. Never silently resolved.
struct AmbiguousBoundary : Error {
  explicit AmbiguousBoundary(const std::string& msg) : Error(msg) {}
};

// A configured cap (bitmap length, cell budget, family index scan, vertex count)
// would be exceeded. The message names the cap.
struct ResourceLimit : Error {
  explicit ResourceLimit(const std::string& msg) : Error(msg) {}
};

// A witness check needed membership beyond the stated horizon.
struct HorizonExceeded : Error {
  explicit HorizonExceeded(const std::string& msg) : Error(msg) {}
};

// An exactness check that requires disjoint operands found a common element.
struct DisjointnessViolated : Error {
  std::uint64_t first_common;
  DisjointnessViolated(std::uint64_t n, const std::string& msg)
      : Error(msg), first_common(n) {}
};

// Lookup of a named construction failed.
struct UnknownKey : Error {
  explicit UnknownKey(const std::string& msg) : Error(msg) {}
};

// Lookup or parse of a window schedule failed.
struct UnknownSchedule : Error {
  explicit UnknownSchedule(const std::string& msg) : Error(msg) {}
};

}  // namespace sumset
