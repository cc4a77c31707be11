#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace refsim {

/// DRAM command-clock cycle count.
using Cycle = std::int64_t;

inline constexpr Cycle kNever = INT64_MAX / 4;

/// Invalid or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An address or index outside the configured geometry.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal simulator invariant broken (an illegal command was issued, etc).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Refresh retention audit or timing oracle found a violation.
class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed trace input; carries the 1-based line number.
class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace refsim
