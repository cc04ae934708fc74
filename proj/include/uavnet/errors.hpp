#pragma once

#include <stdexcept>
#include <string>

namespace uavnet {

/// Trace file could not be parsed; the message names the offending line.
class MalformedTraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trace parsed but violates the slot/id consistency rules.
class InconsistentTraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero-length link where a path loss is required.
class InvalidGeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EpisodeExhaustedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Object used out of order, e.g. a tape replayed after its network changed.
class InvalidStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid experiment configuration. `field()` is the dotted path of the culprit.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace uavnet
