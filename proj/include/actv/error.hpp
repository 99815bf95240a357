#pragma once

#include <stdexcept>
#include <string>

namespace actv {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter is outside its valid domain (alpha > 1, block_size = 0, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Input data is well-formed but incompatible (grid mismatch, frame size mismatch).
class RejectedInput : public Error {
 public:
  using Error::Error;
};

// A planner query references something that does not exist.
class QueryError : public Error {
 public:
  using Error::Error;
};

// Reading a persisted artifact failed (I/O, magic, version, checksum).
class LoadError : public Error {
 public:
  using Error::Error;
};

// Configuration failed validation; field() names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace actv
