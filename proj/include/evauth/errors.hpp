#pragma once

#include <stdexcept>
#include <string>

namespace evauth {

// Base class for all library errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input that could not be decoded at all (malformed JSON, bad number).
class ParseError : public Error {
  using Error::Error;
};

// Decodable input that violates the documented schema.
class SchemaError : public Error {
  using Error::Error;
};

// Stream- or log-level consistency violation.
class ValidationError : public Error {
  using Error::Error;
};

// Bad configuration value, unknown key, or unusable file.
class ConfigError : public Error {
  using Error::Error;
};

// An operation received a timestamp earlier than state it must not precede.
class ClockRegressionError : public Error {
  using Error::Error;
};

// A threshold strategy finished its training window with too few scores.
class TrainingError : public Error {
  using Error::Error;
};

}  // namespace evauth
