#ifndef ROTAGAP_ERROR_HPP
#define ROTAGAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rotagap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: strategy names, parameters, config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An assignment that references unavailable or incompatible pairs.
class InvalidAssignment : public Error {
 public:
  using Error::Error;
};

/// Inputs for which a computation is undefined (empty agent sets, zero maxima).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Two runs that were not produced from the same instance and trace.
class ProvenanceMismatch : public Error {
 public:
  using Error::Error;
};

/// Report inputs that do not follow the summary schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace rotagap

#endif  // ROTAGAP_ERROR_HPP
