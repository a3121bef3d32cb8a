#pragma once

#include <stdexcept>
#include <string>

namespace noisyopt {

/// Raised when a caller breaks a documented precondition (wrong dimension,
/// out-of-range parameter, overdrawn budget).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Invalid experiment configuration. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

/// File could not be read or written. `path()` names the file.
class IoError : public std::runtime_error {
public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

namespace detail {
inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}
}  // namespace detail

}  // namespace noisyopt
