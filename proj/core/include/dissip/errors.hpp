#ifndef DISSIP_ERRORS_HPP
#define DISSIP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dissip {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mathematically inadmissible input (exponent out of range, non-finite data,
/// support touching the boundary layer, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Missing or inconsistent configuration (absent divergence fields, bad
/// search budgets, insufficient padding, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Malformed input documents; `where` carries a JSON-pointer-style location.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::string where = "")
      : Error(where.empty() ? msg : msg + " at " + where), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Feature intentionally not provided (e.g. multiplier norms of non-constant
/// coefficient fields).
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

}  // namespace dissip

#endif
