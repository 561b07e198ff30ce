#pragma once

#include <stdexcept>
#include <string>

namespace endring {

// Domain failure carrying a short variant name (e.g. "TooSmall") that the
// CLI reports verbatim.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& detail) {
  throw DomainError(kind, detail);
}

}  // namespace endring
