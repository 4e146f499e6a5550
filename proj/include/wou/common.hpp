#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace wou {

/// Raised when an operation's precondition is violated by its input.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::invalid_argument(what), index_(index) {}

  /// Position of the offending element, when the rejection concerns one.
  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

/// Monte Carlo (or deterministic, std_error == 0) estimate.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

enum class Verdict { pass, fail, not_asserted };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::not_asserted:
      return "not_asserted";
  }
  return "?";
}

}  // namespace wou
