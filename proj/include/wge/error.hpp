#pragma once

#include <stdexcept>
#include <string>

namespace wge {

// All library failures carry a short machine-readable code next to the
// human-readable message. The CLI prints the code on its last line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace wge
