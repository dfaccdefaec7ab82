#pragma once

#include <functional>
#include <vector>
#include <string>
#include <string_view>

namespace citeimb {

using WarningHandler = std::function<void(std::string_view)>;

// Non-fatal diagnostics go through a process-wide handler (stderr by default).
void warn(std::string_view message);

// Installs a handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

// Restores the previous handler on destruction; handy in tests.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace citeimb
