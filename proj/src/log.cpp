#include "citeimb/log.hpp"

#include <iostream>
#include <mutex>
#include <vector>

namespace citeimb {

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& current_handler() {
  static WarningHandler h = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (current_handler()) current_handler()(message);
}

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  std::swap(current_handler(), handler);
  return handler;
}

ScopedWarningCapture::ScopedWarningCapture()
    : previous_(set_warning_handler([this](std::string_view msg) { messages_.emplace_back(msg); })) {}

ScopedWarningCapture::~ScopedWarningCapture() { set_warning_handler(std::move(previous_)); }

}  // namespace citeimb
