#include "ssp3d/log.hpp"

#include <iostream>
#include <mutex>

namespace ssp3d {
namespace {

std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink instance = [](const std::string& message) { std::cerr << "warning: " << message << '\n'; };
  return instance;
}

}  // namespace

void set_warning_sink(WarningSink new_sink) {
  std::lock_guard lock(sink_mutex);
  sink() = new_sink ? std::move(new_sink) : WarningSink([](const std::string&) {});
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  sink()(message);
}

}  // namespace ssp3d
