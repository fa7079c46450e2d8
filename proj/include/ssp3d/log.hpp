#pragma once

#include <functional>
#include <string>

namespace ssp3d {

/// Sink for non-fatal diagnostics. Defaults to stderr; tests may silence or
/// capture it.
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace ssp3d
