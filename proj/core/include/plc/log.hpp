#pragma once

#include <functional>
#include <string_view>

namespace plc {

using WarningSink = std::function<void(std::string_view)>;

// Non-fatal diagnostics (zero feature rows, empty clusters, rank-0 PCA input)
// go through this sink. The default writes "plc: warning: ..." to stderr.
// Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace plc
