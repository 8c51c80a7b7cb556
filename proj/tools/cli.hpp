#pragma once

#include <string>
#include <vector>

namespace plc::cli {

// Exit codes. Anything not listed below exits with kFailure.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kFormat = 2;     // bad magic/version, truncated or malformed file
inline constexpr int kConfig = 3;     // config or argument validation
inline constexpr int kNumerical = 4;  // singular system, vanishing feature row

// args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace plc::cli
