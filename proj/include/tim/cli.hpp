#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tim::cli {

/// Exit codes: 0 clean, 1 configuration or input error, 2 decoding failures observed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDecodeFailures = 2;

/// Environment variable that overrides the default seed.
inline constexpr const char* kSeedEnv = "TIM_SEED";

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tim::cli
