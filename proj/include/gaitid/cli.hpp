#pragma once

namespace gaitid::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success, 1 other failure, 2 invalid config or usage,
/// 3 missing input artifact, 4 numerical failure.
int main(int argc, char** argv);

}  // namespace gaitid::cli
