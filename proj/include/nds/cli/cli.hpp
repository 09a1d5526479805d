#pragma once

#include <iostream>

namespace nds::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;   // runtime error or failed check
inline constexpr int kExitUsage = 2;     // bad flags or config
inline constexpr int kExitFile = 3;      // missing or malformed file
inline constexpr int kExitShape = 4;     // model, data or mask shapes disagree
inline constexpr int kExitNumeric = 5;   // non-finite loss or solver failure

int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace nds::cli
