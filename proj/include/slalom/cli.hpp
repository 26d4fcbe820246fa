#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace slalom {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitUsage = 2, kExitCertificate = 3, kExitIo = 4 };

using EnvLookup = std::function<const char*(const char*)>;

// The slalomlab command line. args excludes the program name. Settings are
// resolved as defaults < config file < SLALOMLAB_* environment < flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = [](const char* k) -> const char* { return std::getenv(k); });

}  // namespace slalom
