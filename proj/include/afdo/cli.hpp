#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace afdo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand (generate, sweep, ablation, sensitivity, trust-sweep,
// simnet, policy-roundtrip, pipeline, reproduce) with argv-style arguments,
// writing outputs under the --out directory plus a manifest. Returns an exit
// code; diagnostics go to err.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

// Default seed, overridable by the AFDO_SEED environment variable and the
// --seed flag (flag wins).
std::uint64_t default_seed();

}  // namespace afdo::cli
