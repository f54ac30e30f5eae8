#pragma once

#include <cstdint>

namespace convml::cli {

/// Seed used by every subcommand when --seed is not given, so bare
/// invocations are reproducible.
constexpr uint64_t kDefaultSeed = 1;

/// Parse argv and run one subcommand. Returns 0 on success, 1 on a usage
/// error, 2 on a data or format error.
int run(int argc, const char* const* argv);

}  // namespace convml::cli
