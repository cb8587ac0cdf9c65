#pragma once

#include <functional>
#include <string>
#include <vector>

#include "parachain/config.hpp"
#include "parachain/output.hpp"

namespace parachain {

/// Runs `count` independent jobs on up to `threads` workers (atomic index
/// counter, no work partitioning); each job writes only its own slot, so the
/// assembled result is identical for any thread count. First exception wins
/// and is rethrown on the caller's thread.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

/// Dispatches one subcommand and assembles its full result in memory.
/// Throws ConfigError for bad options, UnstableSystemError when a steady
/// state is requested on an unstable system, and std::runtime_error for
/// numerical failures; per-row errors inside sweeps land in a status column
/// instead of aborting.
SweepResult run_command(const std::string& command, const RunConfig& config,
                        int threads);

std::vector<std::string> known_commands();

}  // namespace parachain
