// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace fpgacost {

// Process exit codes. Every failure path returns a distinct nonzero value.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNetwork = 2,
  kExitModel = 3,
  kExitConfig = 4,
  kExitData = 5,
  kExitTraining = 6,
  kExitIo = 7,
  kExitInternal = 8,
};

/// Entry point of the `fpgacost` tool with injectable streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fpgacost
