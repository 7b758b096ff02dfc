/* Copyright 2026 The occmatch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


// Command-line front end: gen, train, eval, demo and match.

#ifndef OCCMATCH_TOOLS_CLI_HPP_
#define OCCMATCH_TOOLS_CLI_HPP_

#include <array>
#include <cstdint>
#include <ostream>

namespace occmatch::cli {

inline constexpr std::array<double, 5> kSweepLevels = {0.0, 0.25, 0.5, 0.75, 1.0};

// Seed of scene i at sweep level k (k = -1 outside a sweep).
std::uint64_t SceneSeed(std::uint64_t seed, int level_index, int scene_index);

// Runs one invocation. Returns the process exit status; failures print a
// single "error: code=<Name> message=..." line to err.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace occmatch::cli

#endif  // OCCMATCH_TOOLS_CLI_HPP_
