// Copyright 2026 The photonsub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHOTONSUB_CLI_HPP
#define PHOTONSUB_CLI_HPP

#include <iosfwd>

namespace photonsub {

/// Exit code for malformed configurations or command lines.
inline constexpr int kExitConfig = 2;
/// Exit code for failures inside a pipeline stage.
inline constexpr int kExitStage = 1;

/// Entry point of the `photonsub` tool, writing results to `out` and diagnostics to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace photonsub

#endif
