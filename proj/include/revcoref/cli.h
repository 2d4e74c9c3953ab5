// Copyright 2026 The revcoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVCOREF_CLI_H_
#define REVCOREF_CLI_H_

#include <ostream>

namespace revcoref {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `revcoref` command. Subcommands: ingest, triples,
// mine-kb, train, eval, ablate, predict, pipeline and synth. Results go to
// `out`, progress and diagnostics to `err`. Returns 0 on success, 1 on a
// runtime failure and 2 on a usage or validation error.
int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err);

}  // namespace revcoref

#endif  // REVCOREF_CLI_H_
