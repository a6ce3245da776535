// Copyright 2026 The WorldGauge Authors.
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace worldgauge::cli {

namespace exit_codes {
inline constexpr int kOk = 0;
inline constexpr int kDomain = 1;
inline constexpr int kUsage = 2;
inline constexpr int kTransport = 3;
}  // namespace exit_codes

// Runs the worldgauge command line. `args` excludes the program name.
// Never throws; failures are reported on `err` and mapped to exit codes:
// 0 success, 1 domain error, 2 usage error, 3 bridge or transport error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Serves a built-in model over the bridge protocol on stdin/stdout, or on
// a TCP port with --tcp. Same exit code convention as run_cli.
int run_bridge_serve(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                     std::ostream& err);

}  // namespace worldgauge::cli
