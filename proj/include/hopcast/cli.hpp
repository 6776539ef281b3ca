// Copyright 2026 The Hopcast Authors
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

#ifndef HOPCAST_CLI_HPP_
#define HOPCAST_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace hopcast::cli {

enum ExitCode { kOk = 0, kError = 1, kUsage = 2, kRefused = 3 };

// argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace hopcast::cli

#endif  // HOPCAST_CLI_HPP_
