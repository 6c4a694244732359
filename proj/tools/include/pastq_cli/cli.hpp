// Copyright 2026 The pastq Authors
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

// Batch front-end for the pastq library. Commands: simulate, smooth, game and
// hmm-check. Exit codes: 0 success, 2 configuration error, 3 numerical
// failure, 4 I/O error. Failures print a single JSON object on `err`.

#include <ostream>
#include <span>
#include <string>

#include "pastq/error.hpp"

namespace pastq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

int exit_code(ErrorKind kind);

/// `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace pastq::cli
