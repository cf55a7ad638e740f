// SPDX-License-Identifier: Apache-2.0
//
// mimosense: dual-polarization Rayleigh backscatter simulation for phase-OTDR
// Copyright (C) 2026 The mimosense authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mimosense::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, budget_error = 3, io_error = 4 };

struct Invocation {
  std::string subcommand;
  std::string config_path; // empty = built-in defaults
  std::string out_dir{"."};
  std::string input_path;  // stored fibre for `probe`, channel estimate for `estimate`
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  int verbosity{0};
};

/// Subcommand names accepted by dispatch.
const std::vector<std::string> &subcommands();

/// Runs one subcommand and maps failures onto exit codes.
int dispatch(const Invocation &inv);

/// Parses argv and dispatches.
int run(int argc, char **argv);

} // namespace mimosense::cli
