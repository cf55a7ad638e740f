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

#include <stdexcept>
#include <string>

namespace mimosense {

/// A request whose memory or work estimate exceeds the configured budget.
class ResourceBudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input/output files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration documents (unknown keys, wrong types, bad values).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace mimosense
