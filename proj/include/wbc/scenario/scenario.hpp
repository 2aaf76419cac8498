// Copyright 2026 The wbcluster Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "wbc/cluster/simulation.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wbc::scenario {

/// One line of the [events] section.
struct Event {
    sim::SimTime at;
    std::string action;
    std::vector<std::string> args;
    int line = 0;

    /// "action arg1 arg2 ..."
    std::string text() const;
};

struct Scenario {
    cluster::SimulationConfig config;
    std::vector<cluster::UnitSpec> units;
    std::vector<Event> events;  ///< sorted by time, file order within one instant
    sim::Duration duration{std::chrono::seconds(60)};
};

/// Load failure with the offending line (0 when not tied to a line) and field.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int line, std::string field, const std::string& message);

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

/// "250ms", "9s", "5min", "1500us". A bare number is seconds.
std::optional<sim::Duration> parse_duration(std::string_view text);

Scenario parse_scenario(std::string_view text);

/// Throws ScenarioError when the file cannot be read or is invalid.
Scenario load_scenario(const std::filesystem::path& path);

/// Actions understood in the [events] section.
const std::vector<std::string>& known_actions();

}  // namespace wbc::scenario
