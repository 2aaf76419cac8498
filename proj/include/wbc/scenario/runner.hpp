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
#include "wbc/scenario/scenario.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace wbc::scenario {

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<sim::Duration> until;  ///< overrides the scenario duration
};

/// Simulation with every scenario event scheduled as an injection. Each
/// injection writes one `event` metrics row when it fires.
std::unique_ptr<cluster::Simulation> prepare(const Scenario& scenario, const RunOptions& options = {});

/// Applies one event to a simulation immediately.
void apply_event(cluster::Simulation& sim, const Event& event);

/// End time for a run of `scenario` under `options`.
sim::SimTime end_time(const Scenario& scenario, const RunOptions& options = {});

/// Human-readable digest of a finished run.
std::string summarize(const cluster::Simulation& sim, const Scenario& scenario, sim::SimTime end);

/// Runs to completion and writes metrics.csv, membership.csv, flows.csv and
/// summary.txt into `out_dir` (created if missing). Lets InvariantViolation
/// propagate.
void run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir, const RunOptions& options = {});

}  // namespace wbc::scenario
