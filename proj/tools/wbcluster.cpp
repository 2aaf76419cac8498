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

#include "wbc/scenario/runner.hpp"
#include "wbc/scenario/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kInvalid = 2, kInvariant = 3 };

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"wbcluster: clustered wireless backhaul simulator"};
    app.require_subcommand(1);

    std::string file;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> until;

    auto* simulate = app.add_subcommand("simulate", "run a scenario and write CSV metrics");
    simulate->add_option("scenario", file, "scenario file")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_option("--seed", seed, "override the scenario seed");
    simulate->add_option("--until", until, "stop after this many simulated seconds")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", file, "scenario file")->required();

    app.add_subcommand("schema", "print the CSV schemas");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    if (app.got_subcommand("schema")) {
        std::cout << "metrics.csv\n"
                  << wbc::metrics::metrics_header() << "\nmembership.csv\n"
                  << wbc::metrics::membership_header() << "\nflows.csv\n"
                  << wbc::metrics::flows_header() << "\n";
        return kOk;
    }

    wbc::scenario::Scenario scenario;
    try {
        scenario = wbc::scenario::load_scenario(file);
    } catch (const wbc::scenario::ScenarioError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kInvalid;
    }
    if (app.got_subcommand("validate")) {
        std::cout << file << ": ok (" << scenario.units.size() << " units, " << scenario.events.size()
                  << " events)\n";
        return kOk;
    }

    wbc::scenario::RunOptions options;
    options.seed = seed;
    if (until) {
        options.until = std::chrono::duration_cast<wbc::sim::Duration>(std::chrono::duration<double>(*until));
    }
    try {
        wbc::scenario::run_scenario(scenario, out_dir, options);
    } catch (const wbc::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::invalid_argument& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kInvalid;
    }
    return kOk;
}
