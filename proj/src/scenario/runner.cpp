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

#include "wbc/cluster/unit_agent.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace wbc::scenario {

namespace {

UnitId unit_of(const cluster::Simulation& sim, const std::string& label)
{
    auto id = sim.find(label);
    if (!id) {
        throw InvariantViolation("event names undeclared unit " + label);
    }
    return *id;
}

cluster::TrafficSpec traffic_spec(const Event& e)
{
    cluster::TrafficSpec spec;
    for (const auto& arg : e.args) {
        const auto eq = arg.find('=');
        const auto key = arg.substr(0, eq);
        const auto value = arg.substr(eq + 1);
        if (key == "connections") {
            spec.connections = std::stoi(value);
        } else if (key == "window") {
            spec.window_bytes = static_cast<std::uint32_t>(std::stoul(value));
        } else if (key == "rtt") {
            spec.rtt = parse_duration(value);
        }
    }
    return spec;
}

std::string fmt(double v)
{
    return metrics::format_double(v);
}

}  // namespace

void apply_event(cluster::Simulation& sim, const Event& e)
{
    const auto& a = e.action;
    if (a == "join") {
        sim.join(unit_of(sim, e.args.at(0)));
    } else if (a == "fail_unit") {
        sim.fail_unit(unit_of(sim, e.args.at(0)));
    } else if (a == "recover_unit") {
        sim.recover_unit(unit_of(sim, e.args.at(0)));
    } else if (a == "manual_rejoin") {
        sim.manual_rejoin(unit_of(sim, e.args.at(0)));
    } else if (a == "fail_interface") {
        sim.fail_interface(unit_of(sim, e.args.at(0)), e.args.at(1));
    } else if (a == "recover_interface") {
        sim.recover_interface(unit_of(sim, e.args.at(0)), e.args.at(1));
    } else if (a == "start_traffic") {
        sim.start_traffic(traffic_spec(e));
    } else if (a == "stop_traffic") {
        sim.stop_traffic();
    } else if (a == "set_loss") {
        const std::optional<UnitId> unit =
            e.args.at(0) == "all" ? std::nullopt : std::optional<UnitId>(unit_of(sim, e.args[0]));
        sim.set_loss(unit, std::stod(e.args.at(1)));
    } else if (a == "partition_ccl") {
        const bool on = e.args.size() < 2 || e.args[1] == "on" || e.args[1] == "true" || e.args[1] == "yes" ||
                        e.args[1] == "1";
        sim.partition_ccl(unit_of(sim, e.args.at(0)), on);
    } else if (a == "set_iface_role") {
        sim.set_iface_role(e.args.at(0), e.args.at(1));
    } else {
        throw InvariantViolation("unknown scenario action " + a);
    }
}

std::unique_ptr<cluster::Simulation> prepare(const Scenario& scenario, const RunOptions& options)
{
    auto config = scenario.config;
    if (options.seed) {
        config.seed = *options.seed;
    }
    auto sim = std::make_unique<cluster::Simulation>(std::move(config), scenario.units);
    auto* raw = sim.get();
    for (const auto& e : scenario.events) {
        raw->engine().schedule(e.at, sim::EventKind::scenario_injection, [raw, e] {
            metrics::MetricRow r;
            r.at = raw->engine().now();
            r.record = "event";
            if (!e.args.empty() && raw->find(e.args[0])) {
                r.unit = e.args[0];
            }
            r.detail = e.text();
            raw->log().add(std::move(r));
            apply_event(*raw, e);
        });
    }
    return sim;
}

sim::SimTime end_time(const Scenario& scenario, const RunOptions& options)
{
    return sim::SimTime::from(options.until.value_or(scenario.duration));
}

std::string summarize(const cluster::Simulation& sim, const Scenario& scenario, sim::SimTime end)
{
    const auto& log = sim.log();
    std::ostringstream out;
    out << "# wbcluster summary\n";
    out << "duration_s " << sim::format_seconds(end) << "\n";
    out << "seed " << sim.config().seed << "\n";
    out << "units " << sim.unit_ids().size() << "\n";
    for (auto u : sim.unit_ids()) {
        out << "unit " << sim.label(u) << " goodput_mbps=" << fmt(sim.unit_goodput(u)) << " final_state=" << sim.state(u)
            << "\n";
    }

    // Phases run between consecutive distinct event times.
    std::vector<std::pair<sim::SimTime, std::string>> marks;
    for (const auto& e : scenario.events) {
        if (e.at > end) {
            break;
        }
        if (!marks.empty() && marks.back().first == e.at) {
            marks.back().second += "; " + e.text();
        } else {
            marks.emplace_back(e.at, e.text());
        }
    }
    for (std::size_t i = 0; i < marks.size(); ++i) {
        const auto from = marks[i].first;
        const auto to = i + 1 < marks.size() ? marks[i + 1].first : end;
        const bool final_phase = i + 1 == marks.size();
        double sum = 0.0;
        double last = 0.0;
        std::size_t n = 0;
        for (const auto& r : log.metrics()) {
            const bool inside = r.at >= from && (r.at < to || (final_phase && r.at == to));
            if (r.record == "throughput" && r.unit == "cluster" && inside) {
                sum += r.delivered_mbps.value_or(0.0);
                last = r.delivered_mbps.value_or(0.0);
                ++n;
            }
        }
        out << "phase " << sim::format_seconds(from) << "-" << sim::format_seconds(to) << " after \""
            << marks[i].second << "\" samples=" << n;
        if (n > 0) {
            out << " mean_aggregate_mbps=" << fmt(sum / static_cast<double>(n)) << " steady_aggregate_mbps="
                << fmt(last);
        }
        out << "\n";
    }

    std::size_t failovers = 0;
    for (const auto& m : log.membership()) {
        if (m.new_state == "primary" && m.reason == "failover") {
            ++failovers;
        }
    }
    std::map<std::string, std::size_t> removals;
    std::size_t degraded = 0;
    std::size_t ccl_failures = 0;
    std::size_t main_ip_moves = 0;
    std::int64_t max_rtt = -1;
    for (const auto& r : log.metrics()) {
        if (r.record == "removal") {
            ++removals[r.detail];
        } else if (r.record == "ccl_degraded") {
            ++degraded;
        } else if (r.record == "ccl_failure") {
            ++ccl_failures;
        } else if (r.record == "main_ip") {
            ++main_ip_moves;
        } else if (r.record == "rtt" && r.rtt_us) {
            max_rtt = std::max(max_rtt, *r.rtt_us);
        }
    }
    out << "failovers " << failovers << "\n";
    out << "main_ip_bindings " << main_ip_moves << "\n";
    for (const auto& [reason, n] : removals) {
        out << "removals " << reason << "=" << n << "\n";
    }
    out << "ccl_max_rtt_ms " << (max_rtt < 0 ? std::string("none") : fmt(static_cast<double>(max_rtt) / 1000.0))
        << "\n";
    out << "ccl_degraded " << degraded << "\n";
    out << "ccl_failures " << ccl_failures << "\n";
    const auto& fc = sim.data_plane().counters();
    out << "flows created=" << fc.flows_created << " lost=" << fc.flows_lost << " owner_moves=" << fc.owner_moves
        << " owner_queries=" << fc.owner_queries << " redirects=" << fc.redirects << " dropped=" << fc.packets_dropped
        << "\n";
    for (const auto& [name, n] : log.counters()) {
        out << "counter " << name << "=" << n << "\n";
    }
    return out.str();
}

void run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir, const RunOptions& options)
{
    auto sim = prepare(scenario, options);
    const auto end = end_time(scenario, options);
    sim->run_until(end);
    const std::string summary = summarize(*sim, scenario, end);
    sim->log().flush_counters(end);

    std::filesystem::create_directories(out_dir);
    auto write = [&](const char* name, auto&& fn) {
        std::ofstream f(out_dir / name, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error(std::string("cannot write ") + (out_dir / name).string());
        }
        fn(f);
    };
    write("metrics.csv", [&](std::ostream& o) { sim->log().write_metrics_csv(o); });
    write("membership.csv", [&](std::ostream& o) { sim->log().write_membership_csv(o); });
    write("flows.csv", [&](std::ostream& o) { sim->log().write_flows_csv(o); });
    write("summary.txt", [&](std::ostream& o) { o << summary; });
}

}  // namespace wbc::scenario
