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

#include "wbc/sim/time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace wbc::metrics {

inline constexpr int kSchemaVersion = 1;

/// One row of metrics.csv. Which optional columns are populated depends on
/// `record`:
///   event       scenario injection (detail = action and arguments)
///   throughput  per-unit offered/delivered for one sample interval
///   link_rates  PHY, duty cycle, MAC efficiency and MAC rate (detail = tx|rx)
///   rtt         CCL ping-pong round trip (peer = primary)
///   ccl_degraded, ccl_failure, removal, main_ip, echan_failed, counter
struct MetricRow {
    sim::SimTime at;
    std::string record;
    std::string unit;
    std::string peer;
    std::optional<double> value;
    std::optional<double> offered_mbps;
    std::optional<double> delivered_mbps;
    std::optional<double> phy_mbps;
    std::optional<double> duty_cycle;
    std::optional<double> mac_efficiency;
    std::optional<double> mac_mbps;
    std::optional<double> goodput_mbps;
    std::optional<std::int64_t> rtt_us;
    std::string detail;
};

struct MembershipRow {
    sim::SimTime at;
    std::string unit;
    std::string old_state;
    std::string new_state;
    std::string reason;
};

struct FlowRow {
    sim::SimTime at;
    std::uint64_t flow_id = 0;
    std::string event;
    std::string proprietor;
    std::string organizer;
};

class MetricsLog {
public:
    void add(MetricRow row) { metrics_.push_back(std::move(row)); }
    void add(MembershipRow row) { membership_.push_back(std::move(row)); }
    void add(FlowRow row) { flows_.push_back(std::move(row)); }

    void count(std::string_view name, std::uint64_t by = 1) { counters_[std::string(name)] += by; }
    std::uint64_t counter(std::string_view name) const;

    const std::vector<MetricRow>& metrics() const noexcept { return metrics_; }
    const std::vector<MembershipRow>& membership() const noexcept { return membership_; }
    const std::vector<FlowRow>& flows() const noexcept { return flows_; }
    const std::map<std::string, std::uint64_t>& counters() const noexcept { return counters_; }

    /// Appends one `counter` row per counter, stamped `at`.
    void flush_counters(sim::SimTime at);

    void write_metrics_csv(std::ostream& out) const;
    void write_membership_csv(std::ostream& out) const;
    void write_flows_csv(std::ostream& out) const;

private:
    std::vector<MetricRow> metrics_;
    std::vector<MembershipRow> membership_;
    std::vector<FlowRow> flows_;
    std::map<std::string, std::uint64_t> counters_;
};

std::string_view metrics_header();
std::string_view membership_header();
std::string_view flows_header();

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace wbc::metrics
