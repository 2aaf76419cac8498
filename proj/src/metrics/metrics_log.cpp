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

#include "wbc/metrics/metrics_log.hpp"

#include <charconv>
#include <cstdio>

namespace wbc::metrics {

namespace {

constexpr std::string_view kMetricsHeader =
    "time_us,record,unit,peer,value,offered_mbps,delivered_mbps,phy_mbps,duty_cycle,"
    "mac_efficiency,mac_mbps,goodput_mbps,rtt_us,detail";
constexpr std::string_view kMembershipHeader = "time_us,unit,old_state,new_state,reason";
constexpr std::string_view kFlowsHeader = "time_us,flow_id,event,proprietor,organizer";

void write_schema_line(std::ostream& out, std::string_view table)
{
    out << "# wbcluster " << table << " schema " << kSchemaVersion << '\n';
}

// Fields never contain separators except `detail`, which is quoted when it does.
void write_field(std::ostream& out, std::string_view text)
{
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        out << text;
        return;
    }
    out << '"';
    for (char c : text) {
        if (c == '"') {
            out << '"';
        }
        out << c;
    }
    out << '"';
}

void write_opt(std::ostream& out, const std::optional<double>& v)
{
    out << ',';
    if (v) {
        out << format_double(*v);
    }
}

}  // namespace

std::string_view metrics_header() { return kMetricsHeader; }
std::string_view membership_header() { return kMembershipHeader; }
std::string_view flows_header() { return kFlowsHeader; }

std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    return std::string(buf, end);
}

std::uint64_t MetricsLog::counter(std::string_view name) const
{
    auto it = counters_.find(std::string(name));
    return it == counters_.end() ? 0 : it->second;
}

void MetricsLog::flush_counters(sim::SimTime at)
{
    for (const auto& [name, value] : counters_) {
        MetricRow row;
        row.at = at;
        row.record = "counter";
        row.value = static_cast<double>(value);
        row.detail = name;
        metrics_.push_back(std::move(row));
    }
}

void MetricsLog::write_metrics_csv(std::ostream& out) const
{
    write_schema_line(out, "metrics");
    out << kMetricsHeader << '\n';
    for (const auto& r : metrics_) {
        out << r.at.micros() << ',' << r.record << ',' << r.unit << ',' << r.peer;
        write_opt(out, r.value);
        write_opt(out, r.offered_mbps);
        write_opt(out, r.delivered_mbps);
        write_opt(out, r.phy_mbps);
        write_opt(out, r.duty_cycle);
        write_opt(out, r.mac_efficiency);
        write_opt(out, r.mac_mbps);
        write_opt(out, r.goodput_mbps);
        out << ',';
        if (r.rtt_us) {
            out << *r.rtt_us;
        }
        out << ',';
        write_field(out, r.detail);
        out << '\n';
    }
}

void MetricsLog::write_membership_csv(std::ostream& out) const
{
    write_schema_line(out, "membership");
    out << kMembershipHeader << '\n';
    for (const auto& r : membership_) {
        out << r.at.micros() << ',' << r.unit << ',' << r.old_state << ',' << r.new_state << ','
            << r.reason << '\n';
    }
}

void MetricsLog::write_flows_csv(std::ostream& out) const
{
    write_schema_line(out, "flows");
    out << kFlowsHeader << '\n';
    for (const auto& r : flows_) {
        out << r.at.micros() << ',' << r.flow_id << ',' << r.event << ',' << r.proprietor << ','
            << r.organizer << '\n';
    }
}

}  // namespace wbc::metrics
