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

#include "wbc/health/health.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbc::health {

void HealthConfig::validate() const
{
    for (auto d : {keepalive_interval, established_echan_removal, join_grace, non_echan_removal, ccl_rtt_bound,
                   rtt_probe_interval}) {
        if (d.count() <= 0) {
            throw std::invalid_argument("health timers must be positive");
        }
    }
    if (miss_threshold < 1 || probe_miss_limit < 1) {
        throw std::invalid_argument("miss thresholds must be at least 1");
    }
    if (join_grace <= established_echan_removal) {
        throw std::invalid_argument("join grace must exceed the established-member removal delay");
    }
}

const char* to_string(InterfaceKind kind) noexcept
{
    switch (kind) {
    case InterfaceKind::spanned_etherchannel_member:
        return "spanned-etherchannel-member";
    case InterfaceKind::etherchannel_member:
        return "etherchannel-member";
    case InterfaceKind::non_etherchannel:
        return "non-etherchannel";
    }
    return "?";
}

std::optional<InterfaceKind> parse_interface_kind(std::string_view text)
{
    if (text == "spanned-etherchannel-member" || text == "spanned") {
        return InterfaceKind::spanned_etherchannel_member;
    }
    if (text == "etherchannel-member" || text == "etherchannel") {
        return InterfaceKind::etherchannel_member;
    }
    if (text == "non-etherchannel") {
        return InterfaceKind::non_etherchannel;
    }
    return std::nullopt;
}

const char* to_string(RemovalReason reason) noexcept
{
    switch (reason) {
    case RemovalReason::keepalive_miss:
        return "keepalive-miss";
    case RemovalReason::iface_9s:
        return "iface-9s";
    case RemovalReason::iface_500ms:
        return "iface-500ms";
    case RemovalReason::all_ifaces:
        return "all-ifaces";
    case RemovalReason::mode_mismatch:
        return "mode-mismatch";
    case RemovalReason::forced_leave:
        return "forced-leave";
    }
    return "?";
}

wire::LeaveReason to_leave_reason(RemovalReason reason) noexcept
{
    switch (reason) {
    case RemovalReason::keepalive_miss:
        return wire::LeaveReason::keepalive_miss;
    case RemovalReason::iface_9s:
        return wire::LeaveReason::iface_9s;
    case RemovalReason::iface_500ms:
        return wire::LeaveReason::iface_500ms;
    case RemovalReason::all_ifaces:
        return wire::LeaveReason::all_ifaces;
    case RemovalReason::mode_mismatch:
        return wire::LeaveReason::mode_mismatch;
    case RemovalReason::forced_leave:
        return wire::LeaveReason::administrative;
    }
    return wire::LeaveReason::administrative;
}

wire::RadioInfo make_radio_info(wire::InterfaceMode mode, wire::RadioType type, double snr_db,
                                std::uint16_t load_balancing_weight)
{
    const double centi = std::clamp(std::round(snr_db * 100.0), -10000.0, 10000.0);
    return wire::RadioInfo{mode, type, static_cast<std::int16_t>(centi), load_balancing_weight};
}

wire::Keepalive emit_keepalive(const wire::SelectionInfo& selection, const wire::RadioInfo& radio)
{
    return wire::Keepalive{selection, radio};
}

KeepaliveVerdict assess_keepalive(bool known_member, wire::InterfaceMode cluster_mode, const wire::Keepalive& msg)
{
    if (!known_member) {
        return KeepaliveVerdict::unknown_sender;
    }
    if (msg.radio.mode != cluster_mode) {
        return KeepaliveVerdict::mode_mismatch;
    }
    return KeepaliveVerdict::refreshed;
}

sim::SimTime LivenessTracker::refresh(UnitId peer, sim::SimTime now)
{
    const sim::SimTime deadline = now + window_;
    deadlines_[peer] = deadline;
    return deadline;
}

bool LivenessTracker::expired(UnitId peer, sim::SimTime now) const
{
    auto it = deadlines_.find(peer);
    return it != deadlines_.end() && it->second <= now;
}

std::optional<sim::SimTime> LivenessTracker::deadline(UnitId peer) const
{
    auto it = deadlines_.find(peer);
    if (it == deadlines_.end()) {
        return std::nullopt;
    }
    return it->second;
}

InterfaceDecision on_interface_change(const HealthConfig& config, sim::SimTime member_joined_at,
                                      const InterfaceState& iface, sim::SimTime now)
{
    using Action = InterfaceDecision::Action;
    InterfaceDecision d;
    if (!iface.monitored) {
        return d;
    }
    if (iface.up || !iface.down_since) {
        d.action = Action::cancel;
        return d;
    }
    const sim::SimTime down = *iface.down_since;
    if (!is_etherchannel(iface.kind)) {
        d.action = Action::remove_at;
        d.at = down + config.non_echan_removal;
        d.reason = RemovalReason::iface_500ms;
        return d;
    }
    const sim::SimTime grace_end = member_joined_at + config.join_grace;
    if (now < grace_end) {
        d.action = Action::recheck_at;
        d.at = grace_end;
        d.reason = RemovalReason::iface_9s;
        return d;
    }
    d.action = Action::remove_at;
    d.at = std::max(down, grace_end) + config.established_echan_removal;
    d.reason = RemovalReason::iface_9s;
    return d;
}

bool all_monitored_down(std::span<const InterfaceState> interfaces)
{
    bool any = false;
    for (const auto& i : interfaces) {
        if (!i.monitored) {
            continue;
        }
        any = true;
        if (i.up) {
            return false;
        }
    }
    return any;
}

bool echan_failed(std::span<const InterfaceState> member_interfaces, std::size_t min_ports)
{
    std::size_t live = 0;
    for (const auto& i : member_interfaces) {
        if (is_etherchannel(i.kind) && i.up) {
            ++live;
        }
    }
    return live < min_ports;
}

wire::CclPing RttProber::next_probe(sim::SimTime now)
{
    const std::uint32_t seq = next_seq_++;
    outstanding_.insert(seq);
    return wire::CclPing{wire::ProbeInfo{seq, now.micros()}};
}

std::optional<RttProber::Sample> RttProber::on_pong(const wire::ProbeInfo& probe, sim::SimTime now)
{
    if (outstanding_.erase(probe.sequence) == 0) {
        return std::nullopt;
    }
    misses_ = 0;
    Sample s;
    s.rtt = now - sim::SimTime{probe.sent_at_us};
    s.degraded = s.rtt > bound_;
    return s;
}

bool RttProber::on_probe_deadline(std::uint32_t sequence)
{
    if (outstanding_.erase(sequence) == 0) {
        return false;
    }
    ++misses_;
    return misses_ >= miss_limit_;
}

void RttProber::reset()
{
    outstanding_.clear();
    misses_ = 0;
}

}  // namespace wbc::health
