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

#include "wbc/common.hpp"
#include "wbc/sim/time.hpp"
#include "wbc/wire/message.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>

namespace wbc::health {

using namespace std::chrono_literals;

struct HealthConfig {
    sim::Duration keepalive_interval = 1s;
    int miss_threshold = 3;
    sim::Duration established_echan_removal = 9s;
    sim::Duration join_grace = 90s;
    sim::Duration non_echan_removal = 500ms;
    sim::Duration ccl_rtt_bound = 20ms;
    sim::Duration rtt_probe_interval = 10s;
    int probe_miss_limit = 3;

    /// Throws std::invalid_argument unless all durations are positive and
    /// join_grace exceeds established_echan_removal.
    void validate() const;

    sim::Duration liveness_window() const { return keepalive_interval * miss_threshold; }
};

enum class InterfaceKind : std::uint8_t { spanned_etherchannel_member, etherchannel_member, non_etherchannel };

const char* to_string(InterfaceKind kind) noexcept;
std::optional<InterfaceKind> parse_interface_kind(std::string_view text);

constexpr bool is_etherchannel(InterfaceKind kind) noexcept
{
    return kind != InterfaceKind::non_etherchannel;
}

struct InterfaceState {
    std::string id;
    InterfaceKind kind = InterfaceKind::spanned_etherchannel_member;
    bool up = true;
    bool monitored = true;
    std::optional<sim::SimTime> down_since;  ///< set iff !up

    void mark_down(sim::SimTime at)
    {
        if (up) {
            up = false;
            down_since = at;
        }
    }
    void mark_up()
    {
        up = true;
        down_since.reset();
    }
};

enum class RemovalReason : std::uint8_t { keepalive_miss, iface_9s, iface_500ms, all_ifaces, mode_mismatch, forced_leave };

const char* to_string(RemovalReason reason) noexcept;
wire::LeaveReason to_leave_reason(RemovalReason reason) noexcept;

/// Encodes SNR in hundredths of a dB, rounded to nearest.
wire::RadioInfo make_radio_info(wire::InterfaceMode mode, wire::RadioType type, double snr_db,
                                std::uint16_t load_balancing_weight);

wire::Keepalive emit_keepalive(const wire::SelectionInfo& selection, const wire::RadioInfo& radio);

enum class KeepaliveVerdict : std::uint8_t { refreshed, mode_mismatch, unknown_sender };

/// Primary-side classification of a received keepalive.
KeepaliveVerdict assess_keepalive(bool known_member, wire::InterfaceMode cluster_mode, const wire::Keepalive& msg);

/// Per-peer keepalive deadlines. A peer is failed once now reaches
/// last keepalive + miss_threshold x interval.
class LivenessTracker {
public:
    explicit LivenessTracker(sim::Duration window) : window_(window) {}

    sim::SimTime refresh(UnitId peer, sim::SimTime now);
    bool expired(UnitId peer, sim::SimTime now) const;
    std::optional<sim::SimTime> deadline(UnitId peer) const;
    void forget(UnitId peer) { deadlines_.erase(peer); }
    bool tracks(UnitId peer) const { return deadlines_.count(peer) != 0; }

private:
    sim::Duration window_;
    std::map<UnitId, sim::SimTime> deadlines_;
};

/// What the primary should do about one interface transition.
struct InterfaceDecision {
    enum class Action : std::uint8_t {
        none,        ///< unmonitored, or nothing to do
        cancel,      ///< interface recovered; drop any pending removal
        remove_at,   ///< remove the unit at `at` if the interface is still down
        recheck_at,  ///< inside the join grace window; look again at `at`
    };
    Action action = Action::none;
    sim::SimTime at;
    RemovalReason reason = RemovalReason::iface_9s;
};

/// Removal timing rules:
///   EtherChannel member of an established unit: down_since + 9 s.
///   EtherChannel member within 90 s of joining: no decision until the grace
///   window closes; an interface still down then gets the 9 s rule from there.
///   Non-EtherChannel: down_since + 500 ms regardless of member state.
InterfaceDecision on_interface_change(const HealthConfig& config, sim::SimTime member_joined_at,
                                      const InterfaceState& iface, sim::SimTime now);

/// True when the unit has at least one monitored interface and all of them are down.
bool all_monitored_down(std::span<const InterfaceState> interfaces);

/// An EtherChannel is failed when fewer than `min_ports` of its member
/// interfaces are up.
bool echan_failed(std::span<const InterfaceState> member_interfaces, std::size_t min_ports = 1);

/// Secondary-side CCL round-trip prober.
class RttProber {
public:
    struct Sample {
        sim::Duration rtt{0};
        bool degraded = false;
    };

    explicit RttProber(const HealthConfig& config) : bound_(config.ccl_rtt_bound), miss_limit_(config.probe_miss_limit) {}

    wire::CclPing next_probe(sim::SimTime now);
    /// nullopt for unknown or already-expired probes.
    std::optional<Sample> on_pong(const wire::ProbeInfo& probe, sim::SimTime now);
    /// Marks the probe missed if it is still outstanding. Returns true once
    /// the consecutive miss count reaches the limit.
    bool on_probe_deadline(std::uint32_t sequence);
    void reset();

    int consecutive_misses() const noexcept { return misses_; }

private:
    sim::Duration bound_;
    int miss_limit_;
    std::uint32_t next_seq_ = 1;
    std::set<std::uint32_t> outstanding_;
    int misses_ = 0;
};

}  // namespace wbc::health
