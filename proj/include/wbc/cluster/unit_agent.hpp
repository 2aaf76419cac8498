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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wbc::cluster {

/// Why a unit is running the join procedure; decides what a failed attempt means.
enum class JoinReason : std::uint8_t { bootstrap, rejoin_attempt, recovery, manual };

/// One radio unit's control plane: election, keepalives and liveness, the
/// primary's interface monitoring, CCL probing, config mirroring and rejoin.
class UnitAgent {
public:
    UnitAgent(Simulation& sim, UnitId id, UnitSpec spec);

    UnitAgent(const UnitAgent&) = delete;
    UnitAgent& operator=(const UnitAgent&) = delete;

    void power_on();
    void power_off();
    /// Scenario `join`: bootstrap join unless the CCL is down.
    void join();
    /// Scenario `recover_unit`: power on and rejoin a cluster the unit belonged to.
    void recover();
    void manual_rejoin();

    void on_message(UnitId from, std::span<const std::uint8_t> bytes);

    /// Local interface transitions. `iface` may be a data, CCL or management id.
    void set_interface(const std::string& iface, bool up);

    /// Primary duty: a member (or this unit) reported an interface transition.
    void on_member_interface(UnitId member, const health::InterfaceState& iface);

    /// Primary duty: change an interface role and replicate it.
    void set_interface_role(const std::string& iface, const std::string& role);

    UnitId id() const noexcept { return id_; }
    const UnitSpec& spec() const noexcept { return spec_; }
    bool powered() const noexcept { return powered_; }
    bool ccl_up() const noexcept { return ccl_up_; }
    bool joined() const noexcept { return powered_ && elector_.joined(); }
    election::Role role() const noexcept { return elector_.role(); }
    std::string state() const;
    std::optional<UnitId> primary() const noexcept { return elector_.primary(); }
    const wire::ConfigInfo& config() const noexcept { return config_; }
    const std::vector<health::InterfaceState>& interfaces() const noexcept { return interfaces_; }
    bool data_link_up() const;
    const membership::RejoinScheduler& rejoin() const noexcept { return rejoin_; }
    std::optional<Ipv4> mgmt_address() const noexcept { return mgmt_address_; }
    bool data_admin_down() const noexcept { return data_admin_down_; }
    /// Peers this unit currently considers members (excluding itself).
    std::vector<UnitId> view() const;
    wire::InterfaceMode mode() const noexcept;

private:
    struct Peer {
        wire::SelectionInfo info;
        sim::SimTime since;
        sim::SimTime deadline;
    };

    using Timer = std::function<void()>;

    void after(sim::Duration delay, Timer fn);
    void at_time(sim::SimTime when, Timer fn);
    void after_power(sim::Duration delay, Timer fn);

    void start_join(election::JoinMode mode, JoinReason reason);
    void apply(const election::Effects& fx, const std::string& reason);
    void on_joined(const std::string& reason);
    void on_join_failed();
    void take_primary_duties();
    void leave(std::optional<membership::RejoinCause> cause, const std::string& reason);
    void schedule_rejoin();
    void rejoin_attempt();

    void send(const sim::Destination& to, const wire::Message& msg);
    void keepalive_tick(std::uint64_t session);
    void probe_tick(std::uint64_t session);

    void handle(UnitId from, const wire::Message& msg);
    void on_keepalive(UnitId from, const wire::Keepalive& ka);
    void on_request(UnitId from, const wire::ElectionRequest& req);
    void on_forced_leave(UnitId from, const wire::ForcedLeave& fl);
    void on_pong(UnitId from, const wire::CclPong& pong);

    void admit(UnitId unit, const wire::SelectionInfo& info);
    void refresh(UnitId unit, const wire::SelectionInfo& info);
    void peer_deadline(UnitId unit, sim::SimTime deadline);
    void remove_member(UnitId unit, health::RemovalReason reason);
    void cancel_interface_timers(UnitId member);
    void update_standby(bool sync = true);
    void sync_state(const std::string& reason);
    void row(const char* record, std::optional<UnitId> peer, const std::string& detail,
             std::optional<double> value = std::nullopt);

    Simulation& sim_;
    UnitId id_;
    UnitSpec spec_;
    election::Elector elector_;
    health::RttProber prober_;
    membership::RejoinScheduler rejoin_;

    bool powered_ = false;
    bool ccl_up_ = true;
    bool ever_joined_ = false;
    bool was_primary_ = false;
    bool data_admin_down_ = false;
    std::optional<Ipv4> mgmt_address_;
    JoinReason join_reason_ = JoinReason::bootstrap;
    std::vector<health::InterfaceState> interfaces_;
    wire::ConfigInfo config_;
    std::optional<std::pair<UnitId, wire::ConfigInfo>> pending_config_;
    std::map<UnitId, Peer> peers_;
    std::map<std::pair<UnitId, std::string>, sim::EventId> iface_timers_;
    std::optional<sim::EventId> join_timer_;
    sim::SimTime joined_at_;
    std::uint64_t session_ = 0;  ///< bumped on leave and power-off to void timers
    std::uint64_t power_epoch_ = 0;
    std::string last_state_;
};

}  // namespace wbc::cluster
