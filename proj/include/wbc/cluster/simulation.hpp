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
#include "wbc/election/elector.hpp"
#include "wbc/flow/data_plane.hpp"
#include "wbc/health/health.hpp"
#include "wbc/link/link_model.hpp"
#include "wbc/membership/membership.hpp"
#include "wbc/sim/engine.hpp"
#include "wbc/sim/network.hpp"
#include "wbc/wire/message.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wbc::cluster {

using namespace std::chrono_literals;

class UnitAgent;

struct InterfaceSpec {
    std::string id;
    health::InterfaceKind kind = health::InterfaceKind::spanned_etherchannel_member;
};

struct UnitSpec {
    std::string label;  ///< scenario name, e.g. "u1"
    wire::SelectionInfo identity;
    link::RadioParams radio;
    wire::RadioType radio_type = wire::RadioType::access_point;
    std::optional<wire::InterfaceMode> mode;  ///< defaults to the cluster mode
    std::uint16_t weight = 1;
    std::vector<std::string> unmonitored;
};

struct SimulationConfig {
    membership::ClusterConfig cluster;
    std::vector<InterfaceSpec> data_interfaces{{"eth1", health::InterfaceKind::spanned_etherchannel_member}};
    health::HealthConfig health;
    election::ElectionConfig election;
    sim::ChannelSpec ccl{1ms, 0us, 0.0};
    sim::ChannelSpec data{1ms, 0us, 0.0};
    sim::Duration sample_interval = 100ms;
    flow::DataPlaneConfig data_plane;
    std::size_t min_ports = 1;
    sim::Duration rejoin_interval = 5min;
    int data_rejoin_attempts = 4;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

struct TrafficSpec {
    int connections = 50;
    std::uint32_t window_bytes = 65536;
    std::optional<sim::Duration> rtt;  ///< defaults to twice the data channel latency, or 2 ms
};

/// A whole cluster: engine, CCL fabric, units, data plane and traffic.
class Simulation {
public:
    Simulation(SimulationConfig config, std::vector<UnitSpec> units);
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    // Scenario actions.
    void join(UnitId unit);
    void fail_unit(UnitId unit);
    void recover_unit(UnitId unit);
    void fail_interface(UnitId unit, const std::string& iface);
    void recover_interface(UnitId unit, const std::string& iface);
    void manual_rejoin(UnitId unit);
    void start_traffic(const TrafficSpec& spec);
    void stop_traffic();
    /// nullopt applies the loss rate to every unit.
    void set_loss(std::optional<UnitId> unit, double rate);
    void partition_ccl(UnitId unit, bool on);
    void set_iface_role(const std::string& iface, const std::string& role);

    void run_until(sim::SimTime until);

    // Queries.
    std::optional<UnitId> find(const std::string& label) const;
    const std::string& label(UnitId unit) const;
    std::vector<UnitId> unit_ids() const;
    const UnitAgent& agent(UnitId unit) const;
    election::Role role(UnitId unit) const;
    std::string state(UnitId unit) const;
    std::vector<UnitId> members() const;
    std::vector<UnitId> lb_set() const;
    std::optional<UnitId> main_ip_owner() const { return main_ip_.owner(); }
    double unit_goodput(UnitId unit) const;
    const std::vector<link::TrafficFlow>& traffic() const noexcept { return traffic_; }
    bool traffic_active() const noexcept { return traffic_active_; }

    sim::Engine& engine() noexcept { return engine_; }
    const sim::Engine& engine() const noexcept { return engine_; }
    sim::Network& network() noexcept { return network_; }
    flow::DataPlane& data_plane() noexcept { return data_plane_; }
    const flow::DataPlane& data_plane() const noexcept { return data_plane_; }
    metrics::MetricsLog& log() noexcept { return engine_.metrics(); }
    const metrics::MetricsLog& log() const noexcept { return engine_.metrics(); }
    const SimulationConfig& config() const noexcept { return config_; }

private:
    friend class UnitAgent;

    UnitAgent& at(UnitId unit);
    const UnitAgent& at(UnitId unit) const;

    // Services used by the agents.
    void send(UnitId src, const sim::Destination& dest, const wire::Message& msg);
    void bind_main_ip(UnitId unit);
    void release_main_ip(UnitId unit);
    void membership_changed();
    void report_interface(UnitId unit, const health::InterfaceState& iface);
    /// Fabric isolation follows CCL carrier and scenario partitions.
    void refresh_isolation(UnitId unit);
    const membership::ClusterConfig& cluster_config() const noexcept { return config_.cluster; }
    membership::ClusterConfig& cluster_config() noexcept { return config_.cluster; }
    std::size_t ordinal(UnitId unit) const;

    void check_etherchannel();
    void emit_link_rates(UnitId unit);
    void sample();
    void handshake(const link::TrafficFlow& flow);
    flow::HashConfig lb_hash(const std::vector<UnitId>& lb) const;

    SimulationConfig config_;
    sim::Engine engine_;
    sim::Network network_;
    flow::DataPlane data_plane_;
    membership::MainIpRegistry main_ip_;
    std::map<UnitId, std::unique_ptr<UnitAgent>> units_;
    std::map<UnitId, double> loss_override_;
    std::set<UnitId> partitioned_;
    std::vector<UnitId> last_members_;
    std::vector<UnitId> last_lb_;
    std::vector<link::TrafficFlow> traffic_;
    bool traffic_active_ = false;
    std::uint64_t traffic_epoch_ = 0;
    bool echan_failed_ = false;
};

}  // namespace wbc::cluster
