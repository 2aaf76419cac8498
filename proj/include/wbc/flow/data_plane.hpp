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
#include "wbc/flow/flow_key.hpp"
#include "wbc/flow/hash.hpp"
#include "wbc/metrics/metrics_log.hpp"
#include "wbc/sim/rng.hpp"
#include "wbc/sim/time.hpp"
#include "wbc/wire/message.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace wbc::flow {

enum class Segment : std::uint8_t { syn, syn_ack, data, fin, datagram };

struct Packet {
    FlowKey key;  ///< as seen on the wire, not canonicalized
    Segment segment = Segment::data;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
};

struct DataPlaneConfig {
    wire::InterfaceMode mode = wire::InterfaceMode::spanned_etherchannel;
    HashFields hash_fields = HashFields::src_dst_ip;
    bool seq_randomization = true;
    bool rebalance = false;
    double rebalance_threshold = 1.25;  ///< owned > mean x threshold counts as overloaded
};

/// One unit's knowledge of a flow. A unit may hold several roles at once.
struct LocalEntry {
    std::uint64_t flow_id = 0;
    bool owner = false;
    bool backup = false;
    bool forwarder = false;
    UnitId proprietor{};
    UnitId organizer{};  ///< meaningful on the owner
    wire::UpperLayerConnInfo upper;
    std::uint32_t syn_cookie = 0;
};

/// Cluster-wide view of one flow assembled from the per-unit tables.
struct FlowRecord {
    std::uint64_t id = 0;
    FlowKey key;
    std::optional<UnitId> proprietor;
    std::optional<UnitId> organizer;
    std::set<UnitId> forwarders;
    std::size_t proprietor_count = 0;
    std::size_t organizer_count = 0;
    wire::TcpState tcp_state = wire::TcpState::none;
    std::uint32_t syn_cookie = 0;
    wire::UpperLayerConnInfo upper;
    bool backup_state_fresh = false;
    bool lost = false;
};

struct PacketOutcome {
    bool delivered = false;
    std::optional<UnitId> processed_by;
    std::vector<UnitId> path;  ///< units the packet visited, arrival first
    bool owner_query = false;
    bool created = false;
    bool owner_moved = false;
    bool redirected = false;
    std::uint32_t rewritten_seq = 0;  ///< SYN only: sequence number sent on
};

struct DataPlaneCounters {
    std::uint64_t flows_created = 0;
    std::uint64_t flows_lost = 0;
    std::uint64_t owner_moves = 0;
    std::uint64_t owner_queries = 0;
    std::uint64_t state_updates = 0;
    std::uint64_t replications = 0;
    std::uint64_t packets_dropped = 0;
    std::uint64_t redirects = 0;
    std::uint64_t cookie_rejects = 0;
};

/// Connection ownership across the cluster. Each unit keeps its own flow
/// table; units coordinate only through encoded STATE_UPDATE, OWNER_QUERY,
/// OWNER_REPLY and REPLICATION messages, which are delivered within the
/// packet that triggered them.
class DataPlane {
public:
    using MessageObserver = std::function<void(UnitId from, UnitId to, const wire::Message& msg)>;

    DataPlane(DataPlaneConfig config, sim::Rng& rng, metrics::MetricsLog* log = nullptr);

    /// Replaces the live member set. Departed units lose their tables; flows
    /// whose organizer changed are re-registered; flows with no surviving
    /// proprietor or backup are marked lost.
    void set_members(std::span<const UnitId> members, sim::SimTime now);

    const std::vector<UnitId>& members() const noexcept { return ring_; }
    bool is_member(UnitId unit) const;

    /// `arrival` is the unit the link load balancer handed the packet to.
    PacketOutcome on_packet(UnitId arrival, const Packet& packet, sim::SimTime now);

    std::optional<FlowRecord> record(const FlowKey& key) const;
    std::vector<FlowRecord> records() const;
    const LocalEntry* local(UnitId unit, const FlowKey& key) const;

    /// Flows each member currently owns.
    std::map<UnitId, std::size_t> owned_counts() const;

    const DataPlaneCounters& counters() const noexcept { return counters_; }
    const DataPlaneConfig& config() const noexcept { return config_; }
    void set_observer(MessageObserver observer) { observer_ = std::move(observer); }
    /// Names units in flows.csv rows. Defaults to "u<id>".
    void set_labeler(std::function<std::string(UnitId)> labeler) { labeler_ = std::move(labeler); }

private:
    using Table = std::map<FlowKey, LocalEntry>;

    struct Known {
        std::uint64_t id = 0;
        bool lost = false;
    };

    std::optional<wire::Message> dispatch(UnitId from, UnitId to, const wire::Message& msg, sim::SimTime now);
    std::optional<wire::Message> handle(UnitId at, UnitId from, const wire::Message& msg, sim::SimTime now);

    LocalEntry& create_owned(UnitId unit, const FlowKey& key, wire::TcpState state, sim::SimTime now);
    void take_over(UnitId unit, const FlowKey& key, const wire::UpperLayerConnInfo& upper,
                   std::optional<UnitId> previous_backup, sim::SimTime now);
    void release_backup(UnitId owner, UnitId holder, const FlowKey& key, sim::SimTime now);
    void register_with_organizer(UnitId owner, const FlowKey& key, sim::SimTime now);
    void process_at_owner(UnitId owner, const FlowKey& key, const Packet& packet, sim::SimTime now,
                          PacketOutcome& out);
    std::optional<UnitId> pick_rebalanced(UnitId arrival) const;
    std::vector<std::uint8_t> initial_state(const FlowKey& key, sim::SimTime now) const;
    void flow_row(sim::SimTime at, std::uint64_t id, const char* event, std::optional<UnitId> proprietor,
                  std::optional<UnitId> organizer);
    void drop(PacketOutcome& out);

    DataPlaneConfig config_;
    sim::Rng& rng_;
    metrics::MetricsLog* log_;
    MessageObserver observer_;
    std::function<std::string(UnitId)> labeler_;
    std::vector<UnitId> ring_;
    std::map<UnitId, Table> tables_;
    std::map<FlowKey, Known> known_;
    std::uint64_t next_flow_id_ = 1;
    DataPlaneCounters counters_;
};

}  // namespace wbc::flow
