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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wbc::membership {

using namespace std::chrono_literals;

enum class RejoinCause : std::uint8_t { ccl_fail_at_join, ccl_fail_after_join, data_iface_fail };

const char* to_string(RejoinCause cause) noexcept;

struct RejoinPolicy {
    RejoinCause cause = RejoinCause::ccl_fail_after_join;
    sim::Duration interval = 5min;
    std::optional<int> max_attempts;  ///< nullopt: keep trying forever
    bool configurable = true;

    /// Default policy for a cause. `data_attempts` caps data-interface retries.
    static RejoinPolicy for_cause(RejoinCause cause, sim::Duration interval = 5min, int data_attempts = 4);

    bool automatic() const noexcept { return cause != RejoinCause::ccl_fail_at_join; }

    /// Throws std::invalid_argument if the cause and attempt cap disagree.
    void validate() const;
};

/// Automatic rejoin attempts for one unit. Attempts are spaced `interval`
/// apart, measured from the removal and then from each previous attempt.
class RejoinScheduler {
public:
    /// Replaces any pending schedule.
    void start(const RejoinPolicy& policy, sim::SimTime removed_at);

    std::optional<sim::SimTime> next_attempt() const noexcept { return next_; }

    /// Marks the pending attempt as running. Returns its 1-based number.
    int fire(sim::SimTime now);

    /// The running attempt failed: schedule the next one or halt.
    void failed();

    /// The running attempt succeeded, or a manual rejoin took over.
    void cancel() noexcept { next_.reset(); }

    int attempts() const noexcept { return attempts_; }
    bool exhausted() const noexcept { return exhausted_; }
    std::optional<RejoinCause> cause() const noexcept { return cause_; }

private:
    RejoinPolicy policy_;
    std::optional<RejoinCause> cause_;
    std::optional<sim::SimTime> next_;
    sim::SimTime last_attempt_;
    int attempts_ = 0;
    bool exhausted_ = false;
};

/// Bootstrap configuration. Only `replicable()` is mirrored to secondaries.
struct ClusterConfig {
    std::string name = "cluster";
    wire::InterfaceMode mode = wire::InterfaceMode::spanned_etherchannel;
    std::string ccl_interface = "ccl0";
    std::vector<std::string> mgmt_interfaces{"mgmt0"};
    std::vector<std::string> data_interfaces{"eth1"};
    std::vector<Ipv4> ip_pool;
    Ipv4 main_cluster_ip{10, 0, 0, 1};
    std::vector<wire::InterfaceRole> interface_roles;
    std::uint32_t version = 1;

    /// Throws std::invalid_argument when the CCL interface doubles as a data
    /// or management interface, or the main IP is multicast.
    void validate() const;

    wire::ConfigInfo replicable() const;

    /// Sets or replaces the role of one interface and bumps the version.
    void set_interface_role(const std::string& iface, const std::string& role);
};

/// FNV-1a over version, cluster name and the interface role mapping.
std::uint64_t config_hash(const wire::ConfigInfo& config);

/// Holds the main cluster IP. At most one unit binds it at a time.
class MainIpRegistry {
public:
    explicit MainIpRegistry(Ipv4 address) : address_(address) {}

    /// Binds the address to `new_primary`. Returns true if the owner changed.
    bool transfer(UnitId new_primary);

    /// Drops the binding if `unit` holds it.
    void release(UnitId unit);

    std::optional<UnitId> owner() const noexcept { return owner_; }
    Ipv4 address() const noexcept { return address_; }
    std::uint64_t transfers() const noexcept { return transfers_; }

private:
    Ipv4 address_;
    std::optional<UnitId> owner_;
    std::uint64_t transfers_ = 0;
};

/// Local management address for the unit at `ordinal` (0-based). Throws
/// std::out_of_range when the pool is too small.
Ipv4 pool_address(std::span<const Ipv4> pool, std::size_t ordinal);

/// Outcome of a recovered ex-primary failing to rejoin.
struct DisabledUnit {
    bool data_interfaces_down = true;
    bool mgmt_up = true;
    Ipv4 mgmt_address;
};

/// Throws std::logic_error unless the unit was a primary before it failed.
DisabledUnit on_primary_rejoin_failure(bool was_primary, const ClusterConfig& config, std::size_t ordinal);

}  // namespace wbc::membership
