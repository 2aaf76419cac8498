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

#include "wbc/membership/membership.hpp"

#include <algorithm>
#include <stdexcept>

namespace wbc::membership {

const char* to_string(RejoinCause cause) noexcept
{
    switch (cause) {
    case RejoinCause::ccl_fail_at_join:
        return "ccl-fail-at-join";
    case RejoinCause::ccl_fail_after_join:
        return "ccl-fail-after-join";
    case RejoinCause::data_iface_fail:
        return "data-iface-fail";
    }
    return "?";
}

RejoinPolicy RejoinPolicy::for_cause(RejoinCause cause, sim::Duration interval, int data_attempts)
{
    RejoinPolicy p;
    p.cause = cause;
    p.interval = interval;
    switch (cause) {
    case RejoinCause::ccl_fail_at_join:
        p.max_attempts = 0;
        break;
    case RejoinCause::ccl_fail_after_join:
        break;
    case RejoinCause::data_iface_fail:
        p.max_attempts = data_attempts;
        break;
    }
    return p;
}

void RejoinPolicy::validate() const
{
    if (interval.count() <= 0) {
        throw std::invalid_argument("rejoin interval must be positive");
    }
    switch (cause) {
    case RejoinCause::ccl_fail_at_join:
        if (max_attempts.value_or(1) != 0) {
            throw std::invalid_argument("ccl-fail-at-join allows no automatic attempts");
        }
        break;
    case RejoinCause::ccl_fail_after_join:
        if (max_attempts) {
            throw std::invalid_argument("ccl-fail-after-join retries indefinitely");
        }
        break;
    case RejoinCause::data_iface_fail:
        if (!max_attempts || *max_attempts < 1) {
            throw std::invalid_argument("data-iface-fail needs a positive attempt cap");
        }
        break;
    }
}

void RejoinScheduler::start(const RejoinPolicy& policy, sim::SimTime removed_at)
{
    policy.validate();
    policy_ = policy;
    cause_ = policy.cause;
    attempts_ = 0;
    exhausted_ = false;
    last_attempt_ = removed_at;
    next_.reset();
    if (policy.automatic() && policy.max_attempts.value_or(1) > 0) {
        next_ = removed_at + policy.interval;
    } else {
        exhausted_ = true;
    }
}

int RejoinScheduler::fire(sim::SimTime now)
{
    if (!next_) {
        throw InvariantViolation("rejoin attempt fired with nothing scheduled");
    }
    next_.reset();
    last_attempt_ = now;
    return ++attempts_;
}

void RejoinScheduler::failed()
{
    if (policy_.max_attempts && attempts_ >= *policy_.max_attempts) {
        exhausted_ = true;
        next_.reset();
        return;
    }
    next_ = last_attempt_ + policy_.interval;
}

void ClusterConfig::validate() const
{
    if (name.empty()) {
        throw std::invalid_argument("cluster name must not be empty");
    }
    if (ccl_interface.empty()) {
        throw std::invalid_argument("ccl_interface must be set");
    }
    auto clashes = [&](const std::vector<std::string>& list) {
        return std::find(list.begin(), list.end(), ccl_interface) != list.end();
    };
    if (clashes(data_interfaces)) {
        throw std::invalid_argument("ccl_interface '" + ccl_interface + "' must not be a data interface");
    }
    if (clashes(mgmt_interfaces)) {
        throw std::invalid_argument("ccl_interface '" + ccl_interface + "' must not be a management interface");
    }
    if (main_cluster_ip.is_multicast()) {
        throw std::invalid_argument("main_cluster_ip must be a unicast address");
    }
}

wire::ConfigInfo ClusterConfig::replicable() const
{
    return wire::ConfigInfo{version, name, interface_roles};
}

void ClusterConfig::set_interface_role(const std::string& iface, const std::string& role)
{
    auto it = std::find_if(interface_roles.begin(), interface_roles.end(),
                           [&](const wire::InterfaceRole& r) { return r.interface_name == iface; });
    if (it == interface_roles.end()) {
        interface_roles.push_back(wire::InterfaceRole{iface, role});
    } else {
        it->role = role;
    }
    ++version;
}

std::uint64_t config_hash(const wire::ConfigInfo& config)
{
    constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    constexpr std::uint64_t kPrime = 0x100000001b3ULL;
    std::uint64_t h = kOffset;
    auto mix = [&](std::uint8_t b) {
        h ^= b;
        h *= kPrime;
    };
    auto mix_str = [&](const std::string& s) {
        mix(static_cast<std::uint8_t>(s.size()));
        for (char c : s) {
            mix(static_cast<std::uint8_t>(c));
        }
    };
    for (int shift = 24; shift >= 0; shift -= 8) {
        mix(static_cast<std::uint8_t>(config.version >> shift));
    }
    mix_str(config.cluster_name);
    for (const auto& r : config.interface_roles) {
        mix_str(r.interface_name);
        mix_str(r.role);
    }
    return h;
}

bool MainIpRegistry::transfer(UnitId new_primary)
{
    if (owner_ == new_primary) {
        return false;
    }
    owner_ = new_primary;
    ++transfers_;
    return true;
}

void MainIpRegistry::release(UnitId unit)
{
    if (owner_ == unit) {
        owner_.reset();
    }
}

Ipv4 pool_address(std::span<const Ipv4> pool, std::size_t ordinal)
{
    if (ordinal >= pool.size()) {
        throw std::out_of_range("ip_pool has " + std::to_string(pool.size()) + " addresses, unit ordinal " +
                                std::to_string(ordinal) + " needs more");
    }
    return pool[ordinal];
}

DisabledUnit on_primary_rejoin_failure(bool was_primary, const ClusterConfig& config, std::size_t ordinal)
{
    if (!was_primary) {
        throw std::logic_error("only a former primary can be disabled after a failed rejoin");
    }
    DisabledUnit d;
    d.mgmt_address = pool_address(config.ip_pool, ordinal);
    return d;
}

}  // namespace wbc::membership
