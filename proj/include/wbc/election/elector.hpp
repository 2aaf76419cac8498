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
#include "wbc/sim/network.hpp"
#include "wbc/sim/time.hpp"
#include "wbc/wire/message.hpp"

#include <chrono>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace wbc::election {

using namespace std::chrono_literals;

enum class Role : std::uint8_t { unjoined, primary, primary2, secondary, disabled };

const char* to_string(Role role) noexcept;

/// Two units presented the same (priority, name, serial).
class DuplicateIdentity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Member {
    UnitId id{};
    wire::SelectionInfo info;
};

/// Ranking: lower priority number first, then bytewise-smaller name, then
/// bytewise-smaller serial. Role is not part of the key.
bool outranks(const wire::SelectionInfo& a, const wire::SelectionInfo& b);

/// Returns the winner of a and b. Throws DuplicateIdentity on a full tie.
const wire::SelectionInfo& compare_units(const wire::SelectionInfo& a, const wire::SelectionInfo& b);

/// Members sorted best-first.
std::vector<Member> ranked(std::span<const Member> members);

/// Second-ranked member, or nullopt with fewer than two members.
std::optional<UnitId> recompute_primary2(std::span<const Member> members);

/// Rank-1 member, or nullopt when nobody is left.
std::optional<UnitId> elect_successor(std::span<const Member> survivors);

struct ElectionConfig {
    sim::Duration response_timeout = 3s;
    int retries = 2;
};

enum class JoinMode : std::uint8_t {
    bootstrap,  ///< may declare itself primary when nobody answers
    rejoin,     ///< silence means the attempt failed
};

enum class JoinOutcome : std::uint8_t { joined_primary, joined_secondary, failed_no_response };

struct Send {
    sim::Destination to;
    wire::Message msg;
};

enum class TimerAction : std::uint8_t { none, arm, cancel };

/// What the caller must do after feeding the elector an input.
struct Effects {
    std::vector<Send> sends;
    TimerAction response_timer = TimerAction::none;
    sim::Duration timer_delay{0};
    std::optional<JoinOutcome> outcome;
    bool became_primary = false;
    bool stepped_down = false;
    std::optional<UnitId> successor;
};

/// Per-unit primary selection state machine. Pure: it never touches the
/// network or the clock, it only returns Effects.
class Elector {
public:
    Elector(UnitId self, wire::SelectionInfo identity, ElectionConfig config = {});

    /// Multicasts ELECTION_REQUEST and arms the response timer.
    Effects on_join(JoinMode mode);
    Effects on_response_timeout();

    /// Only the current primary answers.
    std::optional<Send> on_election_request(UnitId from, const wire::SelectionInfo& request) const;
    Effects on_election_response(UnitId from, const wire::SelectionInfo& response);
    /// Also used for keepalives that announce a primary other than ours. A
    /// joined member ignores a sender its current primary outranks.
    Effects on_force_secondary(UnitId from, const wire::SelectionInfo& sender);

    /// Another unit claims to be primary (e.g. in its keepalive).
    Effects on_competing_primary(UnitId from, const wire::SelectionInfo& other);

    /// `survivors` are the live peers, excluding this unit and the lost primary.
    Effects on_primary_loss(std::span<const Member> survivors);

    void leave(Role next = Role::unjoined);
    void set_primary2(bool standby);

    Role role() const noexcept { return role_; }
    bool joined() const noexcept { return role_ == Role::primary || role_ == Role::primary2 || role_ == Role::secondary; }
    bool awaiting_response() const noexcept { return awaiting_; }
    std::optional<UnitId> primary() const noexcept { return primary_; }
    UnitId self() const noexcept { return self_; }

    /// Selection info with the role field reflecting the current role.
    wire::SelectionInfo identity() const;

private:
    Effects become_primary(Effects fx);
    void adopt(UnitId primary, const wire::SelectionInfo& info);
    wire::Message request() const { return wire::ElectionRequest{identity()}; }

    UnitId self_;
    wire::SelectionInfo identity_;
    ElectionConfig config_;
    Role role_ = Role::unjoined;
    std::optional<UnitId> primary_;
    std::optional<wire::SelectionInfo> primary_info_;
    bool awaiting_ = false;
    int requests_sent_ = 0;
    JoinMode mode_ = JoinMode::bootstrap;
};

}  // namespace wbc::election
