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

#include "wbc/election/elector.hpp"

#include <algorithm>

namespace wbc::election {

namespace {

int compare_keys(const wire::SelectionInfo& a, const wire::SelectionInfo& b)
{
    if (a.priority != b.priority) {
        return a.priority < b.priority ? -1 : 1;
    }
    // std::string and the raw serial compare as unsigned bytes via char_traits.
    if (int c = a.name.compare(b.name); c != 0) {
        return c < 0 ? -1 : 1;
    }
    if (int c = a.serial.view().compare(b.serial.view()); c != 0) {
        return c < 0 ? -1 : 1;
    }
    return 0;
}

}  // namespace

const char* to_string(Role role) noexcept
{
    switch (role) {
    case Role::unjoined:
        return "unjoined";
    case Role::primary:
        return "primary";
    case Role::primary2:
        return "primary-2";
    case Role::secondary:
        return "secondary";
    case Role::disabled:
        return "disabled";
    }
    return "?";
}

bool outranks(const wire::SelectionInfo& a, const wire::SelectionInfo& b)
{
    const int c = compare_keys(a, b);
    if (c == 0) {
        throw DuplicateIdentity("duplicate unit identity: priority " + std::to_string(a.priority) + ", name '" +
                                a.name + "', serial '" + a.serial.trimmed() + "'");
    }
    return c < 0;
}

const wire::SelectionInfo& compare_units(const wire::SelectionInfo& a, const wire::SelectionInfo& b)
{
    return outranks(a, b) ? a : b;
}

std::vector<Member> ranked(std::span<const Member> members)
{
    std::vector<Member> out(members.begin(), members.end());
    std::sort(out.begin(), out.end(), [](const Member& a, const Member& b) { return outranks(a.info, b.info); });
    return out;
}

std::optional<UnitId> recompute_primary2(std::span<const Member> members)
{
    if (members.size() < 2) {
        return std::nullopt;
    }
    return ranked(members)[1].id;
}

std::optional<UnitId> elect_successor(std::span<const Member> survivors)
{
    if (survivors.empty()) {
        return std::nullopt;
    }
    const Member* best = &survivors.front();
    for (const auto& m : survivors.subspan(1)) {
        if (outranks(m.info, best->info)) {
            best = &m;
        }
    }
    return best->id;
}

Elector::Elector(UnitId self, wire::SelectionInfo identity, ElectionConfig config)
    : self_(self), identity_(std::move(identity)), config_(config)
{
}

wire::SelectionInfo Elector::identity() const
{
    wire::SelectionInfo info = identity_;
    switch (role_) {
    case Role::primary:
        info.role = wire::WireRole::primary;
        break;
    case Role::primary2:
        info.role = wire::WireRole::primary_standby;
        break;
    default:
        info.role = wire::WireRole::secondary;
        break;
    }
    return info;
}

Effects Elector::on_join(JoinMode mode)
{
    Effects fx;
    mode_ = mode;
    role_ = Role::unjoined;
    primary_.reset();
    primary_info_.reset();
    awaiting_ = true;
    requests_sent_ = 1;
    fx.sends.push_back(Send{sim::kElectionGroup, request()});
    fx.response_timer = TimerAction::arm;
    fx.timer_delay = config_.response_timeout;
    return fx;
}

Effects Elector::on_response_timeout()
{
    Effects fx;
    if (!awaiting_) {
        return fx;
    }
    if (requests_sent_ <= config_.retries) {
        ++requests_sent_;
        fx.sends.push_back(Send{sim::kElectionGroup, request()});
        fx.response_timer = TimerAction::arm;
        fx.timer_delay = config_.response_timeout;
        return fx;
    }
    awaiting_ = false;
    if (mode_ == JoinMode::rejoin) {
        fx.outcome = JoinOutcome::failed_no_response;
        return fx;
    }
    fx.outcome = JoinOutcome::joined_primary;
    return become_primary(std::move(fx));
}

std::optional<Send> Elector::on_election_request(UnitId from, const wire::SelectionInfo&) const
{
    if (role_ != Role::primary || from == self_) {
        return std::nullopt;
    }
    return Send{from, wire::ElectionResponse{identity()}};
}

Effects Elector::on_election_response(UnitId from, const wire::SelectionInfo& response)
{
    Effects fx;
    if (from == self_ || role_ == Role::disabled || role_ == Role::primary) {
        return fx;
    }
    if (awaiting_) {
        awaiting_ = false;
        fx.response_timer = TimerAction::cancel;
        if (outranks(identity_, response)) {
            fx.outcome = JoinOutcome::joined_primary;
            return become_primary(std::move(fx));
        }
        role_ = Role::secondary;
        adopt(from, response);
        fx.outcome = JoinOutcome::joined_secondary;
        return fx;
    }
    if (!joined()) {
        return fx;
    }
    // A re-registration answer. A member that outranks the answering primary
    // takes over, exactly as a joiner would.
    if (outranks(identity_, response)) {
        return become_primary(std::move(fx));
    }
    adopt(from, response);
    return fx;
}

Effects Elector::on_force_secondary(UnitId from, const wire::SelectionInfo& sender)
{
    Effects fx;
    if (from == self_ || role_ == Role::disabled) {
        return fx;
    }
    if (role_ == Role::primary) {
        return on_competing_primary(from, sender);
    }
    if (awaiting_) {
        if (outranks(sender, identity_)) {
            awaiting_ = false;
            fx.response_timer = TimerAction::cancel;
            role_ = Role::secondary;
            adopt(from, sender);
            fx.outcome = JoinOutcome::joined_secondary;
            // Earlier requests went unanswered: register.
            fx.sends.push_back(Send{sim::kElectionGroup, request()});
        } else {
            // Lower-ranked unit took over: ask it.
            requests_sent_ = 1;
            fx.sends.push_back(Send{sim::kElectionGroup, request()});
            fx.response_timer = TimerAction::arm;
            fx.timer_delay = config_.response_timeout;
        }
        return fx;
    }
    if (!joined()) {
        return fx;
    }
    const bool changed = primary_ != from;
    if (changed && primary_ && primary_info_ && outranks(*primary_info_, sender)) {
        // Our primary outranks the sender; it will reassert itself.
        return fx;
    }
    if (role_ == Role::primary2 && changed) {
        role_ = Role::secondary;
    }
    adopt(from, sender);
    if (changed) {
        // Register with the new primary so it admits us.
        fx.sends.push_back(Send{sim::kElectionGroup, request()});
    }
    return fx;
}

Effects Elector::on_competing_primary(UnitId from, const wire::SelectionInfo& other)
{
    Effects fx;
    if (role_ != Role::primary || from == self_) {
        return fx;
    }
    if (outranks(other, identity_)) {
        role_ = Role::secondary;
        adopt(from, other);
        fx.stepped_down = true;
        fx.sends.push_back(Send{sim::kElectionGroup, request()});
        return fx;
    }
    fx.sends.push_back(Send{sim::kForceSecondaryGroup, wire::ForceSecondary{identity()}});
    return fx;
}

Effects Elector::on_primary_loss(std::span<const Member> survivors)
{
    Effects fx;
    if (role_ != Role::secondary && role_ != Role::primary2) {
        return fx;
    }
    std::vector<Member> everyone(survivors.begin(), survivors.end());
    everyone.push_back(Member{self_, identity_});
    fx.successor = elect_successor(everyone);
    primary_.reset();
    primary_info_.reset();
    if (fx.successor == self_) {
        return become_primary(std::move(fx));
    }
    return fx;
}

void Elector::leave(Role next)
{
    role_ = next;
    primary_.reset();
    primary_info_.reset();
    awaiting_ = false;
    requests_sent_ = 0;
}

void Elector::set_primary2(bool standby)
{
    if (role_ == Role::secondary && standby) {
        role_ = Role::primary2;
    } else if (role_ == Role::primary2 && !standby) {
        role_ = Role::secondary;
    }
}

void Elector::adopt(UnitId primary, const wire::SelectionInfo& info)
{
    primary_ = primary;
    primary_info_ = info;
}

Effects Elector::become_primary(Effects fx)
{
    role_ = Role::primary;
    primary_ = self_;
    primary_info_ = identity_;
    awaiting_ = false;
    fx.became_primary = true;
    fx.sends.push_back(Send{sim::kForceSecondaryGroup, wire::ForceSecondary{identity()}});
    return fx;
}

}  // namespace wbc::election
