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

#include "wbc/cluster/unit_agent.hpp"

#include "wbc/wire/codec.hpp"

#include <algorithm>

namespace wbc::cluster {

namespace {

std::optional<membership::RejoinCause> cause_for(wire::LeaveReason reason)
{
    switch (reason) {
    case wire::LeaveReason::keepalive_miss:
        return membership::RejoinCause::ccl_fail_after_join;
    case wire::LeaveReason::iface_9s:
    case wire::LeaveReason::iface_500ms:
    case wire::LeaveReason::all_ifaces:
        return membership::RejoinCause::data_iface_fail;
    case wire::LeaveReason::mode_mismatch:
    case wire::LeaveReason::administrative:
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

UnitAgent::UnitAgent(Simulation& sim, UnitId id, UnitSpec spec)
    : sim_(sim), id_(id), spec_(std::move(spec)), elector_(id, spec_.identity, sim.config().election),
      prober_(sim.config().health)
{
    for (const auto& is : sim.config().data_interfaces) {
        health::InterfaceState st;
        st.id = is.id;
        st.kind = is.kind;
        st.monitored = std::find(spec_.unmonitored.begin(), spec_.unmonitored.end(), is.id) == spec_.unmonitored.end();
        interfaces_.push_back(std::move(st));
    }
    config_ = sim.cluster_config().replicable();
    last_state_ = state();
}

std::string UnitAgent::state() const
{
    return powered_ ? election::to_string(elector_.role()) : "down";
}

wire::InterfaceMode UnitAgent::mode() const noexcept
{
    return spec_.mode.value_or(sim_.cluster_config().mode);
}

bool UnitAgent::data_link_up() const
{
    if (!powered_ || data_admin_down_) {
        return false;
    }
    return std::any_of(interfaces_.begin(), interfaces_.end(), [](const auto& i) { return i.up; });
}

std::vector<UnitId> UnitAgent::view() const
{
    std::vector<UnitId> out;
    for (const auto& [id, peer] : peers_) {
        out.push_back(id);
    }
    return out;
}

// Timers -------------------------------------------------------------------

void UnitAgent::after(sim::Duration delay, Timer fn)
{
    at_time(sim_.engine().now() + delay, std::move(fn));
}

void UnitAgent::at_time(sim::SimTime when, Timer fn)
{
    const std::uint64_t session = session_;
    sim_.engine().schedule(std::max(when, sim_.engine().now()), sim::EventKind::timer_expiry,
                           [this, session, fn = std::move(fn)] {
                               if (session == session_ && powered_) {
                                   fn();
                               }
                           });
}

void UnitAgent::after_power(sim::Duration delay, Timer fn)
{
    const std::uint64_t epoch = power_epoch_;
    sim_.engine().schedule_after(delay, sim::EventKind::timer_expiry, [this, epoch, fn = std::move(fn)] {
        if (epoch == power_epoch_ && powered_) {
            fn();
        }
    });
}

// Lifecycle ----------------------------------------------------------------

void UnitAgent::power_on()
{
    if (powered_) {
        return;
    }
    powered_ = true;
    sim_.network().set_up(id_, true);
    sim_.refresh_isolation(id_);
    sync_state("power-on");
}

void UnitAgent::power_off()
{
    if (!powered_) {
        return;
    }
    was_primary_ = elector_.role() == election::Role::primary;
    if (was_primary_) {
        sim_.release_main_ip(id_);
    }
    ++session_;
    ++power_epoch_;
    elector_.leave(election::Role::unjoined);
    peers_.clear();
    iface_timers_.clear();
    join_timer_.reset();
    prober_.reset();
    rejoin_.cancel();
    powered_ = false;
    sim_.network().set_up(id_, false);
    sync_state("power-off");
    sim_.membership_changed();
}

void UnitAgent::join()
{
    power_on();
    if (elector_.joined() || elector_.awaiting_response()) {
        return;
    }
    if (!ccl_up_) {
        rejoin_.start(membership::RejoinPolicy::for_cause(membership::RejoinCause::ccl_fail_at_join,
                                                          sim_.config().rejoin_interval),
                      sim_.engine().now());
        sim_.log().add(metrics::MembershipRow{sim_.engine().now(), spec_.label, state(), state(), "ccl-fail-at-join"});
        return;
    }
    rejoin_.cancel();
    start_join(election::JoinMode::bootstrap, JoinReason::bootstrap);
}

void UnitAgent::recover()
{
    power_on();
    if (!ever_joined_ || elector_.joined() || elector_.awaiting_response()) {
        return;
    }
    join_reason_ = JoinReason::recovery;
    if (!ccl_up_) {
        on_join_failed();
        return;
    }
    start_join(election::JoinMode::rejoin, JoinReason::recovery);
}

void UnitAgent::manual_rejoin()
{
    power_on();
    rejoin_.cancel();
    if (elector_.joined() || elector_.awaiting_response()) {
        return;
    }
    if (elector_.role() == election::Role::disabled) {
        elector_.leave(election::Role::unjoined);
        sync_state("manual-rejoin");
    }
    data_admin_down_ = false;
    if (!ccl_up_) {
        join();
        return;
    }
    start_join(election::JoinMode::bootstrap, JoinReason::manual);
}

void UnitAgent::start_join(election::JoinMode mode, JoinReason reason)
{
    ++session_;
    join_reason_ = reason;
    apply(elector_.on_join(mode), "join");
}

void UnitAgent::apply(const election::Effects& fx, const std::string& reason)
{
    for (const auto& s : fx.sends) {
        send(s.to, s.msg);
    }
    if (fx.response_timer == election::TimerAction::arm) {
        if (join_timer_) {
            sim_.engine().cancel(*join_timer_);
        }
        const std::uint64_t session = session_;
        join_timer_ = sim_.engine().schedule_after(fx.timer_delay, sim::EventKind::timer_expiry, [this, session] {
            if (session != session_ || !powered_) {
                return;
            }
            join_timer_.reset();
            apply(elector_.on_response_timeout(), "no-primary-answered");
        });
    } else if (fx.response_timer == election::TimerAction::cancel && join_timer_) {
        sim_.engine().cancel(*join_timer_);
        join_timer_.reset();
    }
    if (fx.stepped_down) {
        sim_.release_main_ip(id_);
        for (const auto& [key, ev] : iface_timers_) {
            sim_.engine().cancel(ev);
        }
        iface_timers_.clear();
        prober_.reset();
    }
    if (fx.outcome) {
        switch (*fx.outcome) {
        case election::JoinOutcome::joined_primary:
        case election::JoinOutcome::joined_secondary:
            on_joined(reason);
            break;
        case election::JoinOutcome::failed_no_response:
            on_join_failed();
            break;
        }
    }
    if (fx.became_primary) {
        take_primary_duties();
    }
    update_standby(false);
    sync_state(reason);
    sim_.membership_changed();
}

void UnitAgent::on_joined(const std::string&)
{
    ever_joined_ = true;
    joined_at_ = sim_.engine().now();
    rejoin_.cancel();
    data_admin_down_ = false;
    const auto& pool = sim_.cluster_config().ip_pool;
    if (sim_.ordinal(id_) < pool.size()) {
        mgmt_address_ = membership::pool_address(pool, sim_.ordinal(id_));
    }
    if (pending_config_ && elector_.primary() == pending_config_->first) {
        config_ = pending_config_->second;
        sim_.log().count("config.applied");
    }
    pending_config_.reset();
    const std::uint64_t session = session_;
    keepalive_tick(session);
    // Give the peer view one keepalive round to fill before ranking the standby.
    after(sim_.config().health.keepalive_interval * 2, [this] { update_standby(); });
    after(sim_.config().health.rtt_probe_interval, [this, session] { probe_tick(session); });
}

void UnitAgent::on_join_failed()
{
    const auto now = sim_.engine().now();
    switch (join_reason_) {
    case JoinReason::rejoin_attempt:
        rejoin_.failed();
        sim_.log().add(metrics::MembershipRow{now, spec_.label, state(), state(), "rejoin-failed"});
        schedule_rejoin();
        break;
    case JoinReason::recovery:
        if (was_primary_) {
            membership::DisabledUnit d;
            try {
                d = membership::on_primary_rejoin_failure(true, sim_.cluster_config(), sim_.ordinal(id_));
                mgmt_address_ = d.mgmt_address;
            } catch (const std::out_of_range&) {
                mgmt_address_.reset();
                sim_.log().count("mgmt.pool_exhausted");
            }
            ++session_;
            elector_.leave(election::Role::disabled);
            data_admin_down_ = true;
            sync_state("primary-rejoin-failed");
            sim_.membership_changed();
        } else {
            rejoin_.start(membership::RejoinPolicy::for_cause(membership::RejoinCause::ccl_fail_at_join,
                                                              sim_.config().rejoin_interval),
                          now);
            sim_.log().add(metrics::MembershipRow{now, spec_.label, state(), state(), "ccl-fail-at-join"});
        }
        break;
    case JoinReason::bootstrap:
    case JoinReason::manual:
        break;
    }
}

void UnitAgent::take_primary_duties()
{
    sim_.bind_main_ip(id_);
    prober_.reset();
    for (const auto& [peer, info] : peers_) {
        send(peer, wire::ConfigSync{config_});
    }
}

void UnitAgent::leave(std::optional<membership::RejoinCause> cause, const std::string& reason)
{
    if (elector_.role() == election::Role::primary) {
        sim_.release_main_ip(id_);
    }
    ++session_;
    elector_.leave(election::Role::unjoined);
    peers_.clear();
    iface_timers_.clear();
    join_timer_.reset();
    prober_.reset();
    sync_state(reason);
    sim_.membership_changed();
    if (cause) {
        rejoin_.start(membership::RejoinPolicy::for_cause(*cause, sim_.config().rejoin_interval,
                                                          sim_.config().data_rejoin_attempts),
                      sim_.engine().now());
        schedule_rejoin();
    }
}

void UnitAgent::schedule_rejoin()
{
    if (auto next = rejoin_.next_attempt()) {
        after_power(*next - sim_.engine().now(), [this] { rejoin_attempt(); });
    } else if (rejoin_.exhausted() && rejoin_.attempts() > 0) {
        sim_.log().add(
            metrics::MembershipRow{sim_.engine().now(), spec_.label, state(), state(), "rejoin-attempts-exhausted"});
    }
}

void UnitAgent::rejoin_attempt()
{
    const auto now = sim_.engine().now();
    auto next = rejoin_.next_attempt();
    if (!next || *next != now || elector_.joined() || elector_.awaiting_response()) {
        return;
    }
    const int n = rejoin_.fire(now);
    const auto cause = *rejoin_.cause();
    row("rejoin_attempt", std::nullopt, membership::to_string(cause), n);
    sim_.log().count("rejoin.attempts");
    bool blocked = !ccl_up_;
    if (cause == membership::RejoinCause::data_iface_fail) {
        blocked = blocked || std::any_of(interfaces_.begin(), interfaces_.end(),
                                         [](const auto& i) { return i.monitored && !i.up; });
    }
    if (blocked) {
        join_reason_ = JoinReason::rejoin_attempt;
        on_join_failed();
        return;
    }
    start_join(election::JoinMode::rejoin, JoinReason::rejoin_attempt);
}

// Periodic traffic ---------------------------------------------------------

void UnitAgent::send(const sim::Destination& to, const wire::Message& msg)
{
    sim_.send(id_, to, msg);
}

void UnitAgent::keepalive_tick(std::uint64_t session)
{
    if (session != session_ || !joined()) {
        return;
    }
    const auto radio = health::make_radio_info(mode(), spec_.radio_type, spec_.radio.snr_db, spec_.weight);
    send(sim::kKeepaliveGroup, health::emit_keepalive(elector_.identity(), radio));
    after(sim_.config().health.keepalive_interval, [this, session] { keepalive_tick(session); });
}

void UnitAgent::probe_tick(std::uint64_t session)
{
    if (session != session_ || !joined()) {
        return;
    }
    const auto& health = sim_.config().health;
    const auto primary = elector_.primary();
    if (elector_.role() != election::Role::primary && primary && *primary != id_) {
        const auto ping = prober_.next_probe(sim_.engine().now());
        send(*primary, ping);
        const std::uint32_t seq = ping.probe.sequence;
        after(health.rtt_probe_interval, [this, seq, primary] {
            if (!prober_.on_probe_deadline(seq)) {
                return;
            }
            row("ccl_failure", primary, "probe-timeout");
            leave(membership::RejoinCause::ccl_fail_after_join, "ccl-fail-after-join");
        });
    }
    after(health.rtt_probe_interval, [this, session] { probe_tick(session); });
}

// Messages -----------------------------------------------------------------

void UnitAgent::on_message(UnitId from, std::span<const std::uint8_t> bytes)
{
    if (!powered_) {
        return;
    }
    auto decoded = wire::decode(bytes);
    if (!wire::ok(decoded)) {
        sim_.log().count("net.undecodable");
        return;
    }
    handle(from, std::get<wire::Decoded>(decoded).message);
}

void UnitAgent::handle(UnitId from, const wire::Message& msg)
{
    if (elector_.role() == election::Role::disabled) {
        return;
    }
    if (const auto* ka = std::get_if<wire::Keepalive>(&msg)) {
        on_keepalive(from, *ka);
    } else if (const auto* req = std::get_if<wire::ElectionRequest>(&msg)) {
        on_request(from, *req);
    } else if (const auto* resp = std::get_if<wire::ElectionResponse>(&msg)) {
        const bool awaiting = elector_.awaiting_response();
        auto fx = elector_.on_election_response(from, resp->selection);
        const char* reason = fx.became_primary ? "preempted" : (awaiting ? "joined" : "re-registered");
        if (elector_.joined() && elector_.primary() == from) {
            refresh(from, resp->selection);
        }
        apply(fx, reason);
    } else if (const auto* fs = std::get_if<wire::ForceSecondary>(&msg)) {
        auto fx = elector_.on_force_secondary(from, fs->selection);
        if (elector_.joined() && elector_.primary() == from) {
            refresh(from, fs->selection);
        }
        apply(fx, fx.stepped_down ? "stepped-down" : "force-secondary");
    } else if (const auto* fl = std::get_if<wire::ForcedLeave>(&msg)) {
        on_forced_leave(from, *fl);
    } else if (const auto* ping = std::get_if<wire::CclPing>(&msg)) {
        if (elector_.role() == election::Role::primary) {
            send(from, wire::CclPong{ping->probe});
        }
    } else if (const auto* pong = std::get_if<wire::CclPong>(&msg)) {
        on_pong(from, *pong);
    } else if (const auto* cs = std::get_if<wire::ConfigSync>(&msg)) {
        if (elector_.joined() && elector_.primary() == from) {
            config_ = cs->config;
            sim_.log().count("config.applied");
        } else if (elector_.awaiting_response()) {
            // Can overtake the election response.
            pending_config_ = std::make_pair(from, cs->config);
        }
    } else {
        sim_.log().count("net.unexpected");
    }
}

void UnitAgent::on_keepalive(UnitId from, const wire::Keepalive& ka)
{
    if (!joined() || from == id_) {
        return;
    }
    const auto& sel = ka.selection;
    if (elector_.role() == election::Role::primary) {
        if (sel.role == wire::WireRole::primary) {
            auto fx = elector_.on_competing_primary(from, sel);
            if (fx.stepped_down) {
                refresh(from, sel);
            }
            apply(fx, "stepped-down");
            return;
        }
        switch (health::assess_keepalive(peers_.count(from) != 0, sim_.cluster_config().mode, ka)) {
        case health::KeepaliveVerdict::unknown_sender:
            sim_.log().count("keepalive.unknown_sender");
            return;
        case health::KeepaliveVerdict::mode_mismatch:
            remove_member(from, health::RemovalReason::mode_mismatch);
            return;
        case health::KeepaliveVerdict::refreshed:
            refresh(from, sel);
            return;
        }
        return;
    }
    refresh(from, sel);
    if (sel.role == wire::WireRole::primary && elector_.primary() != from) {
        apply(elector_.on_force_secondary(from, sel), "primary-announced");
        return;
    }
    update_standby();
}

void UnitAgent::on_request(UnitId from, const wire::ElectionRequest& req)
{
    if (elector_.role() != election::Role::primary || from == id_) {
        return;
    }
    if (auto reply = elector_.on_election_request(from, req.selection)) {
        send(reply->to, reply->msg);
    }
    admit(from, req.selection);
}

void UnitAgent::on_forced_leave(UnitId from, const wire::ForcedLeave& fl)
{
    if (!joined()) {
        return;
    }
    if (elector_.primary() != from) {
        sim_.log().count("forced_leave.ignored");
        return;
    }
    leave(cause_for(fl.reason), wire::to_string(fl.reason));
}

void UnitAgent::on_pong(UnitId from, const wire::CclPong& pong)
{
    if (!joined() || elector_.primary() != from) {
        return;
    }
    auto sample = prober_.on_pong(pong.probe, sim_.engine().now());
    if (!sample) {
        return;
    }
    metrics::MetricRow r;
    r.at = sim_.engine().now();
    r.record = "rtt";
    r.unit = spec_.label;
    r.peer = sim_.label(from);
    r.value = static_cast<double>(sample->rtt.count()) / 1000.0;
    r.rtt_us = sample->rtt.count();
    sim_.log().add(r);
    if (sample->degraded) {
        r.record = "ccl_degraded";
        r.detail = "rtt-over-bound";
        sim_.log().add(std::move(r));
    }
}

// Member bookkeeping -------------------------------------------------------

void UnitAgent::admit(UnitId unit, const wire::SelectionInfo& info)
{
    refresh(unit, info);
    send(unit, wire::ConfigSync{config_});
}

void UnitAgent::refresh(UnitId unit, const wire::SelectionInfo& info)
{
    if (unit == id_) {
        return;
    }
    const auto now = sim_.engine().now();
    auto [it, inserted] = peers_.try_emplace(unit);
    if (inserted) {
        it->second.since = now;
    }
    it->second.info = info;
    it->second.deadline = now + sim_.config().health.liveness_window();
    const sim::SimTime deadline = it->second.deadline;
    at_time(deadline, [this, unit, deadline] { peer_deadline(unit, deadline); });
}

void UnitAgent::peer_deadline(UnitId unit, sim::SimTime deadline)
{
    auto it = peers_.find(unit);
    if (it == peers_.end() || it->second.deadline != deadline) {
        return;
    }
    if (elector_.role() == election::Role::primary) {
        remove_member(unit, health::RemovalReason::keepalive_miss);
        return;
    }
    const bool lost_primary = elector_.primary() == unit;
    peers_.erase(it);
    if (lost_primary || !elector_.primary()) {
        if (lost_primary) {
            prober_.reset();
        }
        std::vector<election::Member> survivors;
        for (const auto& [id, peer] : peers_) {
            survivors.push_back(election::Member{id, peer.info});
        }
        apply(elector_.on_primary_loss(survivors), "failover");
        return;
    }
    update_standby();
}

void UnitAgent::remove_member(UnitId unit, health::RemovalReason reason)
{
    auto it = peers_.find(unit);
    if (it == peers_.end()) {
        return;
    }
    peers_.erase(it);
    cancel_interface_timers(unit);
    send(unit, wire::ForcedLeave{elector_.identity(), health::to_leave_reason(reason)});
    metrics::MetricRow r;
    r.at = sim_.engine().now();
    r.record = "removal";
    r.unit = sim_.label(unit);
    r.peer = spec_.label;
    r.detail = health::to_string(reason);
    sim_.log().add(std::move(r));
    sim_.log().count("removals");
}

void UnitAgent::cancel_interface_timers(UnitId member)
{
    for (auto it = iface_timers_.begin(); it != iface_timers_.end();) {
        if (it->first.first == member) {
            sim_.engine().cancel(it->second);
            it = iface_timers_.erase(it);
        } else {
            ++it;
        }
    }
}

void UnitAgent::on_member_interface(UnitId member, const health::InterfaceState& iface)
{
    if (!joined() || elector_.role() != election::Role::primary) {
        return;
    }
    sim::SimTime since;
    if (member == id_) {
        since = joined_at_;
    } else if (auto it = peers_.find(member); it != peers_.end()) {
        since = it->second.since;
    } else {
        return;
    }
    const auto now = sim_.engine().now();
    const auto key = std::make_pair(member, iface.id);
    if (auto it = iface_timers_.find(key); it != iface_timers_.end()) {
        sim_.engine().cancel(it->second);
        iface_timers_.erase(it);
    }
    const auto d = health::on_interface_change(sim_.config().health, since, iface, now);
    using Action = health::InterfaceDecision::Action;
    if (d.action == Action::none || d.action == Action::cancel) {
        return;
    }
    const std::uint64_t session = session_;
    const std::string name = iface.id;
    const auto when = std::max(d.at, now);
    auto fire = [this, session, member, name, key, action = d.action, reason = d.reason] {
        if (session != session_ || !powered_) {
            return;
        }
        iface_timers_.erase(key);
        if (member != id_ && peers_.count(member) == 0) {
            return;
        }
        const auto& ifs = sim_.agent(member).interfaces();
        auto st = std::find_if(ifs.begin(), ifs.end(), [&](const auto& i) { return i.id == name; });
        if (st == ifs.end() || st->up) {
            return;
        }
        if (action == Action::recheck_at) {
            on_member_interface(member, *st);
            return;
        }
        const auto final_reason = health::all_monitored_down(ifs) ? health::RemovalReason::all_ifaces : reason;
        if (member == id_) {
            metrics::MetricRow r;
            r.at = sim_.engine().now();
            r.record = "removal";
            r.unit = spec_.label;
            r.peer = spec_.label;
            r.detail = health::to_string(final_reason);
            sim_.log().add(std::move(r));
            sim_.log().count("removals");
            leave(membership::RejoinCause::data_iface_fail, health::to_string(final_reason));
            return;
        }
        remove_member(member, final_reason);
    };
    iface_timers_[key] = sim_.engine().schedule(when, sim::EventKind::timer_expiry, std::move(fire));
}

void UnitAgent::set_interface(const std::string& iface, bool up)
{
    const auto& cluster = sim_.cluster_config();
    if (iface == cluster.ccl_interface) {
        if (ccl_up_ == up) {
            return;
        }
        ccl_up_ = up;
        sim_.refresh_isolation(id_);
        if (up || !powered_) {
            return;
        }
        if (elector_.joined()) {
            row("ccl_failure", std::nullopt, "carrier-down");
            leave(membership::RejoinCause::ccl_fail_after_join, "ccl-fail-after-join");
        } else if (elector_.awaiting_response()) {
            ++session_;
            elector_.leave(election::Role::unjoined);
            join_timer_.reset();
            rejoin_.start(membership::RejoinPolicy::for_cause(membership::RejoinCause::ccl_fail_at_join,
                                                              sim_.config().rejoin_interval),
                          sim_.engine().now());
            sim_.log().add(
                metrics::MembershipRow{sim_.engine().now(), spec_.label, state(), state(), "ccl-fail-at-join"});
        }
        return;
    }
    auto it = std::find_if(interfaces_.begin(), interfaces_.end(), [&](const auto& i) { return i.id == iface; });
    if (it == interfaces_.end()) {
        return;
    }
    if (up) {
        it->mark_up();
    } else {
        it->mark_down(sim_.engine().now());
    }
    if (powered_) {
        sim_.report_interface(id_, *it);
    }
}

void UnitAgent::set_interface_role(const std::string& iface, const std::string& role)
{
    auto& roles = config_.interface_roles;
    auto it = std::find_if(roles.begin(), roles.end(), [&](const auto& r) { return r.interface_name == iface; });
    if (it == roles.end()) {
        roles.push_back(wire::InterfaceRole{iface, role});
    } else {
        it->role = role;
    }
    ++config_.version;
    if (elector_.role() != election::Role::primary) {
        return;
    }
    for (const auto& [peer, info] : peers_) {
        send(peer, wire::ConfigSync{config_});
    }
}

void UnitAgent::update_standby(bool sync)
{
    if (!joined() || elector_.role() == election::Role::primary ||
        sim_.engine().now() < joined_at_ + sim_.config().health.keepalive_interval * 2) {
        return;
    }
    std::vector<election::Member> all;
    all.push_back(election::Member{id_, spec_.identity});
    for (const auto& [id, peer] : peers_) {
        all.push_back(election::Member{id, peer.info});
    }
    const bool standby = election::recompute_primary2(all) == id_;
    elector_.set_primary2(standby);
    if (sync) {
        sync_state(standby ? "standby-elected" : "standby-cleared");
    }
}

void UnitAgent::sync_state(const std::string& reason)
{
    const std::string s = state();
    if (s == last_state_) {
        return;
    }
    sim_.log().add(metrics::MembershipRow{sim_.engine().now(), spec_.label, last_state_, s, reason});
    last_state_ = s;
}

void UnitAgent::row(const char* record, std::optional<UnitId> peer, const std::string& detail,
                    std::optional<double> value)
{
    metrics::MetricRow r;
    r.at = sim_.engine().now();
    r.record = record;
    r.unit = spec_.label;
    if (peer) {
        r.peer = sim_.label(*peer);
    }
    r.value = value;
    r.detail = detail;
    sim_.log().add(std::move(r));
}

}  // namespace wbc::cluster
