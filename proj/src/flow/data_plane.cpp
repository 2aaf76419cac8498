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

#include "wbc/flow/data_plane.hpp"

#include "wbc/flow/replicated_state.hpp"
#include "wbc/flow/syn_cookie.hpp"
#include "wbc/wire/codec.hpp"

#include <algorithm>

namespace wbc::flow {

namespace {

FlowKey key_of(const wire::IpLayerConnInfo& ip, std::uint16_t sport, std::uint16_t dport)
{
    auto key = FlowKey::from_wire(ip, sport, dport);
    if (!key) {
        throw InvariantViolation("flow message with unknown protocol " + std::to_string(ip.protocol));
    }
    return key->canonical();
}

wire::TcpState next_state(wire::TcpState current, Segment segment)
{
    using wire::TcpState;
    switch (segment) {
    case Segment::syn:
        return TcpState::syn_sent;
    case Segment::syn_ack:
        return TcpState::established;
    case Segment::data:
        return current == TcpState::syn_sent ? TcpState::established : current;
    case Segment::fin:
        if (current == TcpState::fin_wait || current == TcpState::closed) {
            return TcpState::closed;
        }
        return TcpState::fin_wait;
    case Segment::datagram:
        return current;
    }
    return current;
}

}  // namespace

DataPlane::DataPlane(DataPlaneConfig config, sim::Rng& rng, metrics::MetricsLog* log)
    : config_(config), rng_(rng), log_(log),
      labeler_([](UnitId u) { return "u" + std::to_string(to_underlying(u)); })
{
}

bool DataPlane::is_member(UnitId unit) const
{
    return std::binary_search(ring_.begin(), ring_.end(), unit);
}

void DataPlane::set_members(std::span<const UnitId> members, sim::SimTime now)
{
    std::vector<UnitId> next(members.begin(), members.end());
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());

    for (auto it = tables_.begin(); it != tables_.end();) {
        if (!std::binary_search(next.begin(), next.end(), it->first)) {
            it = tables_.erase(it);
        } else {
            ++it;
        }
    }
    ring_ = std::move(next);
    for (UnitId u : ring_) {
        tables_[u];
    }
    if (ring_.empty()) {
        for (auto& [key, known] : known_) {
            if (!known.lost) {
                known.lost = true;
                ++counters_.flows_lost;
                flow_row(now, known.id, "lost", std::nullopt, std::nullopt);
            }
        }
        return;
    }

    // Collect first, then dispatch.
    struct Move {
        UnitId unit;
        FlowKey key;
    };
    std::vector<Move> reorganize;
    std::vector<Move> rehome;
    for (auto& [unit, table] : tables_) {
        for (auto& [key, entry] : table) {
            if (entry.owner) {
                if (choose_organizer(key, ring_, unit, config_.hash_fields) != entry.organizer ||
                    !is_member(entry.organizer)) {
                    reorganize.push_back({unit, key});
                }
            } else if (entry.backup && !is_member(entry.proprietor)) {
                if (ring_target(key, ring_, config_.hash_fields) != unit) {
                    rehome.push_back({unit, key});
                }
            }
        }
    }

    for (const auto& m : reorganize) {
        LocalEntry& e = tables_[m.unit][m.key];
        const UnitId old = e.organizer;
        e.organizer = choose_organizer(m.key, ring_, m.unit, config_.hash_fields);
        if (e.organizer != m.unit) {
            e.backup = false;
        }
        register_with_organizer(m.unit, m.key, now);
        if (old != e.organizer && is_member(old)) {
            release_backup(m.unit, old, m.key, now);
        }
    }

    for (const auto& m : rehome) {
        Table& table = tables_[m.unit];
        auto it = table.find(m.key);
        if (it == table.end() || !it->second.backup) {
            continue;
        }
        const UnitId target = ring_target(m.key, ring_, config_.hash_fields);
        wire::Replication rep{m.key.ip_info(), it->second.upper,
                              wire::OwnerInfo{it->second.proprietor, wire::OwnerStatus::owner_down}};
        it->second.backup = false;
        if (!it->second.owner && !it->second.forwarder) {
            table.erase(it);
        }
        dispatch(m.unit, target, rep, now);
    }

    for (auto& [key, known] : known_) {
        if (known.lost) {
            continue;
        }
        bool held = false;
        for (const auto& [unit, table] : tables_) {
            auto it = table.find(key);
            if (it != table.end() && (it->second.owner || it->second.backup)) {
                held = true;
                break;
            }
        }
        if (!held) {
            known.lost = true;
            ++counters_.flows_lost;
            flow_row(now, known.id, "lost", std::nullopt, std::nullopt);
        }
    }
}

PacketOutcome DataPlane::on_packet(UnitId arrival, const Packet& packet, sim::SimTime now)
{
    PacketOutcome out;
    out.path.push_back(arrival);
    if (!is_member(arrival)) {
        drop(out);
        return out;
    }
    const FlowKey key = packet.key.canonical();
    Table& table = tables_[arrival];

    if (auto it = table.find(key); it != table.end()) {
        LocalEntry& e = it->second;
        if (e.owner) {
            process_at_owner(arrival, key, packet, now, out);
            return out;
        }
        if (e.backup) {
            const UnitId p = e.proprietor;
            if (p != arrival && is_member(p) && local(p, key) && local(p, key)->owner) {
                e.forwarder = true;
                out.path.push_back(p);
                process_at_owner(p, key, packet, now, out);
                return out;
            }
            take_over(arrival, key, e.upper, arrival, now);
            out.owner_moved = true;
            process_at_owner(arrival, key, packet, now, out);
            return out;
        }
        if (e.forwarder) {
            const UnitId p = e.proprietor;
            if (is_member(p) && local(p, key) && local(p, key)->owner) {
                out.path.push_back(p);
                process_at_owner(p, key, packet, now, out);
                return out;
            }
            table.erase(it);
        }
    }

    const bool known_live = known_.count(key) != 0 && !known_.at(key).lost;

    if (packet.segment == Segment::syn && !key.short_lived() && !known_live) {
        UnitId owner = arrival;
        if (config_.rebalance) {
            if (auto target = pick_rebalanced(arrival)) {
                owner = *target;
                out.redirected = true;
                ++counters_.redirects;
                LocalEntry& fwd = table[key];
                fwd.forwarder = true;
                fwd.proprietor = owner;
                out.path.push_back(owner);
            }
        }
        create_owned(owner, key, wire::TcpState::syn_sent, now);
        if (out.redirected) {
            table[key].flow_id = known_.at(key).id;
        }
        out.created = true;
        process_at_owner(owner, key, packet, now, out);
        return out;
    }

    if (packet.segment == Segment::syn_ack && config_.seq_randomization && !key.short_lived()) {
        auto owner = decode_syn_cookie(packet.ack - 1);
        if (owner && *owner != arrival && is_member(*owner) && local(*owner, key) && local(*owner, key)->owner) {
            LocalEntry& fwd = table[key];
            fwd.flow_id = local(*owner, key)->flow_id;
            fwd.forwarder = true;
            fwd.proprietor = *owner;
            out.path.push_back(*owner);
            process_at_owner(*owner, key, packet, now, out);
            return out;
        }
        ++counters_.cookie_rejects;
    }

    const UnitId target = ring_target(key, ring_, config_.hash_fields);

    if (key.short_lived()) {
        // No lookup: the packet itself goes to the organizer, which relays it.
        if (target != arrival) {
            out.path.push_back(target);
        }
        const LocalEntry* at = local(target, key);
        if (at && at->owner) {
            process_at_owner(target, key, packet, now, out);
            return out;
        }
        if (at && at->backup) {
            const UnitId p = at->proprietor;
            if (is_member(p) && local(p, key) && local(p, key)->owner) {
                out.path.push_back(p);
                process_at_owner(p, key, packet, now, out);
                return out;
            }
            const auto upper = at->upper;
            take_over(target, key, upper, target, now);
            out.owner_moved = true;
            process_at_owner(target, key, packet, now, out);
            return out;
        }
        if (target != arrival) {
            out.path.push_back(arrival);
        }
        create_owned(arrival, key, wire::TcpState::none, now);
        out.created = true;
        process_at_owner(arrival, key, packet, now, out);
        return out;
    }

    out.owner_query = true;
    ++counters_.owner_queries;
    wire::OwnerQuery query{key.ip_info(), key.upper_info(wire::TcpState::none)};
    auto reply = dispatch(arrival, target, query, now);
    if (!reply || !std::holds_alternative<wire::OwnerReply>(*reply)) {
        drop(out);
        return out;
    }
    const auto& r = std::get<wire::OwnerReply>(*reply);
    switch (r.owner.status) {
    case wire::OwnerStatus::found: {
        const UnitId p = r.owner.owner;
        LocalEntry& fwd = table[key];
        fwd.flow_id = known_.count(key) ? known_.at(key).id : 0;
        fwd.forwarder = true;
        fwd.proprietor = p;
        out.path.push_back(p);
        process_at_owner(p, key, packet, now, out);
        return out;
    }
    case wire::OwnerStatus::owner_down:
        take_over(arrival, key, r.upper.value_or(key.upper_info(wire::TcpState::none)), target, now);
        out.owner_moved = true;
        process_at_owner(arrival, key, packet, now, out);
        return out;
    case wire::OwnerStatus::unknown:
        break;
    }
    if (key.protocol == Protocol::udp) {
        create_owned(arrival, key, wire::TcpState::none, now);
        out.created = true;
        process_at_owner(arrival, key, packet, now, out);
        return out;
    }
    drop(out);
    return out;
}

std::optional<FlowRecord> DataPlane::record(const FlowKey& k) const
{
    const FlowKey key = k.canonical();
    auto kit = known_.find(key);
    if (kit == known_.end()) {
        return std::nullopt;
    }
    FlowRecord rec;
    rec.id = kit->second.id;
    rec.key = key;
    rec.lost = kit->second.lost;
    const LocalEntry* owner_entry = nullptr;
    const LocalEntry* backup_entry = nullptr;
    for (const auto& [unit, table] : tables_) {
        auto it = table.find(key);
        if (it == table.end()) {
            continue;
        }
        const LocalEntry& e = it->second;
        if (e.owner) {
            rec.proprietor = unit;
            ++rec.proprietor_count;
            owner_entry = &e;
        }
        if (e.backup) {
            rec.organizer = unit;
            ++rec.organizer_count;
            backup_entry = &e;
        }
        if (e.forwarder) {
            rec.forwarders.insert(unit);
        }
    }
    if (const LocalEntry* src = owner_entry ? owner_entry : backup_entry) {
        rec.tcp_state = src->upper.tcp_state;
        rec.upper = src->upper;
        rec.syn_cookie = src->syn_cookie;
    }
    rec.backup_state_fresh = owner_entry && backup_entry && owner_entry->upper == backup_entry->upper;
    return rec;
}

std::vector<FlowRecord> DataPlane::records() const
{
    std::vector<FlowRecord> out;
    out.reserve(known_.size());
    for (const auto& [key, known] : known_) {
        out.push_back(*record(key));
    }
    std::sort(out.begin(), out.end(), [](const FlowRecord& a, const FlowRecord& b) { return a.id < b.id; });
    return out;
}

const LocalEntry* DataPlane::local(UnitId unit, const FlowKey& key) const
{
    auto t = tables_.find(unit);
    if (t == tables_.end()) {
        return nullptr;
    }
    auto it = t->second.find(key.canonical());
    return it == t->second.end() ? nullptr : &it->second;
}

std::map<UnitId, std::size_t> DataPlane::owned_counts() const
{
    std::map<UnitId, std::size_t> counts;
    for (UnitId u : ring_) {
        counts[u] = 0;
    }
    for (const auto& [unit, table] : tables_) {
        for (const auto& [key, e] : table) {
            if (e.owner && e.upper.tcp_state != wire::TcpState::closed) {
                ++counts[unit];
            }
        }
    }
    return counts;
}

std::optional<wire::Message> DataPlane::dispatch(UnitId from, UnitId to, const wire::Message& msg, sim::SimTime now)
{
    if (!is_member(to)) {
        if (log_) {
            log_->count("flow.msg_unreachable");
        }
        return std::nullopt;
    }
    auto carry = [&](UnitId src, UnitId dst, const wire::Message& m) {
        const auto bytes = wire::encode(m);
        auto decoded = wire::decode(bytes);
        if (!wire::ok(decoded)) {
            throw InvariantViolation(std::string("flow message failed to decode: ") +
                                     wire::to_string(std::get<wire::DecodeError>(decoded)));
        }
        if (log_) {
            log_->count(std::string("flow.msg.") + wire::to_string(wire::type_of(m)));
        }
        if (observer_) {
            observer_(src, dst, std::get<wire::Decoded>(decoded).message);
        }
        return std::move(std::get<wire::Decoded>(decoded).message);
    };
    const wire::Message delivered = carry(from, to, msg);
    auto reply = handle(to, from, delivered, now);
    if (!reply) {
        return std::nullopt;
    }
    return carry(to, from, *reply);
}

std::optional<wire::Message> DataPlane::handle(UnitId at, UnitId from, const wire::Message& msg, sim::SimTime now)
{
    Table& table = tables_[at];
    if (const auto* su = std::get_if<wire::StateUpdate>(&msg)) {
        const FlowKey key = key_of(su->ip, su->upper.src_port, su->upper.dst_port);
        LocalEntry& e = table[key];
        e.flow_id = known_.count(key) ? known_.at(key).id : 0;
        e.backup = true;
        e.proprietor = from;
        e.upper = su->upper;
        ++counters_.state_updates;
        flow_row(now, e.flow_id, "state-update", from, at);
        return std::nullopt;
    }
    if (const auto* rep = std::get_if<wire::Replication>(&msg)) {
        ++counters_.replications;
        if (!rep->upper) {
            return std::nullopt;
        }
        const FlowKey key = key_of(rep->ip, rep->upper->src_port, rep->upper->dst_port);
        if (rep->owner && rep->owner->status == wire::OwnerStatus::unknown) {
            // Release: the proprietor registered with another organizer.
            auto it = table.find(key);
            if (it != table.end() && !it->second.owner) {
                it->second.backup = false;
                if (!it->second.forwarder) {
                    table.erase(it);
                }
            }
            return std::nullopt;
        }
        LocalEntry& e = table[key];
        e.flow_id = known_.count(key) ? known_.at(key).id : 0;
        e.backup = true;
        e.upper = *rep->upper;
        if (rep->owner) {
            e.proprietor = rep->owner->owner;
        }
        return std::nullopt;
    }
    if (const auto* q = std::get_if<wire::OwnerQuery>(&msg)) {
        const std::uint16_t sport = q->upper ? q->upper->src_port : 0;
        const std::uint16_t dport = q->upper ? q->upper->dst_port : 0;
        const FlowKey key = key_of(q->ip, sport, dport);
        wire::OwnerReply r;
        r.ip = q->ip;
        r.upper = q->upper;
        r.owner = wire::OwnerInfo{at, wire::OwnerStatus::unknown};
        auto it = table.find(key);
        if (it != table.end() && it->second.owner) {
            r.owner = wire::OwnerInfo{at, wire::OwnerStatus::found};
        } else if (it != table.end() && it->second.backup) {
            const UnitId p = it->second.proprietor;
            const LocalEntry* pe = local(p, key);
            if (is_member(p) && pe && pe->owner) {
                r.owner = wire::OwnerInfo{p, wire::OwnerStatus::found};
            } else {
                r.owner = wire::OwnerInfo{p, wire::OwnerStatus::owner_down};
                r.upper = it->second.upper;
            }
        }
        return r;
    }
    return std::nullopt;
}

LocalEntry& DataPlane::create_owned(UnitId unit, const FlowKey& key, wire::TcpState state, sim::SimTime now)
{
    auto [kit, inserted] = known_.try_emplace(key);
    if (inserted || kit->second.lost) {
        kit->second.id = next_flow_id_++;
        kit->second.lost = false;
    }
    LocalEntry& e = tables_[unit][key];
    e.flow_id = kit->second.id;
    e.owner = true;
    e.forwarder = false;
    e.proprietor = unit;
    e.upper = key.upper_info(state);
    e.upper.opaque_state = initial_state(key, now);
    e.syn_cookie = encode_syn_cookie(unit, static_cast<std::uint16_t>(rng_.next()));
    e.organizer = choose_organizer(key, ring_, unit, config_.hash_fields);
    ++counters_.flows_created;
    flow_row(now, e.flow_id, "created", unit, e.organizer);
    register_with_organizer(unit, key, now);
    return tables_[unit][key];
}

void DataPlane::take_over(UnitId unit, const FlowKey& key, const wire::UpperLayerConnInfo& upper,
                          std::optional<UnitId> previous_backup, sim::SimTime now)
{
    LocalEntry& e = tables_[unit][key];
    e.flow_id = known_.count(key) ? known_.at(key).id : 0;
    e.owner = true;
    e.forwarder = false;
    e.backup = false;
    e.proprietor = unit;
    e.upper = upper;
    e.syn_cookie = encode_syn_cookie(unit, static_cast<std::uint16_t>(rng_.next()));
    e.organizer = choose_organizer(key, ring_, unit, config_.hash_fields);
    ++counters_.owner_moves;
    flow_row(now, e.flow_id, "owner-moved", unit, e.organizer);
    register_with_organizer(unit, key, now);
    if (previous_backup && *previous_backup != e.organizer && *previous_backup != unit &&
        is_member(*previous_backup)) {
        release_backup(unit, *previous_backup, key, now);
    }
}

void DataPlane::release_backup(UnitId owner, UnitId holder, const FlowKey& key, sim::SimTime now)
{
    const LocalEntry* held = local(holder, key);
    if (!held || !held->backup || held->owner) {
        return;
    }
    wire::Replication release{key.ip_info(), key.upper_info(wire::TcpState::none),
                              wire::OwnerInfo{owner, wire::OwnerStatus::unknown}};
    dispatch(owner, holder, release, now);
}

void DataPlane::register_with_organizer(UnitId owner, const FlowKey& key, sim::SimTime now)
{
    LocalEntry& e = tables_[owner][key];
    if (e.organizer == owner) {
        // Lone member: it is its own backup.
        e.backup = true;
        ++counters_.state_updates;
        flow_row(now, e.flow_id, "state-update", owner, owner);
        return;
    }
    dispatch(owner, e.organizer, wire::StateUpdate{key.ip_info(), e.upper}, now);
}

void DataPlane::process_at_owner(UnitId owner, const FlowKey& key, const Packet& packet, sim::SimTime now,
                                 PacketOutcome& out)
{
    LocalEntry& e = tables_[owner][key];
    out.delivered = true;
    out.processed_by = owner;
    const wire::TcpState before = e.upper.tcp_state;
    const wire::TcpState after = key.protocol == Protocol::tcp ? next_state(before, packet.segment) : before;
    if (packet.segment == Segment::syn) {
        out.rewritten_seq = config_.seq_randomization ? e.syn_cookie : packet.seq;
        e.upper.seq_num = out.rewritten_seq;
    } else if (packet.segment == Segment::syn_ack) {
        e.upper.ack_num = packet.seq;
    }
    if (after != before) {
        e.upper.tcp_state = after;
        register_with_organizer(owner, key, now);
    }
}

std::optional<UnitId> DataPlane::pick_rebalanced(UnitId arrival) const
{
    const auto counts = owned_counts();
    if (counts.size() < 2) {
        return std::nullopt;
    }
    std::size_t total = 0;
    for (const auto& [u, c] : counts) {
        total += c;
    }
    const double mean = static_cast<double>(total) / static_cast<double>(counts.size());
    const std::size_t mine = counts.at(arrival);
    if (static_cast<double>(mine) <= mean * config_.rebalance_threshold) {
        return std::nullopt;
    }
    auto least = std::min_element(counts.begin(), counts.end(),
                                  [](const auto& a, const auto& b) { return a.second < b.second; });
    if (least->second >= mine) {
        return std::nullopt;
    }
    return least->first;
}

std::vector<std::uint8_t> DataPlane::initial_state(const FlowKey& key, sim::SimTime now) const
{
    std::vector<StateEntry> entries;
    StateEntry uptime{StateCategory::uptime, {}};
    for (int shift = 56; shift >= 0; shift -= 8) {
        uptime.bytes.push_back(static_cast<std::uint8_t>(now.micros() >> shift));
    }
    entries.push_back(std::move(uptime));
    const std::string user = "user@" + key.src_ip.to_string();
    entries.push_back(StateEntry{StateCategory::user_identity, std::vector<std::uint8_t>(user.begin(), user.end())});
    StateEntry arp{StateCategory::arp_table, {}};
    for (int shift = 24; shift >= 0; shift -= 8) {
        arp.bytes.push_back(static_cast<std::uint8_t>(key.dst_ip.value >> shift));
    }
    entries.push_back(std::move(arp));
    entries.push_back(StateEntry{StateCategory::snmp_engine_id, {0x80, 0x00, 0x00, 0x09}});
    return pack_opaque_state(entries, config_.mode);
}

void DataPlane::flow_row(sim::SimTime at, std::uint64_t id, const char* event, std::optional<UnitId> proprietor,
                         std::optional<UnitId> organizer)
{
    if (!log_) {
        return;
    }
    log_->add(metrics::FlowRow{at, id, event, proprietor ? labeler_(*proprietor) : std::string{},
                               organizer ? labeler_(*organizer) : std::string{}});
}

void DataPlane::drop(PacketOutcome& out)
{
    out.delivered = false;
    ++counters_.packets_dropped;
    if (log_) {
        log_->count("flow.packets_dropped");
    }
}

}  // namespace wbc::flow
