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

#include "wbc/sim/network.hpp"

#include "wbc/wire/codec.hpp"

#include <memory>
#include <stdexcept>

namespace wbc::sim {

void ChannelSpec::validate() const
{
    if (base_latency.count() < 0 || jitter.count() < 0) {
        throw std::invalid_argument("channel latency and jitter must be non-negative");
    }
    if (!(loss_rate >= 0.0 && loss_rate <= 1.0)) {
        throw std::invalid_argument("channel loss rate must be in [0,1]");
    }
}

void Network::attach(UnitId unit, Receiver receiver)
{
    ports_[unit].receiver = std::move(receiver);
}

void Network::subscribe(UnitId unit, Ipv4 group) { groups_[group].insert(unit); }

void Network::unsubscribe(UnitId unit, Ipv4 group)
{
    if (auto it = groups_.find(group); it != groups_.end()) {
        it->second.erase(unit);
    }
}

void Network::set_up(UnitId unit, bool up) { ports_[unit].up = up; }

bool Network::is_up(UnitId unit) const
{
    auto it = ports_.find(unit);
    return it != ports_.end() && it->second.up;
}

void Network::set_isolated(UnitId unit, bool isolated) { ports_[unit].isolated = isolated; }

bool Network::is_isolated(UnitId unit) const
{
    auto it = ports_.find(unit);
    return it != ports_.end() && it->second.isolated;
}

bool Network::reachable(UnitId unit) const
{
    auto it = ports_.find(unit);
    return it != ports_.end() && it->second.up && !it->second.isolated;
}

void Network::send(UnitId src, const Destination& dest, const wire::Message& msg, const ChannelSpec& channel)
{
    auto bytes = std::make_shared<const std::vector<std::uint8_t>>(wire::encode(msg));
    std::size_t copies = 0;
    if (const auto* unit = std::get_if<UnitId>(&dest)) {
        copies = 1;
        if (ports_.find(*unit) == ports_.end()) {
            ++counters_.sent;
            ++counters_.dropped_unreachable;
            engine_.metrics().count("net.dropped_unreachable");
        } else {
            transmit(src, *unit, bytes, channel);
        }
    } else {
        const Ipv4 group = std::get<Ipv4>(dest);
        auto it = groups_.find(group);
        if (it == groups_.end() || it->second.empty()) {
            ++counters_.sent;
            ++counters_.dropped_unreachable;
            engine_.metrics().count("net.dropped_unreachable");
        } else {
            for (UnitId member : it->second) {
                if (member == src) {
                    continue;
                }
                ++copies;
                transmit(src, member, bytes, channel);
            }
        }
    }
    if (trace_ != nullptr) {
        trace_->push_back(MessageTrace{engine_.now(), src, dest, wire::type_of(msg), copies});
    }
}

void Network::transmit(UnitId src, UnitId dst, std::shared_ptr<const std::vector<std::uint8_t>> bytes,
                       const ChannelSpec& channel)
{
    ++counters_.sent;
    if (!reachable(src)) {
        ++counters_.dropped_down;
        return;
    }
    if (engine_.rng().chance(channel.loss_rate)) {
        ++counters_.dropped_loss;
        return;
    }
    std::int64_t delay = channel.base_latency.count();
    if (channel.jitter.count() > 0) {
        delay += engine_.rng().between(-channel.jitter.count(), channel.jitter.count());
    }
    if (delay < 0) {
        delay = 0;
    }
    engine_.schedule_after(Duration{delay}, EventKind::deliver_message, [this, src, dst, bytes] {
        auto it = ports_.find(dst);
        if (it == ports_.end() || !it->second.up || it->second.isolated || !it->second.receiver) {
            ++counters_.dropped_down;
            return;
        }
        ++counters_.delivered;
        it->second.receiver(src, *bytes);
    });
}

}  // namespace wbc::sim
