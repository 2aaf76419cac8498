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
#include "wbc/sim/engine.hpp"
#include "wbc/wire/message.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <map>
#include <set>
#include <span>
#include <variant>
#include <vector>

namespace wbc::sim {

/// Reserved cluster multicast groups.
inline constexpr Ipv4 kElectionGroup{224, 1, 0, 10};
inline constexpr Ipv4 kForceSecondaryGroup{224, 1, 0, 11};
inline constexpr Ipv4 kKeepaliveGroup{224, 1, 0, 12};

struct ChannelSpec {
    Duration base_latency{0};
    Duration jitter{0};  ///< half-width of the uniform draw
    double loss_rate = 0.0;

    /// Throws std::invalid_argument on negative durations or loss outside [0,1].
    void validate() const;
};

using Destination = std::variant<UnitId, Ipv4>;

struct ChannelCounters {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_loss = 0;
    std::uint64_t dropped_unreachable = 0;
    std::uint64_t dropped_down = 0;

    std::uint64_t dropped() const noexcept { return dropped_loss + dropped_unreachable + dropped_down; }
};

/// One send or delivery, recorded when tracing is enabled.
struct MessageTrace {
    SimTime at;
    UnitId src{};
    Destination dest;
    wire::MessageType type{};
    std::size_t copies = 0;  ///< receivers the send fanned out to
};

/// Simulated cluster control link fabric. Messages are encoded on send and
/// handed to the receiver as bytes, so every hop exercises the codec.
class Network {
public:
    using Receiver = std::function<void(UnitId from, std::span<const std::uint8_t> bytes)>;

    explicit Network(Engine& engine) : engine_(engine) {}

    void attach(UnitId unit, Receiver receiver);
    void subscribe(UnitId unit, Ipv4 group);
    void unsubscribe(UnitId unit, Ipv4 group);

    /// A unit that is down neither sends nor receives.
    void set_up(UnitId unit, bool up);
    bool is_up(UnitId unit) const;

    /// Cuts the unit off the fabric without it noticing locally.
    void set_isolated(UnitId unit, bool isolated);
    bool is_isolated(UnitId unit) const;

    /// Unicast: one delivery at now + latency + jitter unless the loss draw
    /// drops it. Multicast: an independent draw per subscriber other than src.
    /// Unknown destinations are dropped and counted.
    void send(UnitId src, const Destination& dest, const wire::Message& msg, const ChannelSpec& channel);

    const ChannelCounters& counters() const noexcept { return counters_; }

    void record_messages(std::vector<MessageTrace>* sink) noexcept { trace_ = sink; }

private:
    struct Port {
        Receiver receiver;
        bool up = true;
        bool isolated = false;
    };

    void transmit(UnitId src, UnitId dst, std::shared_ptr<const std::vector<std::uint8_t>> bytes,
                  const ChannelSpec& channel);
    bool reachable(UnitId unit) const;

    Engine& engine_;
    std::map<UnitId, Port> ports_;
    std::map<Ipv4, std::set<UnitId>> groups_;
    ChannelCounters counters_;
    std::vector<MessageTrace>* trace_ = nullptr;
};

}  // namespace wbc::sim
