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

#include "wbc/metrics/metrics_log.hpp"
#include "wbc/sim/rng.hpp"
#include "wbc/sim/time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

namespace wbc::sim {

enum class EventKind : std::uint8_t { deliver_message, timer_expiry, scenario_injection };

const char* to_string(EventKind kind) noexcept;

using EventId = std::uint64_t;

struct Event {
    SimTime fire_at;
    EventId seq = 0;
    EventKind kind = EventKind::timer_expiry;
    std::function<void()> action;
};

/// (fire_at, seq, kind) of a processed event; used to compare replays.
struct TraceEntry {
    SimTime at;
    EventId seq = 0;
    EventKind kind = EventKind::timer_expiry;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// Single-threaded discrete-event loop. Events fire in (fire_at, seq) order,
/// so events scheduled for the same instant run in insertion order.
class Engine {
public:
    explicit Engine(std::uint64_t seed);

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    SimTime now() const noexcept { return now_; }

    /// Throws InvariantViolation when `at` is earlier than now().
    EventId schedule(SimTime at, EventKind kind, std::function<void()> action);
    EventId schedule_after(Duration delay, EventKind kind, std::function<void()> action)
    {
        return schedule(now_ + delay, kind, std::move(action));
    }

    /// Cancelled events are discarded when popped.
    void cancel(EventId id) { cancelled_.insert(id); }

    /// Processes events with fire_at <= until. Returns the metrics log.
    const metrics::MetricsLog& run(SimTime until);

    bool idle() const noexcept { return queue_.empty(); }
    std::size_t pending() const noexcept { return queue_.size(); }
    std::uint64_t processed() const noexcept { return processed_; }

    Rng& rng() noexcept { return rng_; }
    metrics::MetricsLog& metrics() noexcept { return metrics_; }
    const metrics::MetricsLog& metrics() const noexcept { return metrics_; }

    /// When set, every processed event is appended to `sink`.
    void record_trace(std::vector<TraceEntry>* sink) noexcept { trace_ = sink; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept
        {
            return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
        }
    };

    SimTime now_;
    EventId next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<EventId> cancelled_;
    Rng rng_;
    metrics::MetricsLog metrics_;
    std::vector<TraceEntry>* trace_ = nullptr;
};

}  // namespace wbc::sim
