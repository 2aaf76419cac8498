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

#include "wbc/sim/engine.hpp"

#include "wbc/common.hpp"

#include <cstdio>
#include <string>

namespace wbc::sim {

std::string format_seconds(SimTime t)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%06llu", static_cast<unsigned long long>(t.micros() / 1000000),
                  static_cast<unsigned long long>(t.micros() % 1000000));
    return buf;
}

const char* to_string(EventKind kind) noexcept
{
    switch (kind) {
    case EventKind::deliver_message:
        return "deliver-message";
    case EventKind::timer_expiry:
        return "timer-expiry";
    case EventKind::scenario_injection:
        return "scenario-injection";
    }
    return "?";
}

Engine::Engine(std::uint64_t seed) : rng_(seed) {}

EventId Engine::schedule(SimTime at, EventKind kind, std::function<void()> action)
{
    if (at < now_) {
        throw InvariantViolation("event scheduled in the past: at=" + format_seconds(at) +
                                 "s now=" + format_seconds(now_) + "s");
    }
    const EventId id = next_seq_++;
    queue_.push(Event{at, id, kind, std::move(action)});
    return id;
}

const metrics::MetricsLog& Engine::run(SimTime until)
{
    while (!queue_.empty() && queue_.top().fire_at <= until) {
        // priority_queue::top is const; the action is moved out before pop.
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        if (auto it = cancelled_.find(ev.seq); it != cancelled_.end()) {
            cancelled_.erase(it);
            continue;
        }
        if (ev.fire_at < now_) {
            throw InvariantViolation("clock would move backwards");
        }
        now_ = ev.fire_at;
        ++processed_;
        if (trace_ != nullptr) {
            trace_->push_back(TraceEntry{ev.fire_at, ev.seq, ev.kind});
        }
        if (ev.action) {
            ev.action();
        }
    }
    return metrics_;
}

}  // namespace wbc::sim
