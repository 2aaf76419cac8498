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

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>

namespace wbc::sim {

using Duration = std::chrono::microseconds;

/// Virtual time: microseconds since simulation start.
class SimTime {
public:
    constexpr SimTime() = default;
    constexpr explicit SimTime(std::uint64_t us) : us_(us) {}

    static constexpr SimTime from(Duration since_start)
    {
        return SimTime{static_cast<std::uint64_t>(since_start.count() < 0 ? 0 : since_start.count())};
    }

    constexpr std::uint64_t micros() const noexcept { return us_; }
    constexpr Duration since_start() const noexcept { return Duration{static_cast<std::int64_t>(us_)}; }
    double seconds() const noexcept { return static_cast<double>(us_) / 1e6; }

    /// Saturates at zero rather than wrapping.
    constexpr SimTime operator+(Duration d) const noexcept
    {
        if (d.count() < 0 && static_cast<std::uint64_t>(-d.count()) > us_) {
            return SimTime{0};
        }
        return SimTime{us_ + static_cast<std::uint64_t>(d.count())};
    }
    constexpr SimTime operator-(Duration d) const noexcept { return *this + (-d); }
    constexpr Duration operator-(SimTime other) const noexcept
    {
        return Duration{static_cast<std::int64_t>(us_) - static_cast<std::int64_t>(other.us_)};
    }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;

private:
    std::uint64_t us_ = 0;
};

inline constexpr SimTime kTimeZero{};

/// Formats as seconds with microsecond precision, e.g. "109.000000".
std::string format_seconds(SimTime t);

}  // namespace wbc::sim
