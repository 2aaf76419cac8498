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

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wbc {

/// Cluster-local unit identifier. Fits in one byte so it can be carried in
/// SYN cookies and owner-info components.
enum class UnitId : std::uint8_t {};

constexpr std::uint8_t to_underlying(UnitId id) noexcept
{
    return static_cast<std::uint8_t>(id);
}

/// IPv4 address in host byte order.
struct Ipv4 {
    std::uint32_t value = 0;

    constexpr Ipv4() = default;
    constexpr explicit Ipv4(std::uint32_t v) : value(v) {}
    constexpr Ipv4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : value((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) |
                (std::uint32_t{c} << 8) | std::uint32_t{d})
    {
    }

    constexpr bool is_multicast() const noexcept { return (value >> 28) == 0xE; }

    static std::optional<Ipv4> parse(std::string_view text);
    std::string to_string() const;

    friend constexpr auto operator<=>(Ipv4, Ipv4) = default;
};

/// Raised when the simulation detects a broken internal invariant. The CLI
/// maps this to exit status 3.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace wbc

template <>
struct std::hash<wbc::Ipv4> {
    std::size_t operator()(wbc::Ipv4 ip) const noexcept { return std::hash<std::uint32_t>{}(ip.value); }
};
