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

#include "wbc/flow/replicated_state.hpp"

namespace wbc::flow {

const char* to_string(StateCategory c) noexcept
{
    switch (c) {
    case StateCategory::uptime:
        return "uptime";
    case StateCategory::arp_table:
        return "arp-table";
    case StateCategory::mac_table:
        return "mac-table";
    case StateCategory::user_identity:
        return "user-identity";
    case StateCategory::snmp_engine_id:
        return "snmp-engine-id";
    case StateCategory::vpn_site_to_site:
        return "vpn-site-to-site";
    }
    return "?";
}

bool replicated_state_for(StateCategory category, wire::InterfaceMode mode) noexcept
{
    switch (category) {
    case StateCategory::uptime:
    case StateCategory::user_identity:
        return true;
    case StateCategory::arp_table:
    case StateCategory::mac_table:
        return mode == wire::InterfaceMode::individual;
    case StateCategory::snmp_engine_id:
    case StateCategory::vpn_site_to_site:
        return false;
    }
    return false;
}

std::vector<std::uint8_t> pack_opaque_state(std::span<const StateEntry> entries, wire::InterfaceMode mode)
{
    std::vector<std::uint8_t> out;
    for (const auto& e : entries) {
        if (!replicated_state_for(e.category, mode)) {
            continue;
        }
        if (e.bytes.size() > 0xFFFF) {
            throw std::length_error("state entry larger than 65535 bytes");
        }
        out.push_back(static_cast<std::uint8_t>(e.category));
        out.push_back(static_cast<std::uint8_t>(e.bytes.size() >> 8));
        out.push_back(static_cast<std::uint8_t>(e.bytes.size()));
        out.insert(out.end(), e.bytes.begin(), e.bytes.end());
    }
    return out;
}

std::vector<StateEntry> unpack_opaque_state(std::span<const std::uint8_t> blob)
{
    std::vector<StateEntry> out;
    std::size_t pos = 0;
    while (pos < blob.size()) {
        if (blob.size() - pos < 3) {
            throw MalformedState("truncated state record header");
        }
        const std::uint8_t cat = blob[pos];
        if (cat < 1 || cat > 6) {
            throw MalformedState("unknown state category " + std::to_string(cat));
        }
        const std::size_t len = (std::size_t{blob[pos + 1]} << 8) | blob[pos + 2];
        pos += 3;
        if (blob.size() - pos < len) {
            throw MalformedState("truncated state record body");
        }
        out.push_back(StateEntry{static_cast<StateCategory>(cat),
                                 std::vector<std::uint8_t>(blob.begin() + static_cast<std::ptrdiff_t>(pos),
                                                           blob.begin() + static_cast<std::ptrdiff_t>(pos + len))});
        pos += len;
    }
    return out;
}

}  // namespace wbc::flow
