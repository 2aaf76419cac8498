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

#include "wbc/wire/message.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace wbc::flow {

/// Extra per-connection state that may ride along in opaque_state.
enum class StateCategory : std::uint8_t {
    uptime = 1,
    arp_table = 2,
    mac_table = 3,
    user_identity = 4,  ///< AAA/radius blob
    snmp_engine_id = 5,
    vpn_site_to_site = 6,
};

const char* to_string(StateCategory c) noexcept;

/// Whether a category is replicated to the backup owner in `mode`.
bool replicated_state_for(StateCategory category, wire::InterfaceMode mode) noexcept;

struct StateEntry {
    StateCategory category = StateCategory::uptime;
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const StateEntry&, const StateEntry&) = default;
};

class MalformedState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Serializes the entries that replicate in `mode` as
/// (category u8, length u16 big-endian, bytes) records.
std::vector<std::uint8_t> pack_opaque_state(std::span<const StateEntry> entries, wire::InterfaceMode mode);

/// Throws MalformedState on a truncated record or unknown category.
std::vector<StateEntry> unpack_opaque_state(std::span<const std::uint8_t> blob);

}  // namespace wbc::flow
